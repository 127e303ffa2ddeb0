#include "marc/baselines.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace marc {
namespace {

// ----- derivative-free maximizer: grid + Nelder-Mead on the clamped box -----

using Objective = std::function<double(const std::vector<double>&)>;

struct Simplex {
    std::vector<std::vector<double>> x;
    std::vector<double> f;
};

// Standard Nelder-Mead ascent (we negate nothing; reflections compare by
// larger objective). Points outside the box are clamped by the objective.
void nelder_mead(const Objective& fn, std::vector<double>& best, double& fbest,
                 double scale, double tol, int max_iter) {
    size_t n = best.size();
    Simplex s;
    s.x.assign(n + 1, best);
    for (size_t i = 0; i < n; ++i) s.x[i + 1][i] += scale;
    s.f.resize(n + 1);
    for (size_t i = 0; i <= n; ++i) s.f[i] = fn(s.x[i]);

    auto order = [&] {
        std::vector<size_t> idx(n + 1);
        for (size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return s.f[a] > s.f[b]; });
        Simplex t;
        for (size_t i = 0; i <= n; ++i) {
            t.x.push_back(s.x[idx[i]]);
            t.f.push_back(s.f[idx[i]]);
        }
        s = std::move(t);
    };

    for (int it = 0; it < max_iter; ++it) {
        order();
        double spread = 0;
        for (size_t i = 0; i < n; ++i)
            spread = std::max(spread, std::abs(s.x[0][i] - s.x[n][i]));
        if (spread < tol) break;

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) centroid[j] += s.x[i][j] / double(n);
        }
        auto blend = [&](double c) {
            std::vector<double> p(n);
            for (size_t j = 0; j < n; ++j) p[j] = centroid[j] + c * (centroid[j] - s.x[n][j]);
            return p;
        };

        auto xr = blend(1.0);
        double fr = fn(xr);
        if (fr > s.f[0]) {
            auto xe = blend(2.0);
            double fe = fn(xe);
            if (fe > fr) { s.x[n] = xe; s.f[n] = fe; }
            else { s.x[n] = xr; s.f[n] = fr; }
        } else if (fr > s.f[n - 1]) {
            s.x[n] = xr; s.f[n] = fr;
        } else {
            auto xc = blend(fr > s.f[n] ? 0.5 : -0.5);
            double fc = fn(xc);
            if (fc > std::max(fr, s.f[n])) {
                s.x[n] = xc; s.f[n] = fc;
            } else {
                for (size_t i = 1; i <= n; ++i) {
                    for (size_t j = 0; j < n; ++j) s.x[i][j] = 0.5 * (s.x[i][j] + s.x[0][j]);
                    s.f[i] = fn(s.x[i]);
                }
            }
        }
    }
    order();
    if (s.f[0] > fbest) {
        fbest = s.f[0];
        best = s.x[0];
    }
}

// Grid (9 points per axis over [0, cap]) + refinement from the best 3 cells.
void maximize_over_box(const Objective& fn, const std::vector<double>& caps,
                       std::vector<double>& xbest, double& fbest) {
    size_t n = caps.size();
    const int kGrid = 9;
    std::vector<std::pair<double, std::vector<double>>> ranked;

    std::vector<int> idx(n, 0);
    for (;;) {
        std::vector<double> x(n);
        for (size_t j = 0; j < n; ++j) x[j] = caps[j] * idx[j] / double(kGrid - 1);
        ranked.emplace_back(fn(x), x);
        size_t j = 0;
        while (j < n && ++idx[j] == kGrid) idx[j++] = 0;
        if (j == n) break;
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    xbest = ranked[0].second;
    fbest = ranked[0].first;
    double scale = 0.1 * *std::max_element(caps.begin(), caps.end());
    for (size_t i = 0; i < std::min<size_t>(3, ranked.size()); ++i) {
        std::vector<double> x = ranked[i].second;
        double f = ranked[i].first;
        nelder_mead(fn, x, f, std::max(scale, 1e-3), 1e-6, 400);
        if (f > fbest) { fbest = f; xbest = x; }
    }
}

double log2p1(double x) { return std::log2(1.0 + x); }

}  // namespace

double af_rate(const ChannelGains& ch, const PowerBudget& budget, const BetaVector& beta) {
    double snr = budget.snr();
    Pair vr = hprod(beta.sources(), ch.to_relay());
    double gamma = std::sqrt(sq(beta.r) * snr / (1.0 + snr * norm2(vr)));
    double relay_path = gamma * ch.rd / std::sqrt(1.0 + sq(gamma) * sq(ch.rd));

    Pair ha = {ch.ad, ch.ar * relay_path};
    Pair hb = {ch.bd, ch.br * relay_path};
    double ca = sq(beta.a) * snr;
    double cb = sq(beta.b) * snr;

    // det(I + ca ha ha' + cb hb hb') expanded through the 2x2 Gram determinant
    double det_a = 1.0 + ca * norm2(ha);
    double det_b = 1.0 + cb * norm2(hb);
    double gram = norm2(ha) * norm2(hb) - sq(dot(ha, hb));
    double det_ab = 1.0 + ca * norm2(ha) + cb * norm2(hb) + ca * cb * gram;

    double r = std::min({std::log2(det_a), std::log2(det_b), 0.5 * std::log2(det_ab)});
    return std::max(0.0, 0.25 * r);
}

namespace {
double df_inner(Pair h, Pair beta_s, double snr) {
    return std::min({log2p1(snr * sq(h[0] * beta_s[0])), log2p1(snr * sq(h[1] * beta_s[1])),
                     0.5 * log2p1(snr * norm2(hprod(beta_s, h)))});
}
}  // namespace

double df_rate(const ChannelGains& ch, const PowerBudget& budget, const BetaVector& beta) {
    double snr = budget.snr();
    double relay = df_inner(ch.to_relay(), beta.sources(), snr);
    double direct = df_inner(ch.to_dest(), beta.sources(), snr) +
                    0.5 * log2p1(snr * sq(ch.rd) * sq(beta.r));
    return std::max(0.0, 0.25 * std::min(relay, direct));
}

double cf_distortion(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s) {
    if (ch.rd == 0.0) throw ZeroRelayLink();
    double snr = budget.snr();
    double n = budget.n;
    Pair vr = hprod(beta_s, ch.to_relay());
    Pair vd = hprod(beta_s, ch.to_dest());
    double denom = sq(ch.rd) * budget.pr;
    double d = n * n * (1.0 + snr * norm2(vr)) / denom -
               n * n * sq(snr * dot(vr, vd)) / (denom * (1.0 + snr * norm2(vd)));
    return std::max(0.0, d);  // nonnegative by Cauchy-Schwarz; guards rounding
}

double wz_rate(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s, double d) {
    if (!(d > 0.0)) throw NonpositiveDistortion();
    double p = budget.p, n = budget.n;
    Pair vr = hprod(beta_s, ch.to_relay());
    Pair vd = hprod(beta_s, ch.to_dest());
    double resid = n + p * norm2(vr) - sq(p * dot(vr, vd)) / (n + p * norm2(vd));
    return 0.25 * log2p1(resid / d);
}

CfRate cf_rate(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s) {
    double snr = budget.snr();
    double d = cf_distortion(ch, budget, beta_s);
    double q = 1.0 + d / budget.n;

    Pair vr = hprod(beta_s, ch.to_relay());
    Pair vd = hprod(beta_s, ch.to_dest());
    double term_a = log2p1(snr * sq(ch.ad * beta_s[0]) + snr * sq(ch.ar * beta_s[0]) / q);
    double term_b = log2p1(snr * sq(ch.bd * beta_s[1]) + snr * sq(ch.br * beta_s[1]) / q);
    double joint = ((1.0 + snr * norm2(vd)) * (q + snr * norm2(vr)) - sq(snr * dot(vr, vd))) / q;
    double rate = 0.25 * std::min({term_a, term_b, 0.5 * std::log2(joint)});
    return {std::max(0.0, rate), d};
}

BaselineResult optimize_baseline(Strategy strategy, const ChannelGains& ch,
                                 const PowerBudget& budget) {
    BaselineResult out;
    out.strategy = strategy;

    if (strategy == Strategy::CF) {
        // distortion falls with relay power, so beta_r is pinned at the cap
        double snr = budget.snr();
        Objective fn = [&](const std::vector<double>& x) {
            Pair bs = {std::clamp(x[0], 0.0, budget.cap_a()),
                       std::clamp(x[1], 0.0, budget.cap_b())};
            if (ch.rd == 0.0) {
                // D -> inf limit: the relay observation is never recovered and
                // CF collapses to the direct-link multiaccess rate
                Pair vd = hprod(bs, ch.to_dest());
                double r = std::min({log2p1(snr * sq(ch.ad * bs[0])),
                                     log2p1(snr * sq(ch.bd * bs[1])),
                                     0.5 * log2p1(snr * norm2(vd))});
                return std::max(0.0, 0.25 * r);
            }
            return cf_rate(ch, budget, bs).rate_bits;
        };
        std::vector<double> x;
        double f = 0;
        maximize_over_box(fn, {budget.cap_a(), budget.cap_b()}, x, f);
        Pair bs = {std::clamp(x[0], 0.0, budget.cap_a()), std::clamp(x[1], 0.0, budget.cap_b())};
        out.beta = {bs[0], bs[1], budget.cap_r()};
        out.rate_bits = f;
        if (ch.rd != 0.0) out.distortion = cf_distortion(ch, budget, bs);
        return out;
    }

    Objective fn = [&](const std::vector<double>& x) {
        BetaVector b = clamp_beta({x[0], x[1], x[2]}, budget);
        return strategy == Strategy::AF ? af_rate(ch, budget, b) : df_rate(ch, budget, b);
    };
    std::vector<double> x;
    double f = 0;
    maximize_over_box(fn, {budget.cap_a(), budget.cap_b(), budget.cap_r()}, x, f);
    out.beta = clamp_beta({x[0], x[1], x[2]}, budget);
    out.rate_bits = f;
    return out;
}

}  // namespace marc
