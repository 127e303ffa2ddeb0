#include "marc/power_alloc.hpp"

#include <algorithm>
#include <map>

#include "marc/cod.hpp"
#include "marc/cof.hpp"

namespace marc {

namespace {

constexpr double kStepTol = 1e-5;   // epsilon_1: delta-step stall
constexpr double kRateTol = 1e-5;   // epsilon_2: outer rate change (bits)
constexpr int kMaxSca = 100;

// ----- tiny multivariate polynomial over integer exponents -----

using Expo = std::array<int, 4>;

struct Poly {
    std::map<Expo, double> terms;

    static Poly constant(double c) {
        Poly p;
        if (c != 0) p.terms[{0, 0, 0, 0}] = c;
        return p;
    }
    static Poly var(int id, double scale = 1.0) {
        Poly p;
        Expo e{0, 0, 0, 0};
        e[id] = 1;
        p.terms[e] = scale;
        return p;
    }
    Poly& add(const Poly& o, double w = 1.0) {
        for (const auto& [e, c] : o.terms) terms[e] += w * c;
        return *this;
    }
    Poly mul(const Poly& o) const {
        Poly out;
        for (const auto& [e1, c1] : terms)
            for (const auto& [e2, c2] : o.terms) {
                Expo e{e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]};
                out.terms[e] += c1 * c2;
            }
        return out;
    }
    void prune() {
        double big = 0;
        for (const auto& [e, c] : terms) big = std::max(big, std::abs(c));
        for (auto it = terms.begin(); it != terms.end();)
            it = std::abs(it->second) <= 1e-14 * big ? terms.erase(it) : std::next(it);
    }
};

gp::Monomial to_monomial(const Expo& e, double c) {
    gp::Monomial m;
    m.coeff = c;
    for (int i = 0; i < 4; ++i)
        if (e[i] != 0) m.exps[i] = double(e[i]);
    return m;
}

// split "poly <= 0" into posynomial sides num <= den
RatioConstraint split_by_sign(const Poly& p) {
    RatioConstraint rc;
    for (const auto& [e, c] : p.terms) {
        if (c > 0) rc.num += to_monomial(e, c);
        else if (c < 0) rc.den += to_monomial(e, -c);
    }
    return rc;
}

// term accumulators for the explicit psi assembly
struct TermList {
    std::map<Expo, double> terms;
    void add(double c, Expo e) { terms[e] += c; }
};

// relocate negative coefficients across the inequality so both sides stay
// posynomials; f <= g is preserved exactly
RatioConstraint relocate(TermList f, TermList g) {
    RatioConstraint rc;
    for (const auto& [e, c] : f.terms) {
        if (c > 0) rc.num += to_monomial(e, c);
        else if (c < 0) rc.den += to_monomial(e, -c);
    }
    for (const auto& [e, c] : g.terms) {
        if (c > 0) rc.den += to_monomial(e, c);
        else if (c < 0) rc.num += to_monomial(e, -c);
    }
    return rc;
}

// psi_1 / psi_2: the two posynomial sides of the per-link epigraph constraint
// at integer coefficients z, after the shift beta = delta - c. Variables are
// (0: delta_a, 1: delta_b, 3: epigraph); gains (ha, hb) are the link pair.
void psi_pair(double ha, double hb, IntPair z, double p, double n, const std::array<double, 3>& c,
              TermList& f, TermList& g) {
    double za = z[0], zb = z[1];
    double zz = za * za + zb * zb;
    double ca = c[0], cb = c[1];
    Expo kOne{0, 0, 0, 0}, kDa{1, 0, 0, 0}, kDb{0, 1, 0, 0}, kDa2{2, 0, 0, 0}, kDb2{0, 2, 0, 0};
    Expo kE{0, 0, 0, 1}, kEDa{1, 0, 0, 1}, kEDb{0, 1, 0, 1}, kEDa2{2, 0, 0, 1}, kEDb2{0, 2, 0, 1};
    Expo kDaDb{1, 1, 0, 0};

    // psi_1
    f.add(2 * p * ha * ha * ca, kEDa);
    f.add(2 * p * hb * hb * cb, kEDb);
    f.add(p * zz * ha * ha, kDa2);
    f.add(p * zz * ha * ha * ca * ca, kOne);
    f.add(p * zz * hb * hb, kDb2);
    f.add(p * zz * hb * hb * cb * cb, kOne);
    f.add(2 * p * ha * ha * za * za * ca, kDa);
    f.add(2 * p * hb * hb * zb * zb * cb, kDb);
    f.add(2 * p * ha * hb * za * zb * cb, kDa);
    f.add(2 * p * ha * hb * za * zb * ca, kDb);
    f.add(n * zz, kOne);

    // psi_2
    g.add(n, kE);
    g.add(p * ha * ha, kEDa2);
    g.add(p * ha * ha * ca * ca, kE);
    g.add(p * hb * hb, kEDb2);
    g.add(p * hb * hb * cb * cb, kE);
    g.add(2 * p * zz * ha * ha * ca, kDa);
    g.add(2 * p * zz * hb * hb * cb, kDb);
    g.add(p * ha * ha * za * za, kDa2);
    g.add(p * ha * ha * za * za * ca * ca, kOne);
    g.add(p * hb * hb * zb * zb, kDb2);
    g.add(p * hb * hb * zb * zb * cb * cb, kOne);
    g.add(2 * p * ha * hb * za * zb, kDaDb);
    g.add(2 * p * ha * hb * za * zb * ca * cb, kOne);
}

}  // namespace

PowerProblem build_cof_power_problem(const ChannelGains& ch, const PowerBudget& budget,
                                     IntPair k, IntPair t, std::array<double, 3> shift) {
    if (std::abs(det_int(k, t)) < 1) throw SingularEquations();
    double p = budget.p, n = budget.n;
    PowerProblem out;
    out.n_vars = 4;
    out.epigraph_var = 3;

    {
        TermList f, g;
        psi_pair(ch.ad, ch.bd, t, p, n, shift, f, g);
        out.ratios.push_back(relocate(std::move(f), std::move(g)));
    }
    {
        TermList f, g;
        psi_pair(ch.ar, ch.br, k, p, n, shift, f, g);
        out.ratios.push_back(relocate(std::move(f), std::move(g)));
    }
    {
        // relay bottleneck: N + 2 E P hrd^2 dr cr <= E (N + P hrd^2 (dr^2 + cr^2))
        TermList f, g;
        double cr = shift[2], hr2 = sq(ch.rd);
        f.add(n, {0, 0, 0, 0});
        f.add(2 * p * hr2 * cr, {0, 0, 1, 1});
        g.add(n, {0, 0, 0, 1});
        g.add(p * hr2, {0, 0, 2, 1});
        g.add(p * hr2 * cr * cr, {0, 0, 0, 1});
        out.ratios.push_back(relocate(std::move(f), std::move(g)));
    }

    double caps[3] = {budget.cap_a(), budget.cap_b(), budget.cap_r()};
    for (int i = 0; i < 3; ++i) {
        if (!(shift[i] > caps[i])) throw InfeasibleGp("shift constant must exceed sqrt(P_i/P)");
        out.box.push_back({shift[i] - caps[i], shift[i] + caps[i]});
    }
    double snr = budget.snr();
    double floor_max_power = 1.0 / (1.0 + snr * sq(ch.rd) * sq(caps[2]));
    double hi = 2.0 * (norm2(t) + norm2(k) + 2.0);
    out.box.push_back({0.5 * floor_max_power, hi});

    gp::Monomial obj;
    obj.coeff = 1.0;
    obj.exps[out.epigraph_var] = 1.0;
    out.objective += obj;
    return out;
}

PowerProblem build_cod_power_problem(const ChannelGains& ch, const PowerBudget& budget,
                                     IntPair k, IntPair t, Pair alpha_t, Pair alpha_k,
                                     std::array<double, 2> shift) {
    if (ch.rd == 0.0) throw ZeroRelayLink();
    double p = budget.p, n = budget.n, snr = budget.snr();
    PowerProblem out;
    out.n_vars = 4;  // delta_a, delta_b, D, epigraph
    out.epigraph_var = 3;

    Poly ba = Poly::var(0).add(Poly::constant(-shift[0]));
    Poly bb = Poly::var(1).add(Poly::constant(-shift[1]));
    Poly ba2 = ba.mul(ba), bb2 = bb.mul(bb);

    auto equation_constraint = [&](IntPair z, Pair alpha) {
        // snr ||beta o H' alpha - z||^2 + a1^2 + a2^2 (1 + D/N) <= snr * epigraph
        double wa = alpha[0] * ch.ad + alpha[1] * ch.ar;
        double wb = alpha[0] * ch.bd + alpha[1] * ch.br;
        Poly ra = ba.mul(Poly::constant(wa)).add(Poly::constant(-z[0]));
        Poly rb = bb.mul(Poly::constant(wb)).add(Poly::constant(-z[1]));
        Poly lhs = ra.mul(ra).add(rb.mul(rb));
        Poly c = Poly::constant(0);
        c.add(lhs, snr);
        c.add(Poly::constant(sq(alpha[0]) + sq(alpha[1])));
        c.add(Poly::var(2, sq(alpha[1]) / n));
        c.add(Poly::var(3, -snr));
        c.prune();
        out.ratios.push_back(split_by_sign(c));
    };
    equation_constraint(t, alpha_t);
    equation_constraint(k, alpha_k);

    {
        // N^2 (A B - snr^2 X^2) <= D hrd^2 Pr B
        Poly A = Poly::constant(1.0);
        A.add(ba2, snr * sq(ch.ar));
        A.add(bb2, snr * sq(ch.br));
        Poly B = Poly::constant(1.0);
        B.add(ba2, snr * sq(ch.ad));
        B.add(bb2, snr * sq(ch.bd));
        Poly X = Poly::constant(0);
        X.add(ba2, ch.ar * ch.ad);
        X.add(bb2, ch.br * ch.bd);
        Poly c = Poly::constant(0);
        c.add(A.mul(B), n * n);
        c.add(X.mul(X), -n * n * snr * snr);
        c.add(Poly::var(2).mul(B), -sq(ch.rd) * budget.pr);
        c.prune();
        out.ratios.push_back(split_by_sign(c));
    }

    double caps[2] = {budget.cap_a(), budget.cap_b()};
    for (int i = 0; i < 2; ++i) {
        if (!(shift[i] > caps[i])) throw InfeasibleGp("shift constant must exceed sqrt(P_i/P)");
        out.box.push_back({shift[i] - caps[i], shift[i] + caps[i]});
    }
    // D is bracketed by its extreme values over the beta box
    double mr = sq(caps[0] * ch.ar) + sq(caps[1] * ch.br);
    double md = sq(caps[0] * ch.ad) + sq(caps[1] * ch.bd);
    double dref = n * n / (sq(ch.rd) * budget.pr);
    out.box.push_back({0.25 * dref / (1.0 + snr * md), 4.0 * dref * (1.0 + snr * mr)});
    double hi = 2.0 * (norm2(t) + norm2(k) + 2.0) +
                2.0 * (sq(alpha_t[0]) + sq(alpha_t[1]) + sq(alpha_k[0]) + sq(alpha_k[1]));
    out.box.push_back({1e-12, hi});

    gp::Monomial obj;
    obj.coeff = 1.0;
    obj.exps[out.epigraph_var] = 1.0;
    out.objective += obj;
    return out;
}

gp::GpProblem condense_at(const PowerProblem& p, std::span<const double> anchor) {
    gp::GpProblem g;
    g.n_vars = p.n_vars;
    g.objective = p.objective;
    g.box = p.box;
    for (const auto& rc : p.ratios) {
        gp::Monomial approx = gp::monomial_approx(rc.den, anchor);
        gp::Posynomial c;
        for (const auto& m : rc.num.terms) {
            gp::Monomial q = m;
            q.coeff /= approx.coeff;
            for (auto [id, e] : approx.exps) {
                q.exps[id] -= e;
                if (q.exps[id] == 0) q.exps.erase(id);
            }
            c += q;
        }
        g.ineq.push_back(std::move(c));
    }
    return g;
}

double cof_epigraph(const ChannelGains& ch, const PowerBudget& budget, const BetaVector& beta,
                    IntPair k, IntPair t) {
    double snr = budget.snr();
    double qt = equation_residual(hprod(beta.sources(), ch.to_dest()), snr, t);
    double qk = equation_residual(hprod(beta.sources(), ch.to_relay()), snr, k);
    double fl = 1.0 / (1.0 + snr * sq(ch.rd) * sq(beta.r));
    return std::max({qt, qk, fl});
}

double cod_epigraph(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s, IntPair k,
                    IntPair t, Pair alpha_t, Pair alpha_k) {
    EffectiveSystem sys = build_effective_system(ch, budget, beta_s);
    double snr = budget.snr();
    return std::max(combiner_objective(sys, snr, t, alpha_t),
                    combiner_objective(sys, snr, k, alpha_k)) /
           snr;
}

// ----- successive convex approximation drivers -----

namespace {

struct ScaCore {
    std::vector<double> x;      // final anchor
    double objective;           // exact epigraph at the final point
    bool converged;
    double kkt_residual;
    std::vector<ScaTraceRow> trace;
};

// generic inner loop: anchor -> condense -> GP solve -> accept while improving
ScaCore run_sca(const PowerProblem& pp, std::vector<double> x0,
                const std::function<double(std::span<const double>)>& exact_objective,
                const TraceSink& sink, std::vector<ScaTraceRow>* trace_out, int iter_base) {
    ScaCore core{std::move(x0), 0, false, 0, {}};
    auto nudge = [&](std::vector<double> v) {
        for (int i = 0; i < pp.n_vars; ++i) {
            auto [lo, hi] = pp.box[i];
            double pad = 1e-9 * (hi - lo);
            v[i] = std::clamp(v[i], lo + pad, hi - pad);
        }
        return v;
    };
    core.x = nudge(core.x);
    core.x[pp.epigraph_var] = exact_objective(core.x);
    core.objective = core.x[pp.epigraph_var];

    for (int it = 1; it <= kMaxSca; ++it) {
        gp::GpProblem gpp = condense_at(pp, core.x);
        std::vector<double> start = core.x;
        start[pp.epigraph_var] *= 1.0 + 1e-6;
        start = nudge(start);
        gp::GpResult res = gp::solve_gp(gpp, &start);

        std::vector<double> xn = nudge(res.x);
        double obj = exact_objective(xn);
        xn[pp.epigraph_var] = obj;
        double step = 0;
        for (int i = 0; i < pp.n_vars; ++i)
            if (i != pp.epigraph_var) step += sq(xn[i] - core.x[i]);
        step = std::sqrt(step);

        if (obj > core.objective) {
            core.converged = true;  // condensation can no longer improve
            break;
        }
        core.x = xn;
        core.objective = obj;
        core.kkt_residual = res.kkt_residual;
        ScaTraceRow row{iter_base + it, obj, step};
        core.trace.push_back(row);
        if (trace_out) trace_out->push_back(row);
        if (sink) sink(row);
        if (step <= kStepTol) {
            core.converged = true;
            break;
        }
    }
    return core;
}

}  // namespace

ScaCofResult sca_power_cof(const ChannelGains& ch, const PowerBudget& budget, IntPair k,
                           IntPair t, const BetaVector& beta0, const TraceSink& sink) {
    std::array<double, 3> shift = default_shift(budget);
    PowerProblem pp = build_cof_power_problem(ch, budget, k, t, shift);
    BetaVector b = clamp_beta(beta0, budget);
    std::vector<double> x0{b.a + shift[0], b.b + shift[1], b.r + shift[2], 0.0};

    auto exact = [&](std::span<const double> x) {
        BetaVector bb{x[0] - shift[0], x[1] - shift[1], x[2] - shift[2]};
        return cof_epigraph(ch, budget, clamp_beta(bb, budget), k, t);
    };
    ScaCore core = run_sca(pp, std::move(x0), exact, sink, nullptr, 0);

    ScaCofResult out;
    out.beta = clamp_beta(
        {core.x[0] - shift[0], core.x[1] - shift[1], core.x[2] - shift[2]}, budget);
    out.objective = core.objective;
    out.converged = core.converged;
    out.kkt_residual = core.kkt_residual;
    out.trace = std::move(core.trace);
    return out;
}

ScaCodResult sca_power_cod(const ChannelGains& ch, const PowerBudget& budget, IntPair k,
                           IntPair t, Pair beta_s0, const TraceSink& sink) {
    if (std::abs(det_int(k, t)) < 1) throw SingularEquations();
    std::array<double, 2> shift{1.1 * budget.cap_a(), 1.1 * budget.cap_b()};
    BetaVector clamped = clamp_beta({beta_s0[0], beta_s0[1], 0}, budget);
    Pair bs{clamped.a, clamped.b};
    double snr = budget.snr();

    ScaCodResult out;
    double prev_rate = -1.0;

    for (int outer = 0; outer < kMaxSca; ++outer) {
        EffectiveSystem sys = build_effective_system(ch, budget, bs);
        Pair at = mmse_combiner(sys, t);
        Pair ak = mmse_combiner(sys, k);
        double rate = std::min(cod_equation_rate(sys, snr, t, at),
                               cod_equation_rate(sys, snr, k, ak));

        PowerProblem pp = build_cod_power_problem(ch, budget, k, t, at, ak, shift);
        std::vector<double> x0{bs[0] + shift[0], bs[1] + shift[1], sys.d, 0.0};
        auto exact = [&](std::span<const double> x) {
            Pair b{std::clamp(x[0] - shift[0], -budget.cap_a(), budget.cap_a()),
                   std::clamp(x[1] - shift[1], -budget.cap_b(), budget.cap_b())};
            return cod_epigraph(ch, budget, b, k, t, at, ak);
        };
        ScaCore core = run_sca(pp, std::move(x0), exact, sink, &out.trace, 0);

        Pair bs_new{std::clamp(core.x[0] - shift[0], -budget.cap_a(), budget.cap_a()),
                    std::clamp(core.x[1] - shift[1], -budget.cap_b(), budget.cap_b())};
        EffectiveSystem sys_new = build_effective_system(ch, budget, bs_new);
        Pair at_new = mmse_combiner(sys_new, t);
        Pair ak_new = mmse_combiner(sys_new, k);
        double rate_new = std::min(cod_equation_rate(sys_new, snr, t, at_new),
                                   cod_equation_rate(sys_new, snr, k, ak_new));

        if (rate_new + 1e-12 < rate) {
            // keep the previous point; the alternation has stalled
            out.converged = true;
            break;
        }
        bs = bs_new;
        out.kkt_residual = core.kkt_residual;
        if (outer > 0 && std::abs(rate_new - prev_rate) <= kRateTol) {
            out.converged = true;
            prev_rate = rate_new;
            break;
        }
        prev_rate = rate_new;
    }

    EffectiveSystem sys = build_effective_system(ch, budget, bs);
    out.beta_s = bs;
    out.alpha_t = mmse_combiner(sys, t);
    out.alpha_k = mmse_combiner(sys, k);
    out.objective = std::max(combiner_objective(sys, snr, t, out.alpha_t),
                             combiner_objective(sys, snr, k, out.alpha_k)) /
                    snr;
    return out;
}

}  // namespace marc
