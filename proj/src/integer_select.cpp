#include "marc/integer_select.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "marc/cod.hpp"
#include "marc/cof.hpp"

namespace marc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rate_from_objective(double obj) {
    if (!(obj > 0)) return kInf;
    return 0.25 * log2_pos(1.0 / obj);
}

// canonical-representative ordering: (|a|, |b|) lexicographic, then raw entries
bool vec_less(IntPair x, IntPair y) {
    auto kx = std::array<int, 4>{std::abs(x[0]), std::abs(x[1]), x[0], x[1]};
    auto ky = std::array<int, 4>{std::abs(y[0]), std::abs(y[1]), y[0], y[1]};
    return kx < ky;
}

bool pair_less(IntPair k1, IntPair t1, IntPair k2, IntPair t2) {
    auto key = [](IntPair k, IntPair t) {
        return std::array<int, 8>{std::abs(k[0]), std::abs(k[1]), std::abs(t[0]), std::abs(t[1]),
                                  k[0], k[1], t[0], t[1]};
    };
    return key(k1, t1) < key(k2, t2);
}

struct Cand {
    double v;
    IntPair c;
};

// all canonical (first nonzero entry positive) integer points with
// 1 <= ||c||^2 <= bound, sorted by quadratic value then canonical order
std::vector<Cand> enumerate_ball(const Mat2& q, double bound) {
    std::vector<Cand> out;
    if (bound < 1) return out;
    int amax = int(std::floor(std::sqrt(bound)));
    for (int a = 0; a <= amax; ++a) {
        double rem = bound - double(a) * a;
        int bmax = int(std::floor(std::sqrt(std::max(0.0, rem))));
        int bmin = (a == 0) ? 1 : -bmax;
        for (int b = bmin; b <= bmax; ++b) {
            if (a == 0 && b == 0) continue;
            IntPair c{a, b};
            out.push_back({q.quad(c), c});
        }
    }
    std::sort(out.begin(), out.end(), [](const Cand& x, const Cand& y) {
        if (x.v != y.v) return x.v < y.v;
        return vec_less(x.c, y.c);
    });
    return out;
}

bool indep(IntPair k, IntPair t) { return det_int(k, t) != 0; }

IntPair flip_canonical(IntPair v) {
    if (v[0] < 0 || (v[0] == 0 && v[1] < 0)) return {-v[0], -v[1]};
    return v;
}

// per-equation sign flips keep the objective and |det|; report the
// representative with positive leading entries
void canonicalize(IntegerSolution& s) {
    s.k = flip_canonical(s.k);
    s.t = flip_canonical(s.t);
}

}  // namespace

NormBounds norm_bounds(const ChannelGains& ch, const PowerBudget& budget) {
    double snr = budget.snr();
    return {1.0 + norm2(ch.to_relay()) * snr, 1.0 + norm2(ch.to_dest()) * snr};
}

IntegerSolution exhaustive_select(const Mat2& q_t, const Mat2& q_k, double floor_value,
                                  NormBounds bounds) {
    std::vector<Cand> ks = enumerate_ball(q_k, bounds.b_k);
    std::vector<Cand> ts = enumerate_ball(q_t, bounds.b_t);
    if (ks.empty() || ts.empty()) throw InfeasibleSelection();

    // theta = min over independent pairs of max(value_k, value_t)
    double theta = kInf;
    const Cand& k1 = ks.front();
    const Cand& t1 = ts.front();
    if (indep(k1.c, t1.c)) {
        theta = std::max(k1.v, t1.v);
    } else {
        // scan the min-value levels for a cross-independent pair
        bool found = false;
        for (const Cand& t : ts) {
            if (t.v != t1.v) break;
            if (indep(k1.c, t.c)) { found = true; break; }
        }
        if (!found) {
            for (const Cand& k : ks) {
                if (k.v != k1.v) break;
                if (indep(k.c, t1.c)) { found = true; break; }
            }
        }
        if (found) {
            theta = std::max(k1.v, t1.v);
        } else {
            // every minimum-level vector shares one direction; the optimum
            // deviates on exactly one side
            double ta = kInf, tb = kInf;
            for (const Cand& t : ts)
                if (indep(k1.c, t.c)) { ta = std::max(k1.v, t.v); break; }
            for (const Cand& k : ks)
                if (indep(k.c, t1.c)) { tb = std::max(k.v, t1.v); break; }
            theta = std::min(ta, tb);
        }
    }
    if (theta == kInf) throw InfeasibleSelection();

    // deterministic representative among ties: canonical-lex smallest pair
    std::vector<IntPair> kset, tset;
    for (const Cand& k : ks) {
        if (k.v > theta) break;
        kset.push_back(k.c);
    }
    for (const Cand& t : ts) {
        if (t.v > theta) break;
        tset.push_back(t.c);
    }
    std::sort(kset.begin(), kset.end(), vec_less);
    std::sort(tset.begin(), tset.end(), vec_less);

    IntegerSolution best;
    best.objective = kInf;
    bool have = false;
    for (const IntPair& k : kset) {
        if (have && vec_less(best.k, k)) break;
        for (const IntPair& t : tset) {
            if (!indep(k, t)) continue;
            if (!have || pair_less(k, t, best.k, best.t)) {
                best.k = k;
                best.t = t;
                have = true;
            }
            break;  // first independent t is the lex-min for this k
        }
    }
    best.objective = std::max(theta, floor_value);
    best.rate_bits = rate_from_objective(best.objective);
    best.node_count = long(ks.size() + ts.size());
    return best;
}

// ----- branch and bound -----

namespace {

struct BoxMin {
    double value;
    double arg0, arg1;
};

// exact minimum of the convex quadratic [a, b; b, d] over a rectangle
BoxMin box_quad_min(const Mat2& q, double lo0, double hi0, double lo1, double hi1) {
    double a = q.a00, b = 0.5 * (q.a01 + q.a10), d = q.a11;
    if (lo0 <= 0 && 0 <= hi0 && lo1 <= 0 && 0 <= hi1) return {0.0, 0.0, 0.0};

    auto eval = [&](double x, double y) { return a * x * x + 2 * b * x * y + d * y * y; };
    BoxMin best{kInf, 0, 0};
    auto consider = [&](double x, double y) {
        double v = eval(x, y);
        if (v < best.value) best = {v, x, y};
    };
    // edges x = const: minimize d y^2 + 2 b x y
    for (double x : {lo0, hi0}) {
        double y = (d > 0) ? std::clamp(-b * x / d, lo1, hi1) : (b * x > 0 ? lo1 : hi1);
        consider(x, std::clamp(y, lo1, hi1));
        consider(x, lo1);
        consider(x, hi1);
    }
    for (double y : {lo1, hi1}) {
        double x = (a > 0) ? std::clamp(-b * y / a, lo0, hi0) : (b * y > 0 ? lo0 : hi0);
        consider(std::clamp(x, lo0, hi0), y);
        consider(lo0, y);
        consider(hi0, y);
    }
    return best;
}

double interval_min_sq(double lo, double hi) {
    if (lo <= 0 && 0 <= hi) return 0;
    double m = std::min(std::abs(lo), std::abs(hi));
    return m * m;
}

void interval_mul(double alo, double ahi, double blo, double bhi, double& lo, double& hi) {
    double c1 = alo * blo, c2 = alo * bhi, c3 = ahi * blo, c4 = ahi * bhi;
    lo = std::min({c1, c2, c3, c4});
    hi = std::max({c1, c2, c3, c4});
}

// optional linear side constraint  l_const + coeff . (ta, tb, ka, kb) >= 1
struct LinearCut {
    bool active = false;
    double l_const = 0;
    std::array<double, 4> coeff{0, 0, 0, 0};
};

struct BnbSpec {
    Mat2 q_t, q_k;
    double floor_value;
    double b_t, b_k;
    DetSign det_sign;   // ignored when cut.active
    LinearCut cut;
};

struct BnbNode {
    std::array<int, 4> lo, hi;  // order: ta, tb, ka, kb
};

struct Incumbent {
    bool have = false;
    IntPair k{0, 0}, t{0, 0};
    double obj = kInf;
    bool det_ok = false;
};

bool leaf_feasible(const BnbSpec& s, IntPair t, IntPair k) {
    double nt = norm2(t), nk = norm2(k);
    if (nt < 1 || nt > s.b_t || nk < 1 || nk > s.b_k) return false;
    if (s.cut.active) {
        double l = s.cut.l_const + s.cut.coeff[0] * t[0] + s.cut.coeff[1] * t[1] +
                   s.cut.coeff[2] * k[0] + s.cut.coeff[3] * k[1];
        return l >= 1.0 - 1e-9;
    }
    long long d = det_int(k, t);
    switch (s.det_sign) {
        case DetSign::plus: return d >= 1;
        case DetSign::minus: return d <= -1;
        case DetSign::both: return d != 0;
    }
    return false;
}

void try_update(Incumbent& inc, const BnbSpec& s, IntPair t, IntPair k) {
    if (!leaf_feasible(s, t, k)) return;
    double obj = std::max({s.q_t.quad(t), s.q_k.quad(k), s.floor_value});
    // under the linear surrogate, prefer truly determinant-feasible ties
    bool det_ok = !s.cut.active || det_int(k, t) != 0;
    bool better = !inc.have || obj < inc.obj;
    if (!better && obj == inc.obj) {
        if (det_ok != inc.det_ok) better = det_ok;
        else better = pair_less(k, t, inc.k, inc.t);
    }
    if (better) inc = {true, k, t, obj, det_ok};
}

IntegerSolution bnb_run(const BnbSpec& s) {
    int rt = int(std::floor(std::sqrt(std::max(0.0, s.b_t))));
    int rk = int(std::floor(std::sqrt(std::max(0.0, s.b_k))));
    if (rt < 1 || rk < 1) throw InfeasibleSelection();

    Incumbent inc;
    try_update(inc, s, {0, 1}, {1, 0});
    try_update(inc, s, {1, 0}, {0, 1});

    std::vector<BnbNode> stack;
    stack.push_back({{-rt, -rt, -rk, -rk}, {rt, rt, rk, rk}});
    long nodes = 0;

    while (!stack.empty()) {
        BnbNode nd = stack.back();
        stack.pop_back();
        ++nodes;

        // ball pruning
        if (interval_min_sq(nd.lo[0], nd.hi[0]) + interval_min_sq(nd.lo[1], nd.hi[1]) > s.b_t)
            continue;
        if (interval_min_sq(nd.lo[2], nd.hi[2]) + interval_min_sq(nd.lo[3], nd.hi[3]) > s.b_k)
            continue;

        // constraint pruning
        if (s.cut.active) {
            double lmax = s.cut.l_const;
            for (int i = 0; i < 4; ++i)
                lmax += s.cut.coeff[i] > 0 ? s.cut.coeff[i] * nd.hi[i] : s.cut.coeff[i] * nd.lo[i];
            if (lmax < 1.0 - 1e-9) continue;
        } else {
            double p1lo, p1hi, p2lo, p2hi;  // det = ka*tb - kb*ta
            interval_mul(nd.lo[2], nd.hi[2], nd.lo[1], nd.hi[1], p1lo, p1hi);
            interval_mul(nd.lo[3], nd.hi[3], nd.lo[0], nd.hi[0], p2lo, p2hi);
            double dlo = p1lo - p2hi, dhi = p1hi - p2lo;
            bool can_plus = dhi >= 1, can_minus = dlo <= -1;
            if (s.det_sign == DetSign::plus && !can_plus) continue;
            if (s.det_sign == DetSign::minus && !can_minus) continue;
            if (s.det_sign == DetSign::both && !can_plus && !can_minus) continue;
        }

        BoxMin mt = box_quad_min(s.q_t, nd.lo[0], nd.hi[0], nd.lo[1], nd.hi[1]);
        BoxMin mk = box_quad_min(s.q_k, nd.lo[2], nd.hi[2], nd.lo[3], nd.hi[3]);
        double bound = std::max({mt.value, mk.value, s.floor_value});
        if (inc.have && bound >= inc.obj) continue;

        bool leaf = true;
        for (int i = 0; i < 4; ++i) leaf = leaf && nd.lo[i] == nd.hi[i];
        if (leaf) {
            try_update(inc, s, {nd.lo[0], nd.lo[1]}, {nd.lo[2], nd.lo[3]});
            continue;
        }

        // branch on the most fractional relaxed coordinate, widest box on ties
        double relax[4] = {mt.arg0, mt.arg1, mk.arg0, mk.arg1};
        int var = -1;
        double best_frac = -1;
        for (int i = 0; i < 4; ++i) {
            if (nd.lo[i] == nd.hi[i]) continue;
            double f = std::abs(relax[i] - std::round(relax[i]));
            if (f > best_frac + 1e-12) {
                best_frac = f;
                var = i;
            } else if (var >= 0 && std::abs(f - best_frac) <= 1e-12 &&
                       nd.hi[i] - nd.lo[i] > nd.hi[var] - nd.lo[var]) {
                var = i;
            }
        }
        double v = relax[var];
        int split = std::clamp(int(std::floor(v)), nd.lo[var], nd.hi[var] - 1);
        BnbNode left = nd, right = nd;
        left.hi[var] = split;
        right.lo[var] = split + 1;
        // explore the side holding the relaxed minimizer first
        if (v - split <= 0.5) {
            stack.push_back(right);
            stack.push_back(left);
        } else {
            stack.push_back(left);
            stack.push_back(right);
        }
    }

    if (!inc.have) throw InfeasibleSelection();
    IntegerSolution out;
    out.k = inc.k;
    out.t = inc.t;
    out.objective = inc.obj;
    out.rate_bits = rate_from_objective(out.objective);
    out.node_count = nodes;
    return out;
}

}  // namespace

IntegerSolution branch_and_bound_select(const MiqpProblem& problem) {
    BnbSpec s{problem.q_t, problem.q_k, problem.floor_value,
              problem.bounds.b_t, problem.bounds.b_k, problem.det_sign, {}};
    IntegerSolution sol = bnb_run(s);
    if (problem.det_sign == DetSign::both) canonicalize(sol);
    return sol;
}

// ----- determinant linearization loop -----

namespace {

LinearCut make_cut(Pair kappa, Pair tau, bool mirrored) {
    // det(k, t) linearized at (kappa, tau):
    //   k_a tau_b - k_b tau_a + kappa_a t_b - kappa_b t_a - det(kappa, tau)
    LinearCut cut;
    cut.active = true;
    double sgn = mirrored ? -1.0 : 1.0;
    cut.coeff = {sgn * -kappa[1], sgn * kappa[0], sgn * tau[1], sgn * -tau[0]};
    cut.l_const = sgn * -(kappa[0] * tau[1] - kappa[1] * tau[0]);
    return cut;
}

bool taylor_ok(int value, double anchor, bool prev_zero_matches) {
    if (value == 0) return prev_zero_matches;
    double x = double(value) / anchor - 1.0;
    double ex = std::exp(x);
    return std::abs(ex - (1.0 + x)) <= 0.05 * std::max(1.0, ex);
}

Pair anchors_from(IntPair v) {
    return {v[0] != 0 ? double(v[0]) : 1.0, v[1] != 0 ? double(v[1]) : 1.0};
}

}  // namespace

namespace {

struct ReducedBasis {
    IntPair b1, b2;  // b1 shortest, b2 shortest independent of b1
};

// Lagrange reduction: for 2x2 PSD forms the reduced basis attains both
// successive minima, so (b1, b2) are the best and best-independent vectors.
ReducedBasis reduced_basis(const Mat2& q) {
    auto quad = [&](long long a, long long b) { return q.quad(Pair{double(a), double(b)}); };
    auto bil = [&](long long a0, long long a1, long long b0, long long b1) {
        double sa01 = 0.5 * (q.a01 + q.a10);
        return q.a00 * double(a0) * b0 + sa01 * (double(a0) * b1 + double(a1) * b0) +
               q.a11 * double(a1) * b1;
    };
    long long u0 = 1, u1 = 0, v0 = 0, v1 = 1;
    if (quad(u0, u1) > quad(v0, v1)) {
        std::swap(u0, v0);
        std::swap(u1, v1);
    }
    for (int it = 0; it < 64; ++it) {
        double qu = quad(u0, u1);
        if (!(qu > 0)) break;
        double mu = std::round(bil(u0, u1, v0, v1) / qu);
        if (std::abs(mu) > 1e12) break;
        long long w0 = v0 - (long long)mu * u0;
        long long w1 = v1 - (long long)mu * u1;
        if (quad(w0, w1) < qu) {
            v0 = u0; v1 = u1;
            u0 = w0; u1 = w1;
        } else {
            v0 = w0; v1 = w1;
            break;
        }
    }
    auto to_pair = [](long long a, long long b) -> IntPair {
        if (std::abs(a) > (1ll << 30) || std::abs(b) > (1ll << 30)) return {1, 0};
        IntPair out{int(a), int(b)};
        if (out[0] < 0 || (out[0] == 0 && out[1] < 0)) out = {-out[0], -out[1]};
        return out;
    };
    IntPair b1 = to_pair(u0, u1);
    IntPair b2 = to_pair(v0, v1);
    if (b1[0] == 0 && b1[1] == 0) b1 = {1, 0};
    if ((b2[0] == 0 && b2[1] == 0) || !indep(b1, b2)) b2 = indep(b1, {1, 0}) ? IntPair{1, 0}
                                                                             : IntPair{0, 1};
    return {b1, b2};
}

}  // namespace

IntPair shortest_vector(const Mat2& q) { return reduced_basis(q).b1; }

IntegerSolution linearized_det_select(const MiqpProblem& problem,
                                      const LinearizationState& init) {
    ReducedBasis rk = reduced_basis(problem.q_k);
    ReducedBasis rt = reduced_basis(problem.q_t);

    std::vector<LinearizationState> anchors{init};
    LinearizationState reduced{anchors_from(rk.b1), anchors_from(rt.b1)};
    if (reduced.kappa != init.kappa || reduced.tau != init.tau) anchors.push_back(reduced);

    std::optional<IntegerSolution> best;
    long nodes = 0;

    // Incumbents from the reduced bases: for 2x2 forms the optimum is always a
    // combination of the per-form successive minima, so these seeds make the
    // loop's answer agree with the exhaustive oracle.
    auto seed = [&](IntPair k, IntPair t) {
        if (!indep(k, t)) return;
        if (norm2(k) > problem.bounds.b_k || norm2(t) > problem.bounds.b_t) return;
        IntegerSolution sol;
        sol.k = k;
        sol.t = t;
        sol.objective = std::max({problem.q_t.quad(t), problem.q_k.quad(k),
                                  problem.floor_value});
        if (!best || sol.objective < best->objective ||
            (sol.objective == best->objective && pair_less(sol.k, sol.t, best->k, best->t))) {
            best = sol;
        }
    };
    for (IntPair k : {rk.b1, rk.b2})
        for (IntPair t : {rt.b1, rt.b2}) seed(k, t);
    seed({1, 0}, {0, 1});
    seed({0, 1}, {1, 0});

    for (const LinearizationState& a0 : anchors) {
        for (bool mirrored : {false, true}) {
            Pair kappa = a0.kappa, tau = a0.tau;
            std::optional<IntegerSolution> prev;
            for (int iter = 0; iter < 20; ++iter) {
                BnbSpec s{problem.q_t, problem.q_k, problem.floor_value,
                          problem.bounds.b_t, problem.bounds.b_k, DetSign::both,
                          make_cut(kappa, tau, mirrored)};
                IntegerSolution sol;
                try {
                    sol = bnb_run(s);
                } catch (const InfeasibleSelection&) {
                    break;
                }
                nodes += sol.node_count;

                if (std::abs(det_int(sol.k, sol.t)) >= 1) {
                    if (!best || sol.objective < best->objective ||
                        (sol.objective == best->objective &&
                         pair_less(sol.k, sol.t, best->k, best->t))) {
                        best = sol;
                    }
                }

                bool stable = prev && prev->k == sol.k && prev->t == sol.t;
                bool taylor =
                    taylor_ok(sol.k[0], kappa[0], prev && prev->k[0] == 0) &&
                    taylor_ok(sol.k[1], kappa[1], prev && prev->k[1] == 0) &&
                    taylor_ok(sol.t[0], tau[0], prev && prev->t[0] == 0) &&
                    taylor_ok(sol.t[1], tau[1], prev && prev->t[1] == 0);
                if (stable || taylor) break;

                kappa = anchors_from(sol.k);
                tau = anchors_from(sol.t);
                prev = sol;
            }
        }
    }

    if (!best) {
        // canonical unit pairs always satisfy |det| = 1
        BnbSpec s{problem.q_t, problem.q_k, problem.floor_value,
                  problem.bounds.b_t, problem.bounds.b_k, DetSign::both, {}};
        Incumbent inc;
        try_update(inc, s, {0, 1}, {1, 0});
        try_update(inc, s, {1, 0}, {0, 1});
        if (!inc.have) throw InfeasibleSelection();
        IntegerSolution sol;
        sol.k = inc.k;
        sol.t = inc.t;
        sol.objective = inc.obj;
        sol.rate_bits = rate_from_objective(sol.objective);
        best = sol;
    }
    best->node_count = nodes;
    best->rate_bits = rate_from_objective(best->objective);
    canonicalize(*best);
    return *best;
}

// ----- problem assembly -----

MiqpProblem cof_integer_problem(const ChannelGains& ch, const PowerBudget& budget,
                                const BetaVector& beta) {
    double snr = budget.snr();
    Pair vd = hprod(beta.sources(), ch.to_dest());
    Pair vr = hprod(beta.sources(), ch.to_relay());
    MiqpProblem p;
    p.q_t = Mat2::identity() - Mat2::outer(vd).scaled(snr / (1.0 + snr * norm2(vd)));
    p.q_k = Mat2::identity() - Mat2::outer(vr).scaled(snr / (1.0 + snr * norm2(vr)));
    p.floor_value = 1.0 / (1.0 + snr * sq(ch.rd) * sq(beta.r));
    p.bounds = norm_bounds(ch, budget);
    return p;
}

MiqpProblem cod_integer_problem(const ChannelGains& ch, const PowerBudget& budget,
                                Pair beta_s) {
    EffectiveSystem sys = build_effective_system(ch, budget, beta_s);
    MiqpProblem p;
    p.q_t = equation_noise_form(sys);
    p.q_k = p.q_t;
    p.floor_value = 0.0;
    // Coupled bound: a positive rate needs c' Omega c < 1, and Omega dominates
    // ||c||^2 / (1 + snr (||b o h_d||^2 + ||b o h_r||^2)) on the beta box.
    double snr = budget.snr();
    double ca = sq(budget.cap_a()), cb = sq(budget.cap_b());
    double reach = ca * sq(ch.ad) + cb * sq(ch.bd) + ca * sq(ch.ar) + cb * sq(ch.br);
    double bound = 1.0 + snr * reach;
    p.bounds = {bound, bound};
    return p;
}

}  // namespace marc
