#include "marc/descent.hpp"

#include <algorithm>

#include "marc/cod.hpp"
#include "marc/cof.hpp"

namespace marc {

namespace {

IntegerSolution run_selector(const MiqpProblem& prob, IntegerSelector sel) {
    switch (sel) {
        case IntegerSelector::linearized: return linearized_det_select(prob);
        case IntegerSelector::branch_and_bound: return branch_and_bound_select(prob);
        case IntegerSelector::exhaustive:
            return exhaustive_select(prob.q_t, prob.q_k, prob.floor_value, prob.bounds);
    }
    throw std::logic_error("bad selector");
}

}  // namespace

DescentResult cof_descent(const ChannelGains& ch, const PowerBudget& budget,
                          const BetaVector& beta0, const DescentOptions& opts) {
    DescentResult out;
    out.strategy = Strategy::CoF;
    BetaVector beta = clamp_beta(beta0, budget);
    double rate_prev = -1.0;

    for (int iter = 1; iter <= opts.max_outer; ++iter) {
        out.iterations = iter;
        IntegerSolution sel = run_selector(cof_integer_problem(ch, budget, beta), opts.selector);

        ScaCofResult sca = sca_power_cof(ch, budget, sel.k, sel.t, beta, opts.sink);
        BetaVector beta_new = sca.beta;
        double rate_new = cof_rate(ch, budget, beta_new, sel.k, sel.t).rate;

        if (iter > 1 && rate_new + 1e-12 < rate_prev) {
            out.converged = true;  // numerically stalled; keep the incumbent
            break;
        }
        out.k = sel.k;
        out.t = sel.t;
        double step = std::sqrt(sq(beta_new.a - beta.a) + sq(beta_new.b - beta.b) +
                                sq(beta_new.r - beta.r));
        beta = beta_new;
        out.beta = beta;
        out.rate_bits = rate_new;
        out.trace.push_back({iter, rate_new, beta});

        bool rate_ok = iter == 1 || std::abs(rate_new - rate_prev) <= opts.eps_rate;
        rate_prev = rate_new;
        if (step <= opts.eps_beta && rate_ok) {
            out.converged = true;
            break;
        }
    }
    return out;
}

DescentResult cod_descent(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s0,
                          const DescentOptions& opts) {
    if (ch.rd == 0.0) throw ZeroRelayLink();
    DescentResult out;
    out.strategy = Strategy::CoD;
    BetaVector clamped = clamp_beta({beta_s0[0], beta_s0[1], budget.cap_r()}, budget);
    Pair beta_s{clamped.a, clamped.b};
    double rate_prev = -1.0;

    for (int iter = 1; iter <= opts.max_outer; ++iter) {
        out.iterations = iter;
        IntegerSolution sel = run_selector(cod_integer_problem(ch, budget, beta_s), opts.selector);

        ScaCodResult sca = sca_power_cod(ch, budget, sel.k, sel.t, beta_s, opts.sink);
        Pair bs_new = sca.beta_s;
        double rate_new = cod_rate(ch, budget, bs_new, sel.k, sel.t).rate;

        if (iter > 1 && rate_new + 1e-12 < rate_prev) {
            out.converged = true;
            break;
        }
        out.k = sel.k;
        out.t = sel.t;
        double step = std::sqrt(sq(bs_new[0] - beta_s[0]) + sq(bs_new[1] - beta_s[1]));
        beta_s = bs_new;
        out.beta = {beta_s[0], beta_s[1], budget.cap_r()};
        out.rate_bits = rate_new;
        out.trace.push_back({iter, rate_new, out.beta});

        bool rate_ok = iter == 1 || std::abs(rate_new - rate_prev) <= opts.eps_rate;
        rate_prev = rate_new;
        if (step <= opts.eps_beta && rate_ok) {
            out.converged = true;
            break;
        }
    }
    return out;
}

std::vector<BetaVector> multistart_seeds(const PowerBudget& budget, int count) {
    double ca = budget.cap_a(), cb = budget.cap_b(), cr = budget.cap_r();
    std::vector<BetaVector> all{
        {ca, cb, cr},
        {0.9 * ca, 0.9 * cb, 0.9 * cr},
        {0.6 * ca, 0.6 * cb, 0.6 * cr},
        {0.3 * ca, 0.3 * cb, 0.3 * cr},
        {1.0 * ca, 0.5 * cb, 0.75 * cr},
        {0.5 * ca, 1.0 * cb, 0.75 * cr},
        {0.75 * ca, 0.25 * cb, 1.0 * cr},
        {0.25 * ca, 0.75 * cb, 1.0 * cr},
    };
    count = std::clamp(count, 1, int(all.size()));
    return {all.begin(), all.begin() + count};
}

namespace {

template <typename Run>
DescentResult best_of(const PowerBudget& budget, int multistarts, const Run& run) {
    DescentResult best;
    bool have = false;
    for (const BetaVector& seed : multistart_seeds(budget, multistarts)) {
        DescentResult r = run(seed);
        if (!have || r.rate_bits > best.rate_bits) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

}  // namespace

DescentResult best_cof(const ChannelGains& ch, const PowerBudget& budget, int multistarts,
                       const DescentOptions& opts) {
    return best_of(budget, multistarts,
                   [&](const BetaVector& s) { return cof_descent(ch, budget, s, opts); });
}

DescentResult best_cod(const ChannelGains& ch, const PowerBudget& budget, int multistarts,
                       const DescentOptions& opts) {
    return best_of(budget, multistarts, [&](const BetaVector& s) {
        return cod_descent(ch, budget, {s.a, s.b}, opts);
    });
}

}  // namespace marc
