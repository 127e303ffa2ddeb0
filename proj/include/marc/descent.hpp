#pragma once

#include "marc/integer_select.hpp"
#include "marc/power_alloc.hpp"

namespace marc {

// Outer coordinate descent: alternate integer-coefficient selection at fixed
// beta with power allocation at fixed (k, t) until both the beta step and the
// rate change fall under the tolerances. Each half-step optimizes the same
// epigraph the rate inverts, so the rate trace is non-decreasing.

enum class IntegerSelector { linearized, branch_and_bound, exhaustive };

struct DescentOptions {
    double eps_beta = 1e-5;   // epsilon_1
    double eps_rate = 1e-5;   // epsilon_2, bits
    int max_outer = 50;
    IntegerSelector selector = IntegerSelector::linearized;
    TraceSink sink;           // forwarded to the inner SCA runs
};

struct DescentTraceRow {
    int iteration;
    double rate_bits;
    BetaVector beta;
};

struct DescentResult {
    Strategy strategy;
    BetaVector beta;
    IntPair k{0, 0}, t{0, 0};
    double rate_bits = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<DescentTraceRow> trace;
};

DescentResult cof_descent(const ChannelGains& ch, const PowerBudget& budget,
                          const BetaVector& beta0, const DescentOptions& opts = {});

// Throws ZeroRelayLink when h_rd = 0; beta_r is pinned at full relay power.
DescentResult cod_descent(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s0,
                          const DescentOptions& opts = {});

// Deterministic multistart wrappers (the power problems are non-convex); the
// first seed is the full box corner so an optimized run always dominates the
// unit-beta operating point when P_i = P.
std::vector<BetaVector> multistart_seeds(const PowerBudget& budget, int count);

DescentResult best_cof(const ChannelGains& ch, const PowerBudget& budget, int multistarts,
                       const DescentOptions& opts = {});
DescentResult best_cod(const ChannelGains& ch, const PowerBudget& budget, int multistarts,
                       const DescentOptions& opts = {});

}  // namespace marc
