#pragma once

#include <functional>

#include "marc/channel.hpp"
#include "marc/gp.hpp"

namespace marc {

// Power allocation at fixed integer coefficients. The epigraph problems are
// complementary geometric programs: every constraint is a ratio of
// posynomials in the shifted variables delta_i = beta_i + c_i > 0. Successive
// convex approximation replaces each denominator with its best local monomial
// and solves the resulting GP until the delta step stalls.

struct RatioConstraint {
    gp::Posynomial num, den;  // num/den <= 1
};

struct PowerProblem {
    int n_vars = 0;
    gp::Posynomial objective;  // single monomial: the epigraph variable
    std::vector<RatioConstraint> ratios;
    std::vector<std::pair<double, double>> box;
    int epigraph_var = 0;
};

// Epigraph form of the three rate bottlenecks in (delta_a, delta_b, delta_r,
// epigraph). Shift constants must satisfy c_i > sqrt(P_i/P). Negative cross
// terms (products of channel gains and coefficients) are relocated across
// their constraint so both sides stay posynomials.
PowerProblem build_cof_power_problem(const ChannelGains& ch, const PowerBudget& budget,
                                     IntPair k, IntPair t, std::array<double, 3> shift);

// CoD counterpart at fixed combiners, in (delta_a, delta_b, D, epigraph); the
// Wyner-Ziv distortion enters as a variable bounded below by its constraint.
PowerProblem build_cod_power_problem(const ChannelGains& ch, const PowerBudget& budget,
                                     IntPair k, IntPair t, Pair alpha_t, Pair alpha_k,
                                     std::array<double, 2> shift);

// Lemma-style condensation: every ratio denominator replaced by its monomial
// approximation at the anchor, yielding a plain GP.
gp::GpProblem condense_at(const PowerProblem& p, std::span<const double> anchor);

// Exact epigraph values (the max of the raw constraint right-hand sides).
double cof_epigraph(const ChannelGains& ch, const PowerBudget& budget, const BetaVector& beta,
                    IntPair k, IntPair t);
double cod_epigraph(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s, IntPair k,
                    IntPair t, Pair alpha_t, Pair alpha_k);

struct ScaTraceRow {
    int iteration;
    double objective;
    double step_norm;
};
using TraceSink = std::function<void(const ScaTraceRow&)>;

inline std::array<double, 3> default_shift(const PowerBudget& budget) {
    return {1.1 * budget.cap_a(), 1.1 * budget.cap_b(), 1.1 * budget.cap_r()};
}

struct ScaCofResult {
    BetaVector beta;
    double objective = 0;  // exact epigraph at beta
    bool converged = false;
    double kkt_residual = 0;
    std::vector<ScaTraceRow> trace;
};

ScaCofResult sca_power_cof(const ChannelGains& ch, const PowerBudget& budget, IntPair k,
                           IntPair t, const BetaVector& beta0, const TraceSink& sink = {});

struct ScaCodResult {
    Pair beta_s{0, 0};
    Pair alpha_t{0, 0}, alpha_k{0, 0};
    double objective = 0;
    bool converged = false;
    double kkt_residual = 0;
    std::vector<ScaTraceRow> trace;  // iteration restarts at 1 for each inner run
};

ScaCodResult sca_power_cod(const ChannelGains& ch, const PowerBudget& budget, IntPair k,
                           IntPair t, Pair beta_s0, const TraceSink& sink = {});

}  // namespace marc
