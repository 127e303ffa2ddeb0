#pragma once

#include "marc/channel.hpp"
#include "marc/mat2.hpp"

namespace marc {

// Selection of the two integer equation vectors (k, t). Minimizes the worst
// equation-noise quadratic max(t'Q_t t, k'Q_k k, floor) over integer pairs
// with |det(k, t)| >= 1 inside the squared-norm balls; the symmetric rate is
// (1/4) log2+ of the inverse objective.

struct NormBounds {
    double b_k = 1;  // ||k||^2 <= b_k
    double b_t = 1;
};

// Squared-norm search bounds: outside them the allowed rate is zero.
NormBounds norm_bounds(const ChannelGains& ch, const PowerBudget& budget);

enum class DetSign { plus, minus, both };

struct MiqpProblem {
    Mat2 q_t, q_k;           // symmetric PSD equation-noise forms
    double floor_value = 0;  // relay bottleneck constant; 0 when absent
    NormBounds bounds;
    DetSign det_sign = DetSign::both;
};

struct IntegerSolution {
    IntPair k{0, 0}, t{0, 0};
    double objective = 0;
    double rate_bits = 0;
    long node_count = 0;  // search-size diagnostics
};

// Full enumeration over both norm balls. Ties are broken deterministically:
// signs canonicalized so the first nonzero entry of each vector is positive,
// then lexicographic on (|k_a|, |k_b|, |t_a|, |t_b|) and raw entries.
IntegerSolution exhaustive_select(const Mat2& q_t, const Mat2& q_k, double floor_value,
                                  NormBounds bounds);

// Depth-first branch and bound over the integer box, exact |det| handling at
// the leaves, per-node bound from box-constrained quadratic minima. Returns
// the same optimal objective as exhaustive_select.
IntegerSolution branch_and_bound_select(const MiqpProblem& problem);

struct LinearizationState {
    Pair kappa{1, 1}, tau{1, 1};  // expansion anchors, nonzero
};

// Determinant constraint replaced by its first-order linearization around
// (kappa, tau); both sign branches solved by branch and bound, anchors updated
// until the Taylor expansion is valid, best determinant-feasible solution
// returned.
IntegerSolution linearized_det_select(const MiqpProblem& problem,
                                      const LinearizationState& init = {});

// Assemble the selection problems at a fixed power allocation.
MiqpProblem cof_integer_problem(const ChannelGains& ch, const PowerBudget& budget,
                                const BetaVector& beta);
MiqpProblem cod_integer_problem(const ChannelGains& ch, const PowerBudget& budget,
                                Pair beta_s);

// Shortest nonzero integer vector of a PSD form (Lagrange reduction); used to
// seed linearization anchors.
IntPair shortest_vector(const Mat2& q);

}  // namespace marc
