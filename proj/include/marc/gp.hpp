#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "marc/common.hpp"

namespace marc::gp {

// Positive-coefficient power-law term: coeff * prod_i x_i^exps[i].
struct Monomial {
    double coeff = 1.0;
    std::map<int, double> exps;

    double eval(std::span<const double> x) const;
};

// Sum of monomials; positive on the positive orthant.
struct Posynomial {
    std::vector<Monomial> terms;

    double eval(std::span<const double> x) const;
    Posynomial& operator+=(const Monomial& m) {
        terms.push_back(m);
        return *this;
    }
};

// minimize objective  s.t.  ineq_i <= 1, mono_eq_j == 1, lo <= x <= hi.
struct GpProblem {
    int n_vars = 0;
    Posynomial objective;
    std::vector<Posynomial> ineq;
    std::vector<Monomial> mono_eq;
    std::vector<std::pair<double, double>> box;  // one (lo, hi) per variable, 0 < lo <= hi
};

// Best local monomial approximation of g at a positive anchor (arithmetic-
// geometric mean condensation): matches value and log-gradient, lower-bounds
// g everywhere on the positive orthant.
Monomial monomial_approx(const Posynomial& g, std::span<const double> anchor);

// ----- exact log-space transcription -----

struct LseTerm {
    double log_coeff;
    std::vector<double> lin;  // exponent row
};

// f(y) = log sum_j exp(log_coeff_j + lin_j . y); convex, affine for one term.
struct LseFunction {
    std::vector<LseTerm> terms;
    double eval(std::span<const double> y) const;
};

struct AffineFunction {
    double constant = 0;
    std::vector<double> lin;
    double eval(std::span<const double> y) const;
};

struct ConvexGp {
    int n_vars = 0;
    LseFunction objective;
    std::vector<LseFunction> ineq;  // each <= 0; box constraints folded in
    std::vector<AffineFunction> eq; // each == 0
};

ConvexGp to_convex_form(const GpProblem& p);

// ----- interior-point solve -----

enum class GpStatus { converged, max_iterations };

struct GpResult {
    std::vector<double> x;
    double objective = 0;
    GpStatus status = GpStatus::converged;
    double kkt_residual = 0;     // stationarity (inf-norm) + complementarity of the log-space program
    int newton_steps = 0;
};

// Damped-Newton log-barrier method on the convex form; barrier weight driven
// from 1 down to 1e-9. Throws InfeasibleGp when no strictly feasible point
// exists. An optional start (positive, inside the box) skips phase I when it
// is already strictly feasible.
GpResult solve_gp(const GpProblem& p, const std::vector<double>* start = nullptr);

}  // namespace marc::gp
