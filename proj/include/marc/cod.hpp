#pragma once

#include "marc/channel.hpp"
#include "marc/mat2.hpp"

namespace marc {

// Compress-and-forward at the relay, compute both equations at the
// destination. The destination linearly combines its direct observation with
// the recovered (lossy) relay observation before each modulo reduction.

// G stacks the beta-scaled link rows; the combined observation has per-branch
// noise n_d = (1, 1 + D/N) and covariance N_d = diag(1/snr, 1/snr + D/P).
struct EffectiveSystem {
    Mat2 g;       // rows (beta_s o h_d)^T and (beta_s o h_r)^T
    Pair n_cov;   // diagonal of N_d
    Pair n_d;
    double d = 0; // Wyner-Ziv distortion, taken at the constraint equality
};

// beta_r is pinned at sqrt(P_r/P) inside this scheme; only beta_s is free.
EffectiveSystem build_effective_system(const ChannelGains& ch, const PowerBudget& budget,
                                       Pair beta_s);

// alpha* = (G G^T + N_d)^{-1} G c, the minimizer of the effective noise.
Pair mmse_combiner(const EffectiveSystem& sys, IntPair coeff);

// Effective-noise denominator snr ||G^T a - c||^2 + (a o a)^T n_d.
double combiner_objective(const EffectiveSystem& sys, double snr, IntPair coeff, Pair alpha);

// (1/4) log2+ ( snr / denominator ). Throws ZeroCoefficients on c = 0.
double cod_equation_rate(const EffectiveSystem& sys, double snr, IntPair coeff, Pair alpha);

// Quadratic form whose value at integer c equals the minimized denominator
// over alpha, divided by snr. Symmetric positive semi-definite.
Mat2 equation_noise_form(const EffectiveSystem& sys);

struct CodRateBreakdown {
    double r_t = 0;
    double r_k = 0;
    double rate = 0;
    Pair alpha_t{0, 0};
    Pair alpha_k{0, 0};
};

CodRateBreakdown cod_rate(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s,
                          IntPair k, IntPair t);

}  // namespace marc
