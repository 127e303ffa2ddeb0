#pragma once

#include "marc/channel.hpp"

namespace marc {

// Compute-and-forward at the relay: the relay decodes one integer equation k
// of the two codewords and forwards it, the destination decodes equation t
// from the direct links. All three bottlenecks must carry the common rate.

struct CofRateBreakdown {
    double r_sd = 0;   // destination equation, coefficients t
    double r_sr = 0;   // relay equation, coefficients k
    double r_rd = 0;   // relay-to-destination forwarding
    double rate = 0;   // min of the three
};

// MMSE inflation factor applied before modulo reduction. h_eff carries the
// beta scaling already (h_eff = beta_s o h).
double mmse_inflation(Pair h_eff, double snr, IntPair coeff);

// Effective-noise power after inflating by alpha, normalized by N.
double inflation_noise_variance(Pair h_eff, double snr, IntPair coeff, double alpha);

// Residual quadratic that the computation rate inverts:
//   ||c||^2 - snr (h_eff . c)^2 / (1 + snr ||h_eff||^2)
double equation_residual(Pair h_eff, double snr, IntPair coeff);

// (1/4) log2+ of the inverse residual. Throws ZeroCoefficients on c = 0.
double computation_rate(Pair h_eff, double snr, IntPair coeff);

double relay_forward_rate(double h_rd, double beta_r, double snr);

// Throws SingularEquations unless |det(k, t)| >= 1.
CofRateBreakdown cof_rate(const ChannelGains& ch, const PowerBudget& budget,
                          const BetaVector& beta, IntPair k, IntPair t);

inline long long det_int(IntPair k, IntPair t) {
    return (long long)k[0] * t[1] - (long long)k[1] * t[0];
}

}  // namespace marc
