#include "marc/cof.hpp"

namespace marc {

double mmse_inflation(Pair h_eff, double snr, IntPair coeff) {
    return snr * dot(h_eff, coeff) / (1.0 + snr * norm2(h_eff));
}

double inflation_noise_variance(Pair h_eff, double snr, IntPair coeff, double alpha) {
    return sq(alpha) + snr * (sq(alpha * h_eff[0] - coeff[0]) + sq(alpha * h_eff[1] - coeff[1]));
}

double equation_residual(Pair h_eff, double snr, IntPair coeff) {
    return norm2(coeff) - snr * sq(dot(h_eff, coeff)) / (1.0 + snr * norm2(h_eff));
}

double computation_rate(Pair h_eff, double snr, IntPair coeff) {
    if (coeff[0] == 0 && coeff[1] == 0) throw ZeroCoefficients();
    double q = equation_residual(h_eff, snr, coeff);
    if (q <= 0.0) {
        // impossible in exact arithmetic (q >= ||c||^2 / (1 + snr ||h||^2))
        numeric_clamp_count()++;
        return 0.0;
    }
    return 0.25 * log2_pos(1.0 / q);
}

double relay_forward_rate(double h_rd, double beta_r, double snr) {
    return 0.25 * std::log2(1.0 + snr * sq(h_rd) * sq(beta_r));
}

CofRateBreakdown cof_rate(const ChannelGains& ch, const PowerBudget& budget,
                          const BetaVector& beta, IntPair k, IntPair t) {
    if (std::abs(det_int(k, t)) < 1) throw SingularEquations();
    double snr = budget.snr();
    CofRateBreakdown out;
    out.r_sd = computation_rate(hprod(beta.sources(), ch.to_dest()), snr, t);
    out.r_sr = computation_rate(hprod(beta.sources(), ch.to_relay()), snr, k);
    out.r_rd = relay_forward_rate(ch.rd, beta.r, snr);
    out.rate = std::min({out.r_sd, out.r_sr, out.r_rd});
    return out;
}

}  // namespace marc
