#include "marc/cod.hpp"

#include "marc/baselines.hpp"
#include "marc/cof.hpp"

namespace marc {

EffectiveSystem build_effective_system(const ChannelGains& ch, const PowerBudget& budget,
                                       Pair beta_s) {
    EffectiveSystem sys;
    sys.d = cf_distortion(ch, budget, beta_s);
    Pair vd = hprod(beta_s, ch.to_dest());
    Pair vr = hprod(beta_s, ch.to_relay());
    sys.g = {vd[0], vd[1], vr[0], vr[1]};
    double snr = budget.snr();
    sys.n_cov = {1.0 / snr, 1.0 / snr + sys.d / budget.p};
    sys.n_d = {1.0, 1.0 + sys.d / budget.n};
    return sys;
}

namespace {
Mat2 gram_plus_noise(const EffectiveSystem& sys) {
    Mat2 m = sys.g * sys.g.transpose();
    m.a00 += sys.n_cov[0];
    m.a11 += sys.n_cov[1];
    return m;
}
}  // namespace

Pair mmse_combiner(const EffectiveSystem& sys, IntPair coeff) {
    Pair gc = sys.g.mul({double(coeff[0]), double(coeff[1])});
    return gram_plus_noise(sys).inverse().mul(gc);
}

double combiner_objective(const EffectiveSystem& sys, double snr, IntPair coeff, Pair alpha) {
    Pair gta = sys.g.transpose().mul(alpha);
    double mismatch = sq(gta[0] - coeff[0]) + sq(gta[1] - coeff[1]);
    return snr * mismatch + sq(alpha[0]) * sys.n_d[0] + sq(alpha[1]) * sys.n_d[1];
}

double cod_equation_rate(const EffectiveSystem& sys, double snr, IntPair coeff, Pair alpha) {
    if (coeff[0] == 0 && coeff[1] == 0) throw ZeroCoefficients();
    double den = combiner_objective(sys, snr, coeff, alpha);
    if (den <= 0.0) {
        numeric_clamp_count()++;
        return 0.0;
    }
    return 0.25 * log2_pos(snr / den);
}

Mat2 equation_noise_form(const EffectiveSystem& sys) {
    Mat2 inv = gram_plus_noise(sys).inverse();
    Mat2 j = inv * sys.g;                                   // (GG^T + N_d)^{-1} G
    Mat2 m = sys.g.transpose() * j - Mat2::identity();      // G^T j - I
    Mat2 nd = {sys.n_cov[0], 0, 0, sys.n_cov[1]};
    return m.transpose() * m + j.transpose() * nd * j;
}

CodRateBreakdown cod_rate(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s,
                          IntPair k, IntPair t) {
    if (std::abs(det_int(k, t)) < 1) throw SingularEquations();
    EffectiveSystem sys = build_effective_system(ch, budget, beta_s);
    double snr = budget.snr();
    CodRateBreakdown out;
    out.alpha_t = mmse_combiner(sys, t);
    out.alpha_k = mmse_combiner(sys, k);
    out.r_t = cod_equation_rate(sys, snr, t, out.alpha_t);
    out.r_k = cod_equation_rate(sys, snr, k, out.alpha_k);
    out.rate = std::min(out.r_t, out.r_k);
    return out;
}

}  // namespace marc
