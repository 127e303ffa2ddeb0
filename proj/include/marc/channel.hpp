#pragma once

#include <cstdint>

#include "marc/common.hpp"

namespace marc {

// Real amplitude gains of the five links (may be negative).
struct ChannelGains {
    double ar = 0, br = 0;  // transmitters -> relay
    double ad = 0, bd = 0;  // transmitters -> destination
    double rd = 0;          // relay -> destination

    Pair to_relay() const { return {ar, br}; }
    Pair to_dest() const { return {ad, bd}; }
};

// Per-node power caps, the reference power P and the noise variance N, all in
// watts. snr = P/N is the linear-scale operating point.
struct PowerBudget {
    double pa = 1, pb = 1, pr = 1;
    double p = 1;
    double n = 1;

    double snr() const { return p / n; }
    double cap_a() const { return std::sqrt(pa / p); }
    double cap_b() const { return std::sqrt(pb / p); }
    double cap_r() const { return std::sqrt(pr / p); }
};

// Preprocessing scalars scaling the actual transmit powers: node i sends with
// power beta_i^2 * P. Feasible iff |beta_i| <= sqrt(P_i/P).
struct BetaVector {
    double a = 0, b = 0, r = 0;

    Pair sources() const { return {a, b}; }
};

// Variance of each zero-mean Gaussian link gain, in dBW. -inf kills a link.
struct ChannelVariances {
    double ar = 0, br = 0, ad = 0, bd = 0, rd = 0;
};

double db_to_linear(double x_db);

// Independent N(0, 10^(var/10)) draws for the five gains; a fixed seed gives a
// bit-identical result on every run.
ChannelGains draw_channel(const ChannelVariances& variances, std::uint64_t seed);

// Projection onto the feasible beta box. Idempotent.
BetaVector clamp_beta(BetaVector beta, const PowerBudget& budget);

bool beta_feasible(const BetaVector& beta, const PowerBudget& budget, double tol = 1e-12);

}  // namespace marc
