#pragma once

#include <optional>

#include "marc/channel.hpp"

namespace marc {

// Classic relaying references: amplify-, decode- and compress-and-forward.
// All rates are symmetric rates in bits per channel use (log base 2), already
// carrying the half-duplex factor 1/4.

struct BaselineResult {
    Strategy strategy;
    BetaVector beta;
    double rate_bits = 0;
    std::optional<double> distortion;  // CF only
};

double af_rate(const ChannelGains& ch, const PowerBudget& budget, const BetaVector& beta);

double df_rate(const ChannelGains& ch, const PowerBudget& budget, const BetaVector& beta);

// Wyner-Ziv distortion of the relay observation when forwarded at full relay
// power. Throws ZeroRelayLink when h_rd = 0.
double cf_distortion(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s);

// Quantization rate of the relay observation at distortion d, with the
// destination's direct observation as decoder side information.
double wz_rate(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s, double d);

struct CfRate {
    double rate_bits = 0;
    double distortion = 0;
};

// CF evaluates the distortion constraint at equality (the rate decreases in D,
// so the smallest feasible D wins) with beta_r at full relay power.
CfRate cf_rate(const ChannelGains& ch, const PowerBudget& budget, Pair beta_s);

// Maximizes the chosen baseline over feasible beta: coarse grid over the
// non-negative orthant (the rates depend on beta only through squares and
// squared products) followed by simplex refinement from the best grid points.
BaselineResult optimize_baseline(Strategy strategy, const ChannelGains& ch,
                                 const PowerBudget& budget);

}  // namespace marc
