#include "marc/channel.hpp"

#include <algorithm>

#include "marc/rng.hpp"

namespace marc {

std::atomic<long>& numeric_clamp_count() {
    static std::atomic<long> count{0};
    return count;
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::AF: return "AF";
        case Strategy::DF: return "DF";
        case Strategy::CF: return "CF";
        case Strategy::CoF: return "CoF";
        case Strategy::CoD: return "CoD";
        case Strategy::CoFExhaustive: return "CoF-exhaustive";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    for (Strategy s : {Strategy::AF, Strategy::DF, Strategy::CF, Strategy::CoF,
                       Strategy::CoD, Strategy::CoFExhaustive}) {
        if (name == strategy_name(s)) return s;
    }
    throw ConfigError("unknown strategy '" + name + "'");
}

double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

ChannelGains draw_channel(const ChannelVariances& variances, std::uint64_t seed) {
    SplitMix64 rng(seed);
    auto gain = [&](double var_dbw) {
        double z = rng.normal();  // always consume a draw to keep the stream aligned
        double var = std::isinf(var_dbw) && var_dbw < 0 ? 0.0 : db_to_linear(var_dbw);
        return std::sqrt(var) * z;
    };
    ChannelGains ch;
    ch.ar = gain(variances.ar);
    ch.br = gain(variances.br);
    ch.ad = gain(variances.ad);
    ch.bd = gain(variances.bd);
    ch.rd = gain(variances.rd);
    return ch;
}

BetaVector clamp_beta(BetaVector beta, const PowerBudget& budget) {
    auto clip = [](double x, double cap) { return std::clamp(x, -cap, cap); };
    return {clip(beta.a, budget.cap_a()), clip(beta.b, budget.cap_b()),
            clip(beta.r, budget.cap_r())};
}

bool beta_feasible(const BetaVector& beta, const PowerBudget& budget, double tol) {
    return std::abs(beta.a) <= budget.cap_a() + tol &&
           std::abs(beta.b) <= budget.cap_b() + tol &&
           std::abs(beta.r) <= budget.cap_r() + tol;
}

}  // namespace marc
