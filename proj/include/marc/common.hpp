#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

namespace marc {

using Pair = std::array<double, 2>;
using IntPair = std::array<int, 2>;

enum class Strategy { AF, DF, CF, CoF, CoD, CoFExhaustive };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// ----- errors -----

struct ZeroRelayLink : std::runtime_error {
    ZeroRelayLink() : std::runtime_error("relay-to-destination gain is zero") {}
};
struct NonpositiveDistortion : std::runtime_error {
    NonpositiveDistortion() : std::runtime_error("distortion must be > 0") {}
};
struct SingularEquations : std::runtime_error {
    SingularEquations() : std::runtime_error("|det(k, t)| must be >= 1") {}
};
struct ZeroCoefficients : std::runtime_error {
    ZeroCoefficients() : std::runtime_error("equation coefficients are all zero") {}
};
struct InfeasibleSelection : std::runtime_error {
    InfeasibleSelection() : std::runtime_error("no determinant-feasible integer pair in bounds") {}
};
struct InfeasibleGp : std::runtime_error {
    explicit InfeasibleGp(const std::string& what) : std::runtime_error(what) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ----- small numeric helpers -----

inline double sq(double x) { return x * x; }

inline double dot(Pair a, Pair b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(Pair a) { return dot(a, a); }
inline Pair hprod(Pair a, Pair b) { return {a[0] * b[0], a[1] * b[1]}; }

inline double dot(Pair a, IntPair b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(IntPair a) { return double(a[0]) * a[0] + double(a[1]) * a[1]; }

// log2 floored at zero; rates use this so that dead links report 0 bits.
inline double log2_pos(double x) { return x > 1.0 ? std::log2(x) : 0.0; }

// Counts the (theoretically impossible) cancellation events where a rate
// denominator comes out nonpositive and the rate is clamped to zero.
std::atomic<long>& numeric_clamp_count();

}  // namespace marc
