#pragma once

#include <cmath>

#include "marc/common.hpp"

namespace marc {

// Minimal 2x2 real matrix. Everything the rate formulas need fits in explicit
// adjugate/determinant algebra, so no linear-algebra dependency is pulled in.
struct Mat2 {
    double a00 = 0, a01 = 0, a10 = 0, a11 = 0;

    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 zero() { return {}; }

    Mat2 transpose() const { return {a00, a10, a01, a11}; }
    double det() const { return a00 * a11 - a01 * a10; }
    double trace() const { return a00 + a11; }

    Mat2 operator+(const Mat2& o) const { return {a00 + o.a00, a01 + o.a01, a10 + o.a10, a11 + o.a11}; }
    Mat2 operator-(const Mat2& o) const { return {a00 - o.a00, a01 - o.a01, a10 - o.a10, a11 - o.a11}; }
    Mat2 operator*(const Mat2& o) const {
        return {a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11,
                a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
    }
    Mat2 scaled(double s) const { return {s * a00, s * a01, s * a10, s * a11}; }

    Pair mul(Pair v) const { return {a00 * v[0] + a01 * v[1], a10 * v[0] + a11 * v[1]}; }

    Mat2 inverse() const {
        double d = det();
        return {a11 / d, -a01 / d, -a10 / d, a00 / d};
    }

    double quad(Pair v) const {
        return v[0] * (a00 * v[0] + a01 * v[1]) + v[1] * (a10 * v[0] + a11 * v[1]);
    }
    double quad(IntPair v) const { return quad(Pair{double(v[0]), double(v[1])}); }

    // smaller eigenvalue, assuming the matrix is symmetric
    double eig_min() const {
        double tr = trace();
        double disc = std::sqrt(std::max(0.0, sq(a00 - a11) + 4.0 * a01 * a10));
        return 0.5 * (tr - disc);
    }

    static Mat2 outer(Pair v) { return {v[0] * v[0], v[0] * v[1], v[1] * v[0], v[1] * v[1]}; }
};

}  // namespace marc
