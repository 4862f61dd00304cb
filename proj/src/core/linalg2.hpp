#pragma once

#include "common.hpp"

#include <algorithm>
#include <array>

namespace nlsdist {

// 2x2 complex matrix, row-major [[a, b], [c, d]]
struct Mat2 {
    cplx a, b, c, d;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(cplx x, cplx y) { return {x, 0.0, 0.0, y}; }

    Mat2 adjoint() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }
    std::array<cplx, 2> operator*(const std::array<cplx, 2>& v) const
    {
        return {a * v[0] + b * v[1], c * v[0] + d * v[1]};
    }
    Mat2 operator*(const Mat2& o) const
    {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    // max-entry norm
    double max_abs() const { return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d))); }
};

using Vec2 = std::array<cplx, 2>;

inline double norm2(const Vec2& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

// exp(i * theta * H) for Hermitian H via H = a0 I + a . sigma
inline Mat2 expm_i_hermitian(const Mat2& H, double theta)
{
    const cplx I(0.0, 1.0);
    double a0 = 0.5 * (H.a.real() + H.d.real());
    double az = 0.5 * (H.a.real() - H.d.real());
    cplx off = 0.5 * (H.b + std::conj(H.c)); // = ax - i ay
    double ax = off.real(), ay = -off.imag();
    double r = std::sqrt(ax * ax + ay * ay + az * az);
    cplx ph = std::exp(I * theta * a0);
    double cs = std::cos(theta * r);
    cplx sn = r > 0.0 ? I * (std::sin(theta * r) / r) : cplx(0.0, 0.0);
    return {ph * (cs + sn * az), ph * sn * cplx(ax, -ay), ph * sn * cplx(ax, ay), ph * (cs - sn * az)};
}

} // namespace nlsdist
