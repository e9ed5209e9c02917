#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "henon/errors.hpp"

namespace henon {

/// Parameter point (a, b) of the map (x, y) -> (x^2 - a - b y, x).
struct Param {
    double a = 0.0;
    double b = 0.0;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

using Complex = std::complex<double>;

/// Complexified parameter point, used by the box-crossing checks.
struct CParam {
    Complex a;
    Complex b;
};

struct CVec2 {
    Complex x;
    Complex y;
};

/// 2x2 real matrix in row-major order.
struct Mat2 {
    double m00 = 0.0, m01 = 0.0;
    double m10 = 0.0, m11 = 0.0;
};

Mat2 operator*(const Mat2& a, const Mat2& b);
double det(const Mat2& m);

/// Eigenvalues of a 2x2 matrix, largest modulus first.
std::pair<Complex, Complex> eigenvalues(const Mat2& m);

enum class FixedPointKind { P, Q };

/// One of the two fixed points (x, x) together with its eigendata.
struct FixedPointData {
    FixedPointKind which = FixedPointKind::P;
    double x = 0.0;
    double lambda_u = 0.0;
    double lambda_s = 0.0;
};

/// Periodic orbit with the unstable multiplier of the composed differential.
struct Cycle {
    int period = 1;
    std::vector<Vec2> points;
    double multiplier_u = 0.0;
    double multiplier_s = 0.0;
    double lyapunov = 0.0;
};

Vec2 apply(Param p, Vec2 z);
Vec2 apply_inverse(Param p, Vec2 z);
CVec2 apply(const CParam& p, const CVec2& z);
CVec2 apply_inverse(const CParam& p, const CVec2& z);

/// n-fold composition; negative n applies the inverse.
Vec2 iterate_n(Param p, Vec2 z, int n);

/// Differential [[2x, -b], [1, 0]] at z.
Mat2 jacobian(Param p, Vec2 z);

/// P and Q from the closed forms, eigenvalues cross-checked against a
/// direct eigen-solve of the Jacobian.
std::pair<FixedPointData, FixedPointData> fixed_points(Param p);

/// Newton solve of f^k(z) = z from a seed, with residual damping.
Cycle find_cycle(Param p, int period, Vec2 seed);

/// Eigenvalues of the ordered Jacobian product along the cycle,
/// unstable (larger modulus) first.
std::pair<double, double> cycle_multipliers(Param p, const Cycle& c);

}  // namespace henon
