#include "henon/henon_core.hpp"

#include <cmath>
#include <sstream>

namespace henon {

namespace {

double norm_inf(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }

Vec2 iterate(Param p, Vec2 z, int k) {
    for (int i = 0; i < k; ++i) z = apply(p, z);
    return z;
}

// Product of Jacobians along the forward orbit of z, composed left to right.
Mat2 orbit_differential(Param p, Vec2 z, int k) {
    Mat2 m{1, 0, 0, 1};
    for (int i = 0; i < k; ++i) {
        m = jacobian(p, z) * m;
        z = apply(p, z);
    }
    return m;
}

}  // namespace

Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

double det(const Mat2& m) { return m.m00 * m.m11 - m.m01 * m.m10; }

std::pair<Complex, Complex> eigenvalues(const Mat2& m) {
    double tr = m.m00 + m.m11;
    double d = det(m);
    Complex disc = std::sqrt(Complex(tr * tr - 4.0 * d, 0.0));
    // Root extraction that avoids cancellation: take the root of larger
    // modulus from the quadratic formula, recover the other via the product.
    Complex big = (tr >= 0) ? (tr + disc) * 0.5 : (tr - disc) * 0.5;
    if (std::abs(big) == 0.0) return {Complex(0, 0), Complex(0, 0)};
    Complex small = Complex(d, 0.0) / big;
    if (std::abs(big) >= std::abs(small)) return {big, small};
    return {small, big};
}

Vec2 apply(Param p, Vec2 z) { return {z.x * z.x - p.a - p.b * z.y, z.x}; }

Vec2 apply_inverse(Param p, Vec2 z) {
    if (p.b == 0.0)
        throw SingularParameter("inverse map undefined at b = 0");
    return {z.y, (z.y * z.y - p.a - z.x) / p.b};
}

CVec2 apply(const CParam& p, const CVec2& z) {
    return {z.x * z.x - p.a - p.b * z.y, z.x};
}

Vec2 iterate_n(Param p, Vec2 z, int n) {
    for (int i = 0; i < n; ++i) z = apply(p, z);
    for (int i = 0; i > n; --i) z = apply_inverse(p, z);
    return z;
}

CVec2 apply_inverse(const CParam& p, const CVec2& z) {
    if (p.b == Complex(0.0))
        throw SingularParameter("inverse map undefined at b = 0");
    return {z.y, (z.y * z.y - p.a - z.x) / p.b};
}

Mat2 jacobian(Param p, Vec2 z) { return {2.0 * z.x, -p.b, 1.0, 0.0}; }

std::pair<FixedPointData, FixedPointData> fixed_points(Param p) {
    double one_b = 1.0 + p.b;
    double disc = one_b * one_b + 4.0 * p.a;
    if (disc < 0)
        throw ComplexFixedPoints("fixed points are complex: (1+b)^2 + 4a < 0");
    double root = std::sqrt(disc);
    double xp = 0.5 * (one_b - root);
    double xq = 0.5 * (one_b + root);

    auto eig_closed = [&](double x, bool plus) {
        double inner = one_b * x + p.a - p.b;  // equals x^2 - b at a fixed point
        if (inner < 0)
            throw EigenvalueDegenerate("fixed point eigenvalues are complex");
        double s = std::sqrt(inner);
        return plus ? x + s : x - s;
    };

    FixedPointData P{FixedPointKind::P, xp, eig_closed(xp, false),
                     eig_closed(xp, true)};
    FixedPointData Q{FixedPointKind::Q, xq, eig_closed(xq, true),
                     eig_closed(xq, false)};

    for (const FixedPointData* f : {&P, &Q}) {
        auto [e1, e2] = eigenvalues(jacobian(p, {f->x, f->x}));
        double scale = std::max(1.0, std::abs(f->lambda_u));
        if (std::abs(e1 - Complex(f->lambda_u)) / scale > 1e-10 ||
            std::abs(e2 - Complex(f->lambda_s)) / scale > 1e-10) {
            std::ostringstream msg;
            msg << "closed-form eigenvalues (" << f->lambda_u << ", "
                << f->lambda_s << ") disagree with the eigen-solve";
            throw EigenvalueDegenerate(msg.str());
        }
    }
    return {P, Q};
}

Cycle find_cycle(Param p, int period, Vec2 seed) {
    if (period < 1) throw DomainError("cycle period must be >= 1");
    Vec2 z = seed;
    const int max_iter = 100;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        Vec2 fz = iterate(p, z, period);
        Vec2 F{fz.x - z.x, fz.y - z.y};
        double res = norm_inf(F);
        if (res <= 1e-13) {
            converged = true;
            break;
        }
        Mat2 m = orbit_differential(p, z, period);
        Mat2 j{m.m00 - 1.0, m.m01, m.m10, m.m11 - 1.0};
        double dj = det(j);
        if (std::abs(dj) < 1e-300)
            throw NoConvergence("singular Newton system in cycle solve");
        Vec2 step{(j.m11 * F.x - j.m01 * F.y) / dj,
                  (-j.m10 * F.x + j.m00 * F.y) / dj};
        // Damp on residual increase: f^k is stiff for longer periods.
        double scale = 1.0;
        for (int back = 0; back < 30; ++back) {
            Vec2 trial{z.x - scale * step.x, z.y - scale * step.y};
            Vec2 ft = iterate(p, trial, period);
            if (norm_inf({ft.x - trial.x, ft.y - trial.y}) < res || scale < 1e-8) {
                z = trial;
                break;
            }
            scale *= 0.5;
        }
    }
    if (!converged) {
        Vec2 fz = iterate(p, z, period);
        if (norm_inf({fz.x - z.x, fz.y - z.y}) > 1e-12)
            throw NoConvergence("cycle Newton did not reach residual 1e-12");
    }

    // One undamped polish step pushes the residual to rounding level, which
    // downstream finite differences rely on.
    {
        Vec2 fz = iterate(p, z, period);
        Vec2 F{fz.x - z.x, fz.y - z.y};
        double res = norm_inf(F);
        Mat2 m = orbit_differential(p, z, period);
        Mat2 j{m.m00 - 1.0, m.m01, m.m10, m.m11 - 1.0};
        double dj = det(j);
        if (std::abs(dj) > 1e-300) {
            Vec2 trial{z.x - (j.m11 * F.x - j.m01 * F.y) / dj,
                       z.y - (-j.m10 * F.x + j.m00 * F.y) / dj};
            Vec2 ft = iterate(p, trial, period);
            if (norm_inf({ft.x - trial.x, ft.y - trial.y}) <= res) z = trial;
        }
    }

    for (int d = 1; d < period; ++d) {
        if (period % d != 0) continue;
        Vec2 fd = iterate(p, z, d);
        if (norm_inf({fd.x - z.x, fd.y - z.y}) < 1e-8) {
            std::ostringstream msg;
            msg << "orbit closes after " << d << " steps, not " << period;
            throw DegenerateCycle(msg.str());
        }
    }

    Cycle c;
    c.period = period;
    Vec2 w = z;
    for (int i = 0; i < period; ++i) {
        c.points.push_back(w);
        w = apply(p, w);
    }
    auto [mu, ms] = cycle_multipliers(p, c);
    c.multiplier_u = mu;
    c.multiplier_s = ms;
    c.lyapunov = std::log(std::abs(mu)) / period;
    return c;
}

std::pair<double, double> cycle_multipliers(Param p, const Cycle& c) {
    Mat2 m = orbit_differential(p, c.points.front(), c.period);
    auto [e1, e2] = eigenvalues(m);
    if (std::abs(e1.imag()) > 1e-9 * std::max(1.0, std::abs(e1)))
        throw EigenvalueDegenerate("cycle multipliers are not real");
    if (std::abs(std::abs(e1) - std::abs(e2)) <
        1e-12 * std::max(1.0, std::abs(e1)))
        throw EigenvalueDegenerate("cycle multiplier moduli tie");
    return {e1.real(), e2.real()};
}

}  // namespace henon
