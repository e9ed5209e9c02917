#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "henon/errors.hpp"
#include "henon/henon_core.hpp"

using henon::Cycle;
using henon::Param;
using henon::Vec2;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::mt19937_64 rng(77130251u);

double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return u(rng);
}

}  // namespace

TEST_CASE("map and inverse round-trip") {
    Vec2 z = henon::apply(Param{2.0, 0.0}, Vec2{1.0, 1.0});
    CHECK(z.x == -1.0);
    CHECK(z.y == 1.0);

    for (int i = 0; i < 1000; ++i) {
        Param p{uniform(-2.0, 4.0), uniform(0.05, 1.0)};
        if (rng() & 1u) p.b = -p.b;
        Vec2 w{uniform(-3.0, 3.0), uniform(-3.0, 3.0)};
        Vec2 fw = henon::apply(p, w);
        Vec2 back = henon::apply_inverse(p, fw);
        CHECK(std::abs(back.x - w.x) < 1e-9 * (1.0 + std::abs(w.x)));
        CHECK(std::abs(back.y - w.y) < 1e-9 * (1.0 + std::abs(w.y)));
        Vec2 fwd = henon::apply(p, henon::apply_inverse(p, w));
        CHECK(std::abs(fwd.x - w.x) < 1e-9 * (1.0 + std::abs(w.x)));
        CHECK(std::abs(fwd.y - w.y) < 1e-9 * (1.0 + std::abs(w.y)));
    }

    CHECK_THROWS_AS(henon::apply_inverse(Param{2.0, 0.0}, Vec2{1.0, 1.0}),
                    henon::SingularParameter);
}

TEST_CASE("complex map agrees with the real one on the real slice") {
    for (int i = 0; i < 200; ++i) {
        Param p{uniform(-2.0, 4.0), uniform(-1.0, 1.0)};
        Vec2 w{uniform(-3.0, 3.0), uniform(-3.0, 3.0)};
        henon::CParam cp{{p.a, 0.0}, {p.b, 0.0}};
        henon::CVec2 cw{{w.x, 0.0}, {w.y, 0.0}};
        Vec2 fr = henon::apply(p, w);
        henon::CVec2 fc = henon::apply(cp, cw);
        CHECK(fc.x.real() == fr.x);
        CHECK(fc.x.imag() == 0.0);
        CHECK(fc.y.real() == fr.y);
    }
}

TEST_CASE("jacobian determinant equals b everywhere") {
    for (int i = 0; i < 1000; ++i) {
        Param p{uniform(-2.0, 4.0), uniform(-1.0, 1.0)};
        Vec2 w{uniform(-3.0, 3.0), uniform(-3.0, 3.0)};
        CHECK(henon::det(henon::jacobian(p, w)) ==
              doctest::Approx(p.b).epsilon(1e-13));
    }
}

TEST_CASE("fixed point eigenvalues at the full-horseshoe corner") {
    auto [fp, fq] = henon::fixed_points({2.0, 0.0});
    CHECK(fp.x == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(fq.x == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(fq.lambda_u - 4.0) < 1e-12);
    CHECK(std::abs(fp.lambda_u - (-2.0)) < 1e-12);
    CHECK(fq.lambda_s == doctest::Approx(0.0));
    CHECK(fp.lambda_s == doctest::Approx(0.0));
}

TEST_CASE("closed-form eigenvalues satisfy trace and determinant") {
    int checked = 0;
    while (checked < 1000) {
        Param p{uniform(0.5, 4.0), uniform(0.02, 0.95)};
        if (rng() & 1u) p.b = -p.b;
        double disc = (1.0 + p.b) * (1.0 + p.b) + 4.0 * p.a;
        if (disc <= 1e-3) continue;
        // Keep to the saddle regime: x^2 > b at both fixed points, so the
        // eigenvalues stay real.
        double xm = (1.0 + p.b - std::sqrt(disc)) / 2.0;
        if (xm * xm - p.b <= 1e-3) continue;
        auto [fp, fq] = henon::fixed_points(p);
        for (const auto& f : {fp, fq}) {
            CHECK(std::abs(f.lambda_u + f.lambda_s - 2.0 * f.x) <
                  1e-10 * (1.0 + std::abs(f.x)));
            CHECK(std::abs(f.lambda_u * f.lambda_s - p.b) < 1e-10);
            CHECK(std::abs(f.lambda_u) >= std::abs(f.lambda_s));
        }
        ++checked;
    }

    CHECK_THROWS_AS(henon::fixed_points({-2.0, 0.0}),
                    henon::ComplexFixedPoints);
}

TEST_CASE("matrix eigenvalues on hand-computed cases") {
    henon::Mat2 m{2.0, 1.0, 1.0, 1.0};
    auto [big, small] = henon::eigenvalues(m);
    double s5 = std::sqrt(5.0);
    CHECK(big.real() == doctest::Approx((3.0 + s5) / 2.0).epsilon(1e-14));
    CHECK(small.real() == doctest::Approx((3.0 - s5) / 2.0).epsilon(1e-14));
    CHECK(big.imag() == 0.0);

    henon::Mat2 rot{0.0, -1.0, 1.0, 0.0};
    auto [l1, l2] = henon::eigenvalues(rot);
    CHECK(std::abs(l1 - std::complex<double>(0.0, 1.0)) < 1e-14);
    CHECK(std::abs(l2 - std::complex<double>(0.0, -1.0)) < 1e-14);
}

TEST_CASE("degree-two cycles at the corner have log-2 expansion rate") {
    double x0 = (-1.0 + std::sqrt(5.0)) / 2.0;
    double x1 = (-1.0 - std::sqrt(5.0)) / 2.0;
    Cycle two = henon::find_cycle({2.0, 0.0}, 2, {x0, x1});
    CHECK(std::abs(two.multiplier_u - (-4.0)) < 1e-10);
    CHECK(std::abs(two.lyapunov - std::log(2.0)) < 1e-9);

    double tha = 2.0 * kPi / 9.0;
    Cycle three_a = henon::find_cycle(
        {2.0, 0.0}, 3, {2.0 * std::cos(tha), 2.0 * std::cos(4.0 * tha)});
    CHECK(std::abs(three_a.multiplier_u - (-8.0)) < 1e-9);
    CHECK(std::abs(three_a.lyapunov - std::log(2.0)) < 1e-9);

    double thb = 2.0 * kPi / 7.0;
    Cycle three_b = henon::find_cycle(
        {2.0, 0.0}, 3, {2.0 * std::cos(thb), 2.0 * std::cos(4.0 * thb)});
    CHECK(std::abs(three_b.multiplier_u - 8.0) < 1e-9);
    CHECK(std::abs(three_b.lyapunov - std::log(2.0)) < 1e-9);

    CHECK(three_a.points.size() == 3);
    for (const Vec2& z : three_a.points) {
        Vec2 w = henon::iterate_n({2.0, 0.0}, z, 3);
        CHECK(std::abs(w.x - z.x) < 1e-9);
        CHECK(std::abs(w.y - z.y) < 1e-9);
    }
}

TEST_CASE("cycle multiplier product matches the area contraction") {
    // Degree-two orbit points solve t^2 + (1+b)t + ((1+b)^2 - a) = 0.
    Param p{2.1, 0.3};
    double s = 1.0 + p.b;
    double d = std::sqrt(s * s - 4.0 * (s * s - p.a));
    double x0 = (-s + d) / 2.0;
    double x1 = (-s - d) / 2.0;
    Cycle two = henon::find_cycle(p, 2, {x0, x1});
    CHECK(std::abs(two.multiplier_u * two.multiplier_s - p.b * p.b) < 1e-10);
    CHECK(std::abs(two.points[0].x - x0) < 1e-9);
    CHECK(std::abs(two.points[0].y - x1) < 1e-9);
}

TEST_CASE("cycle solve rejects orbits that close early") {
    CHECK_THROWS_AS(henon::find_cycle({2.0, 0.0}, 2, {2.0, 2.0}),
                    henon::DegenerateCycle);
}
