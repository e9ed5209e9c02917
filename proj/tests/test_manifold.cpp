#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "henon/henon_core.hpp"
#include "henon/manifold.hpp"

using namespace henon;

namespace {

double point_segment_dist(Vec2 q, Vec2 a, Vec2 b) {
    double rx = b.x - a.x, ry = b.y - a.y;
    double rr = rx * rx + ry * ry;
    double t = (rr == 0.0)
                   ? 0.0
                   : ((q.x - a.x) * rx + (q.y - a.y) * ry) / rr;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(q.x - (a.x + t * rx), q.y - (a.y + t * ry));
}

double point_polyline_dist(Vec2 q, const std::vector<Vec2>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < pts.size(); ++i)
        best = std::min(best, point_segment_dist(q, pts[i - 1], pts[i]));
    return best;
}

double polyline_length(const std::vector<Vec2>& pts) {
    double s = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        s += std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
    return s;
}

// Invariance check: the mapped polyline must stay inside the tube of a
// longer curve grown from the same anchor.  The map stretches arclength,
// so the comparison curve is sized from the measured image length; a
// negative rate sends each branch to its mirror, so the comparison curve
// is then grown the other way.
void check_tube(Param p, Side side, double arclength) {
    auto [fp, fq] = fixed_points(p);
    double rate = (side == Side::Unstable) ? fq.lambda_u : 1.0 / fq.lambda_s;
    bool flips = rate < 0.0;

    GrowOptions opt;
    opt.arc_tolerance = 1e-4;
    for (int dir : {+1, -1}) {
        CAPTURE(p.a);
        CAPTURE(p.b);
        CAPTURE(dir);
        opt.direction = dir;
        ManifoldCurve base = grow_manifold(p, fq, side, arclength, opt);

        std::vector<Vec2> image(base.points.size());
        for (std::size_t i = 0; i < base.points.size(); ++i)
            image[i] = (side == Side::Unstable)
                           ? apply(p, base.points[i])
                           : apply_inverse(p, base.points[i]);

        GrowOptions eopt = opt;
        eopt.direction = flips ? -dir : dir;
        ManifoldCurve ext =
            grow_manifold(p, fq, side, 1.2 * polyline_length(image) + 1.0, eopt);

        std::size_t stride = std::max<std::size_t>(1, image.size() / 150);
        for (std::size_t i = 0; i < image.size(); i += stride) {
            CAPTURE(i);
            CHECK(point_polyline_dist(image[i], ext.points) <=
                  2.0 * opt.arc_tolerance);
        }
    }
}

}  // namespace

TEST_CASE("grown curve leaves the anchor along the eigenvector") {
    Param p{2.1, 0.02};
    auto [fp, fq] = fixed_points(p);
    for (Side side : {Side::Unstable, Side::Stable}) {
        double lambda = (side == Side::Unstable) ? fq.lambda_u : fq.lambda_s;
        ManifoldCurve c = grow_manifold(p, fq, side, 1.0, {});
        REQUIRE(c.points.size() >= 2);
        Vec2 a = c.points[0], b = c.points[1];
        double sx = b.x - a.x, sy = b.y - a.y;
        double nrm = std::hypot(sx, sy) * std::hypot(lambda, 1.0);
        double cross = std::abs(sx * 1.0 - sy * lambda) / nrm;
        CHECK(cross < 1e-6);
    }
}

TEST_CASE("mapped polyline stays in the tube of a longer curve") {
    check_tube(Param{2.1, 0.02}, Side::Unstable, 20.0);
    check_tube(Param{2.1, 0.02}, Side::Stable, 2.0);
}

TEST_CASE("tube invariance holds across the parameter range") {
    check_tube(Param{2.04, 0.02}, Side::Unstable, 20.0);
    check_tube(Param{3.4, 0.5}, Side::Unstable, 30.0);
    check_tube(Param{5.7, 1.0}, Side::Unstable, 40.0);
    check_tube(Param{3.6, -0.5}, Side::Stable, 8.0);
    check_tube(Param{6.2, -1.0}, Side::Stable, 8.0);
}

TEST_CASE("turning angles respect the bound and the curve leaves the box") {
    Param p{5.7, 1.0};
    auto [fp, fq] = fixed_points(p);
    GrowOptions opt;
    opt.arc_tolerance = 1e-4;
    opt.direction = -1;
    ManifoldCurve c = grow_manifold(p, fq, Side::Unstable, 40.0, opt);

    for (std::size_t i = 2; i < c.points.size(); ++i) {
        double ux = c.points[i - 1].x - c.points[i - 2].x;
        double uy = c.points[i - 1].y - c.points[i - 2].y;
        double vx = c.points[i].x - c.points[i - 1].x;
        double vy = c.points[i].y - c.points[i - 1].y;
        double nu = std::hypot(ux, uy), nv = std::hypot(vx, vy);
        if (nu == 0.0 || nv == 0.0) continue;
        double c0 = std::clamp((ux * vx + uy * vy) / (nu * nv), -1.0, 1.0);
        REQUIRE(std::acos(c0) <= 0.2 + 1e-12);
    }

    bool exits = std::any_of(c.points.begin(), c.points.end(),
                             [](Vec2 z) { return std::abs(z.x) > 4.0; });
    CHECK(exits);

    int reversals = 0;
    int last = 0;
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        double dx = c.points[i].x - c.points[i - 1].x;
        if (dx == 0.0) continue;
        int s = (dx > 0.0) ? 1 : -1;
        if (last != 0 && s != last) ++reversals;
        last = s;
    }
    CHECK(reversals >= 1);
}

TEST_CASE("degenerate anchors are rejected") {
    Param p{2.1, 0.02};
    auto [fp, fq] = fixed_points(p);

    FixedPointData bad = fq;
    bad.lambda_u = 0.5;
    CHECK_THROWS_AS(grow_manifold(p, bad, Side::Unstable, 1.0, {}),
                    EigenvalueDegenerate);

    Param frozen{2.1, 0.0};
    auto [fp0, fq0] = fixed_points(frozen);
    CHECK_THROWS_AS(grow_manifold(frozen, fq0, Side::Stable, 1.0, {}),
                    SingularParameter);

    GrowOptions tight;
    tight.max_points = 500;
    CHECK_THROWS_AS(grow_manifold(p, fq, Side::Unstable, 20.0, tight),
                    ExcessiveGrowth);
}

TEST_CASE("crossing counts on hand-built polylines") {
    ManifoldCurve u, s;
    Window w{-1.0, 1.0, -1.0, 1.0};

    SUBCASE("perpendicular segments cross once") {
        u.points = {Vec2{-0.5, 0.0}, Vec2{0.5, 0.0}};
        s.points = {Vec2{0.0, -0.5}, Vec2{0.0, 0.5}};
        IntersectionResult r = intersection_count(u, s, w);
        CHECK(r.count == 1);
        REQUIRE(r.points.size() == 1);
        CHECK(std::abs(r.points[0].x) < 1e-15);
        CHECK(std::abs(r.points[0].y) < 1e-15);
    }

    SUBCASE("disjoint segments do not cross") {
        u.points = {Vec2{-0.5, 0.2}, Vec2{0.5, 0.2}};
        s.points = {Vec2{-0.5, -0.2}, Vec2{0.5, -0.2}};
        CHECK(intersection_count(u, s, w).count == 0);
    }

    SUBCASE("touching at an endpoint is not transverse") {
        u.points = {Vec2{-0.5, 0.0}, Vec2{0.0, 0.0}};
        s.points = {Vec2{0.0, -0.5}, Vec2{0.0, 0.5}};
        CHECK(intersection_count(u, s, w).count == 0);
    }

    SUBCASE("fold against a crossbar gives two crossings") {
        for (double t = -1.0; t <= 1.0 + 1e-12; t += 0.05)
            u.points.push_back(Vec2{t, t * t});
        s.points = {Vec2{-1.0, 0.5}, Vec2{1.0, 0.5}};
        CHECK(intersection_count(u, s, w).count == 2);
    }

    SUBCASE("crossings outside the window are not counted") {
        u.points = {Vec2{-0.5, 2.0}, Vec2{0.5, 2.0}};
        s.points = {Vec2{0.0, 1.5}, Vec2{0.0, 2.5}};
        CHECK(intersection_count(u, s, w).count == 0);
    }

    SUBCASE("nearby crossings merge") {
        u.points = {Vec2{-0.5, 0.0}, Vec2{0.5, 1e-12}, Vec2{-0.5, 2e-12}};
        s.points = {Vec2{0.0, -0.5}, Vec2{0.0, 0.5}};
        CHECK(intersection_count(u, s, w).count == 1);
    }

    SUBCASE("an empty polyline is rejected") {
        u.points = {Vec2{-0.5, 0.0}, Vec2{0.5, 0.0}};
        CHECK_THROWS_AS(intersection_count(u, s, w), EmptyInput);
    }
}

TEST_CASE("cycle-anchored curve satisfies the tube invariant") {
    Param p{2.1, -0.1};
    double disc = std::sqrt((1.0 + p.b) * (1.0 + p.b) -
                            4.0 * ((1.0 + p.b) * (1.0 + p.b) - p.a));
    double x0 = 0.5 * (-(1.0 + p.b) + disc);
    double x1 = 0.5 * (-(1.0 + p.b) - disc);
    Cycle two = find_cycle(p, 2, Vec2{x0, x1});
    bool flips = two.multiplier_u < 0.0;

    GrowOptions opt;
    opt.arc_tolerance = 1e-4;
    for (int dir : {+1, -1}) {
        CAPTURE(dir);
        opt.direction = dir;
        ManifoldCurve base = grow_manifold(p, two, Side::Unstable, 8.0, opt);

        std::vector<Vec2> image(base.points.size());
        for (std::size_t i = 0; i < base.points.size(); ++i)
            image[i] = apply(p, apply(p, base.points[i]));

        GrowOptions eopt = opt;
        eopt.direction = flips ? -dir : dir;
        ManifoldCurve ext = grow_manifold(
            p, two, Side::Unstable, 1.2 * polyline_length(image) + 1.0, eopt);

        std::size_t stride = std::max<std::size_t>(1, image.size() / 150);
        for (std::size_t i = 0; i < image.size(); i += stride) {
            CAPTURE(i);
            CHECK(point_polyline_dist(image[i], ext.points) <=
                  2.0 * opt.arc_tolerance);
        }
    }
}
