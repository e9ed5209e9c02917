#include "henon/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace henon {

namespace {

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// The curve is parametrized through the linearization at the anchor: pull the
// eigencoordinate back into a small seed zone, then push the point forward
// with the map the curve is invariant under.  Points near the anchor are
// carried as offsets from a stored base orbit rather than absolute
// coordinates; absolute seeds would be quantized at one ulp of the anchor,
// and the pushforward amplifies that quantum above any useful sag tolerance.
struct GrowContext {
    Param p;
    bool forward = true;
    int reps = 1;
    std::vector<Vec2> base;   // anchor orbit under the substep map, reps+1 points
    std::vector<Vec2> resid;  // rounding residual of each substep along the orbit
    Vec2 closure{0.0, 0.0};   // base[reps] - base[0]
    std::function<double(Vec2)> lip;
    Vec2 anchor{0.0, 0.0};
    Vec2 dir{0.0, 0.0};
    double mult = 0.0;
};

constexpr double kSeedZone = 1e-9;

Vec2 substep(const GrowContext& g, int i, Vec2 d) {
    Vec2 z = g.base[i];
    Vec2 r = g.resid[i];
    if (g.forward)
        return {(2.0 * z.x + d.x) * d.x - g.p.b * d.y + r.x, d.x + r.y};
    return {d.y + r.x, ((2.0 * z.y + d.y) * d.y - d.x) / g.p.b + r.y};
}

Vec2 curve_point(const GrowContext& g, double t) {
    int k = 0;
    double s = t;
    while (std::abs(s) > kSeedZone && k < 600) {
        s /= g.mult;
        ++k;
    }
    Vec2 d{s * g.dir.x, s * g.dir.y};
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < g.reps; ++i) d = substep(g, i, d);
        d = {d.x + g.closure.x, d.y + g.closure.y};
    }
    return {g.base[0].x + d.x, g.base[0].y + d.y};
}

ManifoldCurve grow(const GrowContext& g, Param p, Side side, double arclength,
                   const GrowOptions& opt) {
    ManifoldCurve curve;
    curve.p = p;
    curve.side = side;
    curve.arc_tolerance = opt.arc_tolerance;

    double t = 1e-7;
    double dt = t * 0.25;
    int blind_run = 0;
    curve.points.push_back(g.anchor);
    curve.points.push_back(curve_point(g, t));
    double grown = dist(curve.points[0], curve.points[1]);

    while (grown < arclength) {
        if (curve.points.size() > opt.max_points)
            throw ExcessiveGrowth("manifold polyline exceeded point cap");
        // Relative step cap keeps the parametrization speed roughly
        // constant across a segment, so the midpoint sag test is honest.
        double step = std::min(dt, 0.5 * t);
        double tn = t + step;
        Vec2 prev = curve.points[curve.points.size() - 2];
        Vec2 cur = curve.points.back();
        Vec2 next = curve_point(g, tn);
        Vec2 mid = curve_point(g, 0.5 * (t + tn));
        double nm = std::hypot(mid.x - cur.x, mid.y - cur.y);

        double allowed =
            0.5 * opt.arc_tolerance / std::max(1.0, g.lip(cur));
        double dev = std::hypot(mid.x - 0.5 * (cur.x + next.x),
                                mid.y - 0.5 * (cur.y + next.y));

        double ux = cur.x - prev.x, uy = cur.y - prev.y;
        double vx = next.x - cur.x, vy = next.y - cur.y;
        double nu = std::hypot(ux, uy), nv = std::hypot(vx, vy);
        double cosang = (nu > 0.0 && nv > 0.0)
                            ? (ux * vx + uy * vy) / (nu * nv)
                            : 1.0;
        double turn = std::acos(std::min(1.0, std::max(-1.0, cosang)));

        // Deep folds pinch the parametrization: the speed can drop below the
        // evaluation noise over a whole t-window, where the sag and turn
        // tests see only roundoff.  Sub-noise motion slides the tip along
        // without recording a new point; the zone crossed this way is
        // smaller than any tolerance in play.  Consecutive slides ramp the
        // step geometrically, since walking a pinched window at constant
        // step costs one iteration per noise ball.  The midpoint check
        // keeps a ramped step from skipping a resolvable excursion that
        // happens to land back near the tip.
        double noise = (std::abs(cur.x) + std::abs(cur.y) + 10.0) * 1e-13;
        bool blind = ((nv < 3.0 * noise && nm < 3.0 * noise) ||
                      step <= t * 1e-12) &&
                     std::isfinite(nv) && std::isfinite(nm);
        if (blind) {
            curve.points.back() = next;
            t = tn;
            blind_run = std::min(blind_run + 1, 40);
            dt = step * std::ldexp(4.0, blind_run);
            continue;
        }
        blind_run = 0;
        // Strong contraction can pinch a fold so tight that its two arms
        // are closer than the evaluation noise: the chord then reverses
        // at full speed with no measurable sag.  Recording the reversal
        // vertex keeps the polyline faithful, and the following chords
        // run backward along the arm and pass the turn test again.
        bool reversal =
            turn > opt.max_turn && dev <= allowed && nv <= 1e3 * noise;
        if (!std::isfinite(dev) || dev > allowed ||
            (turn > opt.max_turn && !reversal)) {
            dt = step * 0.5;
            continue;
        }
        curve.points.push_back(next);
        grown += nv;
        t = tn;
        dt = step * 1.3;
    }
    return curve;
}

Vec2 image_residual(Param p, bool forward, Vec2 z, Vec2 znext) {
    long double a = p.a, b = p.b;
    long double ix, iy;
    if (forward) {
        ix = (long double)z.x * z.x - a - b * z.y;
        iy = z.x;
    } else {
        ix = z.y;
        iy = ((long double)z.y * z.y - a - z.x) / b;
    }
    return {static_cast<double>(ix - (long double)znext.x),
            static_cast<double>(iy - (long double)znext.y)};
}

GrowContext context_for(Param p, Vec2 anchor, Vec2 dir, double lambda,
                        int period, Side side, int direction) {
    GrowContext g;
    g.p = p;
    g.anchor = anchor;
    double nrm = std::hypot(dir.x, dir.y);
    g.dir = {direction * dir.x / nrm, direction * dir.y / nrm};

    double m;
    if (side == Side::Unstable) {
        if (std::abs(lambda) <= 1.0)
            throw EigenvalueDegenerate("unstable rate is not expanding");
        g.forward = true;
        m = lambda;
    } else {
        if (p.b == 0.0)
            throw SingularParameter("stable side needs an invertible map");
        if (lambda == 0.0 || std::abs(lambda) >= 1.0)
            throw EigenvalueDegenerate("stable rate is not contracting");
        g.forward = false;
        m = 1.0 / lambda;
    }
    g.reps = (m < 0.0) ? 2 * period : period;
    g.mult = (m < 0.0) ? m * m : m;

    g.base.resize(g.reps + 1);
    g.resid.resize(g.reps);
    g.base[0] = anchor;
    for (int i = 0; i < g.reps; ++i) {
        Vec2 z = g.base[i];
        g.base[i + 1] = g.forward ? apply(p, z) : apply_inverse(p, z);
        g.resid[i] = image_residual(p, g.forward, z, g.base[i + 1]);
    }
    g.closure = {g.base[g.reps].x - g.base[0].x,
                 g.base[g.reps].y - g.base[0].y};

    // The tube allowance divides by the stretch of one application of
    // the map the invariant tests with, f^period or its inverse, not of
    // the doubled composition used to keep the parametrization rate
    // positive.
    bool forward = g.forward;
    g.lip = [p, forward, period](Vec2 z) {
        double prod = 1.0;
        for (int i = 0; i < period; ++i) {
            if (forward) {
                prod *= 2.0 * std::abs(z.x) + std::abs(p.b) + 1.0;
                z = apply(p, z);
            } else {
                prod *= (2.0 * std::abs(z.y) + 2.0) / std::abs(p.b);
                z = apply_inverse(p, z);
            }
        }
        return prod;
    };
    return g;
}

}  // namespace

double ManifoldCurve::arclength() const {
    double s = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        s += dist(points[i - 1], points[i]);
    return s;
}

ManifoldCurve grow_manifold(Param p, const FixedPointData& anchor, Side side,
                            double arclength, const GrowOptions& opt) {
    double lambda =
        (side == Side::Unstable) ? anchor.lambda_u : anchor.lambda_s;
    GrowContext g = context_for(p, {anchor.x, anchor.x}, {lambda, 1.0},
                                lambda, 1, side, opt.direction);
    return grow(g, p, side, arclength, opt);
}

ManifoldCurve grow_manifold(Param p, const Cycle& anchor, Side side,
                            double arclength, const GrowOptions& opt) {
    double lambda = (side == Side::Unstable) ? anchor.multiplier_u
                                             : anchor.multiplier_s;
    Vec2 z = anchor.points.front();
    Mat2 M{1.0, 0.0, 0.0, 1.0};
    Vec2 w = z;
    for (int i = 0; i < anchor.period; ++i) {
        M = jacobian(p, w) * M;
        w = apply(p, w);
    }
    // Eigenvector of the orbit differential, picking the better-conditioned
    // of the two algebraic forms.
    Vec2 e1{M.m01, lambda - M.m00};
    Vec2 e2{lambda - M.m11, M.m10};
    Vec2 dir = (std::hypot(e1.x, e1.y) >= std::hypot(e2.x, e2.y)) ? e1 : e2;
    if (std::hypot(dir.x, dir.y) == 0.0)
        throw EigenvalueDegenerate("orbit differential has no usable eigenvector");
    GrowContext g =
        context_for(p, z, dir, lambda, anchor.period, side, opt.direction);
    return grow(g, p, side, arclength, opt);
}

namespace {

bool segment_crossing(Vec2 a, Vec2 b, Vec2 c, Vec2 d, Vec2* out) {
    double rx = b.x - a.x, ry = b.y - a.y;
    double sx = d.x - c.x, sy = d.y - c.y;
    double denom = rx * sy - ry * sx;
    if (denom == 0.0) return false;
    double qx = c.x - a.x, qy = c.y - a.y;
    double t = (qx * sy - qy * sx) / denom;
    double u = (qx * ry - qy * rx) / denom;
    if (t <= 0.0 || t >= 1.0 || u <= 0.0 || u >= 1.0) return false;
    *out = {a.x + t * rx, a.y + t * ry};
    return true;
}

}  // namespace

IntersectionResult intersection_count(const ManifoldCurve& cu,
                                      const ManifoldCurve& cs,
                                      const Window& window, double merge_tol) {
    if (cu.points.size() < 2 || cs.points.size() < 2)
        throw EmptyInput("intersection counting needs two polylines");
    IntersectionResult r;
    for (std::size_t i = 1; i < cu.points.size(); ++i) {
        Vec2 a = cu.points[i - 1], b = cu.points[i];
        double xlo = std::min(a.x, b.x), xhi = std::max(a.x, b.x);
        double ylo = std::min(a.y, b.y), yhi = std::max(a.y, b.y);
        for (std::size_t j = 1; j < cs.points.size(); ++j) {
            Vec2 c = cs.points[j - 1], d = cs.points[j];
            if (std::max(c.x, d.x) < xlo || std::min(c.x, d.x) > xhi ||
                std::max(c.y, d.y) < ylo || std::min(c.y, d.y) > yhi)
                continue;
            Vec2 hit;
            if (!segment_crossing(a, b, c, d, &hit)) continue;
            if (!window.contains(hit)) continue;
            bool dup = false;
            for (Vec2 q : r.points)
                if (dist(q, hit) < merge_tol) { dup = true; break; }
            if (!dup) r.points.push_back(hit);
        }
    }
    r.count = static_cast<int>(r.points.size());
    return r;
}

}  // namespace henon
