#pragma once

#include <vector>

#include "henon/henon_core.hpp"

namespace henon {

enum class Side { Stable, Unstable };

/// Adaptively refined polyline along one side of a saddle's invariant
/// manifold, grown from the anchor in one eigendirection.
struct ManifoldCurve {
    Param p;
    Side side = Side::Unstable;
    double arc_tolerance = 1e-6;
    std::vector<Vec2> points;

    double arclength() const;
};

struct GrowOptions {
    double arc_tolerance = 1e-6;
    double max_turn = 0.2;
    std::size_t max_points = 2000000;
    /// +1 grows along the eigenvector, -1 along its negation.
    int direction = +1;
};

/// Grows the manifold polyline from a saddle fixed point until the
/// requested arclength is reached, inserting points so that consecutive
/// turning angles stay below max_turn and the pushed-forward polyline
/// stays within a tube of radius 2*arc_tolerance.
ManifoldCurve grow_manifold(Param p, const FixedPointData& anchor, Side side,
                            double arclength, const GrowOptions& opt = {});

/// Same, anchored at a point of a cycle; the eigendirection comes from
/// the Jacobian product around the orbit and the curve is grown under
/// the period-fold composition.
ManifoldCurve grow_manifold(Param p, const Cycle& anchor, Side side,
                            double arclength, const GrowOptions& opt = {});

struct Window {
    double x_lo = -4.0, x_hi = 4.0;
    double y_lo = -4.0, y_hi = 4.0;

    bool contains(Vec2 z) const {
        return z.x >= x_lo && z.x <= x_hi && z.y >= y_lo && z.y <= y_hi;
    }
};

struct IntersectionResult {
    int count = 0;
    std::vector<Vec2> points;
};

/// Transverse crossings of two polylines inside the window; crossings
/// closer than merge_tol are deduplicated.
IntersectionResult intersection_count(const ManifoldCurve& cu,
                                      const ManifoldCurve& cs,
                                      const Window& window,
                                      double merge_tol = 1e-9);

}  // namespace henon
