#pragma once

#include <string>
#include <vector>

#include "henon/manifold.hpp"

namespace henon {

/// Which saddle anchors the unstable piece of a tangency pair.
enum class UnstableAnchor { FixedQ, Period2 };

/// One pairing of finite manifold pieces whose crossing count flips
/// from 0 to expected_count_after as the first tangency is crossed.
struct PairSpec {
    UnstableAnchor unstable_anchor = UnstableAnchor::FixedQ;
    Window window;
    int expected_count_after = 2;
};

/// The pairing used for the published grid: the fixed point Q against
/// itself for b > 0, the period-2 orbit against Q for b < 0.
PairSpec default_pair(double b);

/// One row of the boundary grid at b_n = sign * 0.02 * n.
struct GridRow {
    int n = 0;
    double b_n = 0.0;
    double a_n = 0.0;
    double s_n = 0.0;
    double h_n = 0.0;
    bool valid = false;
    std::string note;
};

/// Lookup/store hook for memoizing solved boundary values; keys encode
/// operation, parameters, tolerances, and code version.
struct ValueCache {
    virtual ~ValueCache() = default;
    virtual bool lookup(const std::string& key, double& out) = 0;
    virtual void store(const std::string& key, double value) = 0;
};

struct TangencyOptions {
    /// Bisection width at which the boundary value is accepted.
    double bisect_tol = 1e-9;
    /// Sampling resolution of the manifold pieces; the fold family is
    /// sampled at spacing proportional to sqrt of this.
    double arc_tolerance = 1e-4;
    /// Explicit bisection bracket; both zero means derive one from
    /// seed_grid when present, else fall back to [1.5, 7].
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    /// Previously computed rows used to seed brackets via a_aprx.
    const std::vector<GridRow>* seed_grid = nullptr;
    ValueCache* cache = nullptr;
};

/// Crossing indicator at one parameter point: expected_count_after once
/// every fold of the unstable piece near the stable piece's vertical
/// pass has pierced it, 0 while any fold is still detached.
int tangency_indicator(Param p, const PairSpec& pair,
                       const TangencyOptions& opt = {});

/// The designated finite pieces behind the indicator, as polylines: the
/// window component of the binding fold and the stable pass it crosses.
/// Feed them to intersection_count with pair.window.
std::pair<ManifoldCurve, ManifoldCurve> tangency_pieces(
    Param p, const PairSpec& pair, const TangencyOptions& opt = {});

/// First-tangency boundary value at b: bisection on the indicator.
double a_tgc(double b, const PairSpec& pair,
             const TangencyOptions& opt = {});

/// Derivative at the stencil center of the degree-4 interpolant through
/// f(b +- delta) and f(b +- 2 delta); exact on quartics.
double five_point_stencil(double fm2, double fm1, double fp1, double fp2,
                          double delta);

/// Boundary slope at b: a_tgc fed through the five-point stencil with
/// delta = 1e-4, each stencil solve bracketed near the center value.
double slope_five_point(double b, const PairSpec& pair,
                        const TangencyOptions& opt = {});

/// Boundary grid rows n = 0..n_max at b_n = sign * 0.02 * n; row 0 is
/// the one-sided b -> 0 extrapolation.  Rows are independent; failures
/// mark the row invalid instead of aborting the build.  build_grid runs
/// rows in parallel, build_grid_serial is the reference implementation.
std::vector<GridRow> build_grid(int sign, int n_max = 50,
                                const TangencyOptions& opt = {});
std::vector<GridRow> build_grid_serial(int sign, int n_max = 50,
                                       const TangencyOptions& opt = {});

/// Piecewise linear interpolation of the grid at b; complex b uses its
/// real part.
double a_aprx(double b, const std::vector<GridRow>& grid);
double a_aprx(Complex b, const std::vector<GridRow>& grid);

/// Counters for cache effectiveness and bracket validity checks.
struct TangencyStats {
    long indicator_evals = 0;
    long bisection_steps = 0;
    long bracket_checks = 0;
    long cache_hits = 0;
};
TangencyStats tangency_stats();
void reset_tangency_stats();

}  // namespace henon
