#include "henon/tangency.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <optional>

namespace henon {

namespace {

std::atomic<long> g_indicator_evals{0};
std::atomic<long> g_bisection_steps{0};
std::atomic<long> g_bracket_checks{0};
std::atomic<long> g_cache_hits{0};

constexpr int kSeriesLen = 40;
constexpr double kFoldY = 0.7;
constexpr double kWindowLeft = 0.9;
constexpr double kWindowRight = 0.6;
constexpr double kArmDx = 0.9;
constexpr double kArmDy = 0.8;
constexpr double kHalfH = 0.9;

/// Internal sentinel for a geometry lookup that came up empty at the
/// current sampling level; the indicator retries once, refined, before
/// declaring the count ambiguous.
struct Unresolved {
    std::string what;
};

Mat2 map_differential(Param p, Vec2 z) {
    return {2.0 * z.x, -p.b, 1.0, 0.0};
}

Mat2 inverse_differential(Param p, Vec2 z) {
    return {0.0, 1.0, -1.0 / p.b, 2.0 * z.y / p.b};
}

Vec2 mat_vec(const Mat2& m, Vec2 v) {
    return {m.m00 * v.x + m.m01 * v.y, m.m10 * v.x + m.m11 * v.y};
}

/// Power-series parametrization of one manifold branch, valid on a disk
/// around the anchor and extended by the conjugacy t -> rate * t: pull
/// the parameter into the disk, evaluate the polynomial, then push the
/// point back out with the map.
struct SeriesBranch {
    Param p;
    int period = 1;
    bool inverse = false;
    double rate = 0.0;
    double radius = 0.0;
    std::array<double, kSeriesLen> cx{};
    std::array<double, kSeriesLen> cy{};

    void set_radius() {
        double r = 1e6;
        for (int k = 6; k < kSeriesLen; ++k) {
            double m = std::max(std::abs(cx[k]), std::abs(cy[k]));
            if (m > 1e-300)
                r = std::min(r, std::pow(1e-17 / m, 1.0 / k));
        }
        radius = 0.75 * r;
    }

    Vec2 eval_local(double t) const {
        double x = 0.0, y = 0.0;
        for (int k = kSeriesLen - 1; k >= 0; --k) {
            x = x * t + cx[k];
            y = y * t + cy[k];
        }
        return {x, y};
    }

    Vec2 deriv_local(double t) const {
        double x = 0.0, y = 0.0;
        for (int k = kSeriesLen - 1; k >= 1; --k) {
            x = x * t + k * cx[k];
            y = y * t + k * cy[k];
        }
        return {x, y};
    }

    bool try_point_and_tangent(double t, Vec2& z, Vec2& d) const {
        int k = 0;
        double tt = t;
        while (std::abs(tt) > radius) {
            tt /= rate;
            if (++k > 400)
                return false;
        }
        z = eval_local(tt);
        d = deriv_local(tt);
        double scale = 1.0;
        for (int i = 0; i < k; ++i)
            scale *= rate;
        d = {d.x / scale, d.y / scale};
        for (int i = 0; i < k * period; ++i) {
            if (inverse) {
                d = mat_vec(inverse_differential(p, z), d);
                z = apply_inverse(p, z);
            } else {
                d = mat_vec(map_differential(p, z), d);
                z = apply(p, z);
            }
        }
        return true;
    }

    Vec2 point(double t) const {
        Vec2 z, d;
        if (!try_point_and_tangent(t, z, d))
            throw Unresolved{"parameter outside the reachable range"};
        return z;
    }
};

/// A branch or its forward image; cycles contribute one series branch
/// per orbit point, the second obtained by pushing the first forward.
struct BranchView {
    const SeriesBranch* base = nullptr;
    bool image = false;

    double radius() const { return base->radius; }

    bool try_point_and_tangent(double t, Vec2& z, Vec2& d) const {
        if (!base->try_point_and_tangent(t, z, d))
            return false;
        if (image) {
            d = mat_vec(map_differential(base->p, z), d);
            z = apply(base->p, z);
        }
        return true;
    }

    Vec2 point(double t) const {
        Vec2 z, d;
        if (!try_point_and_tangent(t, z, d))
            throw Unresolved{"parameter outside the reachable range"};
        return z;
    }
};

SeriesBranch unstable_series_q(Param p) {
    auto [fp, fq] = fixed_points(p);
    double lam = fq.lambda_u;
    SeriesBranch br;
    br.p = p;
    br.rate = lam;
    br.cx[0] = fq.x;
    br.cy[0] = fq.x;
    double x1 = 1.0 / std::sqrt(1.0 + 1.0 / (lam * lam));
    br.cx[1] = x1;
    br.cy[1] = x1 / lam;
    double lk = lam;
    for (int k = 2; k < kSeriesLen; ++k) {
        lk *= lam;
        double s = 0.0;
        for (int i = 1; i < k; ++i)
            s += br.cx[i] * br.cx[k - i];
        br.cx[k] = s / (lk + p.b / lk - 2.0 * br.cx[0]);
        br.cy[k] = br.cx[k] / lk;
    }
    br.set_radius();
    return br;
}

SeriesBranch stable_series_q(Param p) {
    auto [fp, fq] = fixed_points(p);
    double mu = fq.lambda_s;
    SeriesBranch br;
    br.p = p;
    br.inverse = true;
    br.rate = 1.0 / mu;
    br.cx[0] = fq.x;
    br.cy[0] = fq.x;
    double x1 = mu / std::sqrt(1.0 + mu * mu);
    br.cx[1] = x1;
    br.cy[1] = x1 / mu;
    double mk = mu;
    for (int k = 2; k < kSeriesLen; ++k) {
        mk *= mu;
        double s = 0.0;
        for (int i = 1; i < k; ++i)
            s += br.cx[i] * br.cx[k - i];
        br.cx[k] = s / (mk + p.b / mk - 2.0 * br.cx[0]);
        br.cy[k] = br.cx[k] / mk;
    }
    br.set_radius();
    return br;
}

/// Period-2 orbit by continuation in b from the closed form at b = 0.
Cycle continued_cycle2(Param p) {
    double disc = 4.0 * p.a - 3.0;
    if (disc <= 0.0)
        throw Unresolved{"period-2 orbit does not exist here"};
    Vec2 z{(-1.0 + std::sqrt(disc)) / 2.0, (-1.0 - std::sqrt(disc)) / 2.0};
    int steps = std::max(1, (int)(std::abs(p.b) / 0.05) + 1);
    Cycle c;
    for (int i = 1; i <= steps; ++i) {
        Param q{p.a, p.b * i / steps};
        c = find_cycle(q, 2, z);
        z = c.points[0];
    }
    return c;
}

SeriesBranch cycle2_series(Param p) {
    Cycle c = continued_cycle2(p);
    Vec2 p0 = c.points[0], p1 = c.points[1];
    if (p1.x < p0.x)
        std::swap(p0, p1);
    Mat2 M = map_differential(p, p1) * map_differential(p, p0);
    double tr = M.m00 + M.m11;
    double de = M.m00 * M.m11 - M.m01 * M.m10;
    double disc = std::sqrt(tr * tr - 4.0 * de);
    double L1 = (tr + disc) / 2.0, L2 = (tr - disc) / 2.0;
    double L = std::abs(L1) > std::abs(L2) ? L1 : L2;
    Vec2 v = std::abs(M.m01) > 1e-12 ? Vec2{M.m01, L - M.m00}
                                     : Vec2{L - M.m11, M.m10};
    double n = std::hypot(v.x, v.y);
    if (n == 0.0)
        throw EigenvalueDegenerate("orbit differential has no eigenvector");
    v = {v.x / n, v.y / n};
    if (v.x < 0.0)
        v = {-v.x, -v.y};

    SeriesBranch br;
    br.p = p;
    br.period = 2;
    br.rate = L;
    // Coefficients of both orbit points solved together: the x-series
    // at the second point is the image of the first, and feeding it
    // back through the map closes the pair of quadratic recurrences.
    std::array<double, kSeriesLen> x1c{};
    br.cx[0] = p0.x;
    br.cy[0] = p0.y;
    br.cx[1] = v.x;
    br.cy[1] = v.y;
    x1c[0] = p1.x;
    x1c[1] = br.cy[1] * L;
    double lk = L;
    for (int k = 2; k < kSeriesLen; ++k) {
        lk *= L;
        double A = 0.0, B = 0.0;
        for (int i = 1; i < k; ++i) {
            A += br.cx[i] * br.cx[k - i];
            B += x1c[i] * x1c[k - i];
        }
        double m11 = -2.0 * br.cx[0], m12 = lk + p.b;
        double m21 = lk + p.b, m22 = -2.0 * x1c[0] * lk;
        double det = m11 * m22 - m12 * m21;
        br.cx[k] = (A * m22 - m12 * B) / det;
        br.cy[k] = (m11 * B - A * m21) / det;
        x1c[k] = br.cy[k] * lk;
    }
    br.set_radius();
    return br;
}

struct FoldCandidate {
    int branch = 0;
    double t = 0.0;
    Vec2 tip;
};

/// Sampling resolution knobs; level 1 is the refined retry.
struct ScanParams {
    int scan_steps = 1200;
    double scan_factor = 1.04;
    int max_per_sign = 40;
    int n_family = 801;
    int n_zoom = 400;
};

ScanParams scan_params(const TangencyOptions& opt, int level) {
    ScanParams sp;
    double tol = std::max(opt.arc_tolerance, 1e-12);
    sp.n_family = std::max(201, (int)(8.0 / std::sqrt(tol)) | 1);
    if (level > 0) {
        sp.scan_steps = 2400;
        sp.scan_factor = std::sqrt(1.04);
        sp.max_per_sign = 80;
        sp.n_family = sp.n_family * 2 + 1;
    }
    return sp;
}

/// Folds of one branch: sign changes of dx/dt located by a geometric
/// parameter sweep and refined by bisection.
std::vector<FoldCandidate> fold_candidates(const BranchView& br,
                                           const ScanParams& sp) {
    std::vector<FoldCandidate> out;
    for (int sgn : {-1, +1}) {
        double t = sgn * br.radius() * 1e-3;
        Vec2 z, d;
        if (!br.try_point_and_tangent(t, z, d))
            continue;
        bool sp_pos = d.x > 0.0;
        int found = 0;
        for (int i = 0; i < sp.scan_steps; ++i) {
            double tn = t * sp.scan_factor;
            if (!br.try_point_and_tangent(tn, z, d))
                break;
            bool sn_pos = d.x > 0.0;
            if (sn_pos != sp_pos) {
                double lo = t, hi = tn;
                for (int j = 0; j < 120; ++j) {
                    double mid = 0.5 * (lo + hi);
                    br.try_point_and_tangent(mid, z, d);
                    if ((d.x > 0.0) == sp_pos)
                        lo = mid;
                    else
                        hi = mid;
                }
                double tf = 0.5 * (lo + hi);
                out.push_back({0, tf, br.point(tf)});
                if (++found >= sp.max_per_sign)
                    break;
            }
            t = tn;
            sp_pos = sn_pos;
        }
    }
    return out;
}

/// Exact graph y -> x of the stable piece crossing the fold window: the
/// piece is the f-preimage of the local stable segment, so its height
/// is solved by Newton on the preimage y along the segment parameter.
struct StableGraph {
    const SeriesBranch* bs;
    double s_lo = 0.0, s_hi = 0.0;
    mutable double s_warm = 0.0;

    double pre_y(double s, double* dy = nullptr, double* x = nullptr) const {
        Vec2 z, d;
        if (!bs->try_point_and_tangent(s, z, d))
            throw Unresolved{"stable segment parameter out of range"};
        if (dy)
            *dy = (2.0 * z.y * d.y - d.x) / bs->p.b;
        if (x)
            *x = z.y;
        return (z.y * z.y - bs->p.a - z.x) / bs->p.b;
    }

    double solve(double target, double seed) const {
        double s = seed;
        for (int i = 0; i < 60; ++i) {
            double dy;
            double g = pre_y(s, &dy);
            double step = (g - target) / dy;
            s -= step;
            if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(s)))
                return s;
        }
        // Newton did not settle; bisect between the known endpoints.
        double lo = s_lo, hi = s_hi;
        double glo = pre_y(lo);
        double ghi = pre_y(hi);
        if ((glo < target) == (ghi < target))
            throw Unresolved{"stable graph does not span the requested height"};
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if ((pre_y(mid) < target) == (glo < target))
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    std::optional<double> x_at(double y) const {
        double ylo = std::min(pre_y(s_lo), pre_y(s_hi));
        double yhi = std::max(pre_y(s_lo), pre_y(s_hi));
        if (y <= ylo || y >= yhi)
            return std::nullopt;
        double s = solve(y, s_warm);
        s_warm = s;
        double x;
        pre_y(s, nullptr, &x);
        return x;
    }
};

StableGraph make_stable_graph(const SeriesBranch& bs, double y_center,
                              double half_h) {
    StableGraph g;
    g.bs = &bs;
    double xq = bs.cx[0];
    double x2est = -std::sqrt(bs.p.a + xq);
    double seed = x2est - xq;
    g.s_lo = seed;
    g.s_hi = seed;
    double s_mid = g.solve(y_center, seed);
    // Walk outward from the pass until the piece leaves the height band
    // or its parametrization runs out; solving for the band edge by
    // Newton instead would chase a height the piece need not reach.
    auto band_edge = [&](int dir) {
        auto inside = [&](double s) {
            try {
                return std::abs(g.pre_y(s) - y_center) < half_h;
            } catch (const Unresolved&) {
                return false;
            }
        };
        double ds = 1e-8 * std::max(1.0, std::abs(s_mid));
        double s_in = s_mid, s_out = s_mid;
        bool exited = false;
        for (int i = 0; i < 200; ++i) {
            s_out = s_in + dir * ds;
            if (!inside(s_out)) {
                exited = true;
                break;
            }
            s_in = s_out;
            ds *= 2.0;
        }
        if (!exited)
            return s_in;
        for (int i = 0; i < 80; ++i) {
            double mid = 0.5 * (s_in + s_out);
            if (inside(mid))
                s_in = mid;
            else
                s_out = mid;
        }
        return s_in;
    };
    double s_a = band_edge(-1);
    double s_b = band_edge(+1);
    g.s_lo = std::min(s_a, s_b);
    g.s_hi = std::max(s_a, s_b);
    g.s_warm = s_mid;
    return g;
}

/// Walk from the fold along the branch until the arm leaves the fold
/// window, then bisect the exit parameter.
double arm_extent(const BranchView& br, double tf, Vec2 zf, int direction) {
    auto outside = [&](double t) {
        Vec2 z = br.point(t);
        return (z.x - zf.x > kArmDx) || (std::abs(z.y - zf.y) > kArmDy);
    };
    double dt = std::abs(tf) * 1e-8 + 1e-12;
    double t_in = tf, t_out = tf;
    bool exited = false;
    for (int i = 0; i < 80; ++i) {
        t_out = t_in + direction * dt;
        if (outside(t_out)) {
            exited = true;
            break;
        }
        t_in = t_out;
        dt *= 2.0;
    }
    if (!exited)
        throw Unresolved{"fold arm does not leave its window"};
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (t_in + t_out);
        if (outside(mid))
            t_out = mid;
        else
            t_in = mid;
    }
    return t_in;
}

/// Clip one arm where it leaves the window or doubles back in x.  A
/// coarse walk can overshoot onto a neighbouring pass of the branch;
/// such a pass either exits the window or re-enters moving leftward, so
/// both symptoms mark the true end of this fold's arm.
double trim_arm(const BranchView& br, double tf, Vec2 zf, double t_end,
                int n) {
    double run_max = -1e18;
    double good = tf;
    for (int i = 1; i <= n; ++i) {
        double t = tf + (t_end - tf) * i / n;
        Vec2 z = br.point(t);
        if ((z.x - zf.x > kArmDx + 0.05) ||
            (std::abs(z.y - zf.y) > kArmDy + 0.05))
            break;
        if (z.x < run_max - 0.25)
            break;
        run_max = std::max(run_max, z.x);
        good = t;
    }
    return good;
}

/// Signed clearance x - graph(y) of one point of the fold family, empty
/// when the point leaves the window or the graph does not reach it.
std::optional<double> clearance(const BranchView& br, double t, Vec2 zf,
                                const StableGraph& g) {
    Vec2 z = br.point(t);
    if ((z.x - zf.x > kArmDx + 0.05) || (std::abs(z.y - zf.y) > kArmDy + 0.05))
        return std::nullopt;
    auto gv = g.x_at(z.y);
    if (!gv)
        return std::nullopt;
    return z.x - *gv;
}

/// Minimum clearance along the fold's window component; negative once
/// the fold pokes through the stable pass.
double family_min(const BranchView& br, double tf, Vec2 zf,
                  const StableGraph& g, const ScanParams& sp) {
    double t0 = trim_arm(br, tf, zf, arm_extent(br, tf, zf, -1),
                         sp.n_family / 2);
    double t1 = trim_arm(br, tf, zf, arm_extent(br, tf, zf, +1),
                         sp.n_family / 2);
    int nU = sp.n_family;
    double min_v = 1e18;
    int min_i = -1;
    std::vector<double> ts(nU);
    for (int i = 0; i < nU; ++i)
        ts[i] = t0 + (t1 - t0) * i / (nU - 1);
    for (int i = 0; i < nU; ++i) {
        auto d = clearance(br, ts[i], zf, g);
        if (d && *d < min_v) {
            min_v = *d;
            min_i = i;
        }
    }
    if (min_i < 0)
        throw Unresolved{"fold window component is empty"};
    double lo = ts[std::max(0, min_i - 2)];
    double hi = ts[std::min(nU - 1, min_i + 2)];
    for (int round = 0; round < 3; ++round) {
        double best_t = 0.0, best_v = 1e18;
        bool any = false;
        for (int i = 0; i < sp.n_zoom; ++i) {
            double t = lo + (hi - lo) * i / (sp.n_zoom - 1);
            auto d = clearance(br, t, zf, g);
            if (d && *d < best_v) {
                best_v = *d;
                best_t = t;
                any = true;
            }
        }
        if (!any)
            break;
        min_v = std::min(min_v, best_v);
        double w = (hi - lo) / (sp.n_zoom - 1);
        lo = best_t - 2.0 * w;
        hi = best_t + 2.0 * w;
    }
    return min_v;
}

struct PieceSet {
    std::vector<SeriesBranch> owned;
    std::vector<BranchView> branches;
    SeriesBranch stable;
};

PieceSet build_branches(Param p, const PairSpec& pair) {
    PieceSet ps;
    ps.stable = stable_series_q(p);
    if (pair.unstable_anchor == UnstableAnchor::FixedQ) {
        ps.owned.push_back(unstable_series_q(p));
        ps.branches.push_back({&ps.owned[0], false});
    } else {
        ps.owned.push_back(cycle2_series(p));
        ps.branches.push_back({&ps.owned[0], false});
        ps.branches.push_back({&ps.owned[0], true});
    }
    return ps;
}

struct FoldPartition {
    std::vector<FoldCandidate> in_window;
    int left = 0;
    int right = 0;
};

/// Fold tips near the height of the stable pass, split by their x
/// against the vertex window, in-window ones rightmost first and
/// deduplicated.
FoldPartition window_folds(Param p, const PieceSet& ps,
                           const ScanParams& sp) {
    auto [fp, fq] = fixed_points(p);
    double xr = -std::sqrt(p.a + fq.x);
    FoldPartition part;
    for (std::size_t bi = 0; bi < ps.branches.size(); ++bi) {
        for (auto& c : fold_candidates(ps.branches[bi], sp)) {
            if (std::abs(c.tip.y) >= kFoldY)
                continue;
            if (c.tip.x < xr - kWindowLeft)
                ++part.left;
            else if (c.tip.x > xr + kWindowRight)
                ++part.right;
            else
                part.in_window.push_back({(int)bi, c.t, c.tip});
        }
    }
    std::sort(part.in_window.begin(), part.in_window.end(),
              [](const FoldCandidate& a, const FoldCandidate& b) {
                  return a.tip.x > b.tip.x;
              });
    std::vector<FoldCandidate> dedup;
    for (auto& c : part.in_window) {
        bool seen = false;
        for (auto& o : dedup)
            if (std::abs(c.tip.x - o.tip.x) < 1e-6 &&
                std::abs(c.tip.y - o.tip.y) < 1e-6) {
                seen = true;
                break;
            }
        if (!seen)
            dedup.push_back(c);
    }
    part.in_window = std::move(dedup);
    return part;
}

int indicator_level(Param p, const PairSpec& pair, const TangencyOptions& opt,
                    int level) {
    g_indicator_evals.fetch_add(1, std::memory_order_relaxed);
    ScanParams sp = scan_params(opt, level);
    PieceSet ps = build_branches(p, pair);
    FoldPartition part = window_folds(p, ps, sp);

    if (part.in_window.empty()) {
        // Far from the boundary the fold tips leave the vertex window:
        // left of it they pierced long ago, right of it they have not
        // approached the pass yet.
        if (part.left > 0)
            return pair.expected_count_after;
        if (part.right > 0)
            return 0;
        throw Unresolved{"no folds near the stable pass"};
    }

    StableGraph g = make_stable_graph(ps.stable, part.in_window[0].tip.y,
                                      kHalfH + kArmDy);
    // The boundary is the first detachment seen from the horseshoe
    // side, so one still-detached fold places the parameter below it.
    for (auto& f : part.in_window) {
        auto gv = g.x_at(f.tip.y);
        if (!gv)
            throw Unresolved{"stable graph does not span a fold tip"};
        if (f.tip.x - *gv < 0.0)
            continue;
        if (family_min(ps.branches[f.branch], f.t, f.tip, g, sp) >= 0.0)
            return 0;
    }
    return pair.expected_count_after;
}

std::string cache_key(const char* op, double b, const PairSpec& pair,
                      const TangencyOptions& opt) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s|b=%a|pair=%d:%d|tol=%a|arc=%a|v1", op,
                  b, (int)pair.unstable_anchor, pair.expected_count_after,
                  opt.bisect_tol, opt.arc_tolerance);
    return buf;
}

double slope_with_center(double b, const PairSpec& pair,
                         const TangencyOptions& opt, double a_center);

GridRow grid_row(int sign, int n, const TangencyOptions& opt) {
    GridRow row;
    row.n = n;
    row.b_n = sign * 0.02 * n;
    row.h_n = (sign < 0 && 19 <= n && n <= 21) ? 0.015 : 0.01;
    try {
        if (n == 0) {
            // b = 0 has no inverse; the row is the one-sided limit from
            // values just off the axis.
            double d = 1e-4;
            TangencyOptions o = opt;
            o.seed_grid = nullptr;
            o.bracket_lo = 1.9;
            o.bracket_hi = 2.1;
            double a1 = a_tgc(sign * d, default_pair(sign * d), o);
            double a2 = a_tgc(sign * 2 * d, default_pair(sign * 2 * d), o);
            row.a_n = 2.0 * a1 - a2;
            row.s_n = (a2 - a1) / (sign * d);
        } else {
            double b = row.b_n;
            PairSpec pair = default_pair(b);
            row.a_n = a_tgc(b, pair, opt);
            row.s_n = slope_with_center(b, pair, opt, row.a_n);
        }
        row.valid = true;
    } catch (const Error& e) {
        row.note = e.what();
    } catch (const Unresolved& u) {
        row.note = u.what;
    }
    return row;
}

std::vector<GridRow> build_grid_impl(int sign, int n_max,
                                     const TangencyOptions& opt,
                                     bool parallel) {
    if (sign != 1 && sign != -1)
        throw DomainError("grid sign must be +1 or -1");
    if (n_max < 0)
        throw DomainError("grid size must be nonnegative");
    std::vector<GridRow> rows(n_max + 1);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int n = 0; n <= n_max; ++n)
        rows[n] = grid_row(sign, n, opt);
    return rows;
}

}  // namespace

PairSpec default_pair(double b) {
    PairSpec pair;
    pair.unstable_anchor =
        b < 0.0 ? UnstableAnchor::Period2 : UnstableAnchor::FixedQ;
    return pair;
}

int tangency_indicator(Param p, const PairSpec& pair,
                       const TangencyOptions& opt) {
    try {
        return indicator_level(p, pair, opt, 0);
    } catch (const Unresolved&) {
        try {
            return indicator_level(p, pair, opt, 1);
        } catch (const Unresolved& u) {
            throw AmbiguousCount(u.what + std::string(" at a=") +
                                 std::to_string(p.a) + ", b=" +
                                 std::to_string(p.b));
        }
    }
}

std::pair<ManifoldCurve, ManifoldCurve> tangency_pieces(
    Param p, const PairSpec& pair, const TangencyOptions& opt) {
    for (int level = 0;; ++level) {
        try {
            ScanParams sp = scan_params(opt, level);
            PieceSet ps = build_branches(p, pair);
            FoldPartition part = window_folds(p, ps, sp);
            if (part.in_window.empty())
                throw Unresolved{"no fold near the stable pass"};
            const FoldCandidate& f = part.in_window[0];
            const BranchView& br = ps.branches[f.branch];

            ManifoldCurve u;
            u.p = p;
            u.side = Side::Unstable;
            u.arc_tolerance = opt.arc_tolerance;
            double t0 = trim_arm(br, f.t, f.tip,
                                 arm_extent(br, f.t, f.tip, -1),
                                 sp.n_family / 2);
            double t1 = trim_arm(br, f.t, f.tip,
                                 arm_extent(br, f.t, f.tip, +1),
                                 sp.n_family / 2);
            for (int i = 0; i < sp.n_family; ++i)
                u.points.push_back(
                    br.point(t0 + (t1 - t0) * i / (sp.n_family - 1)));

            ManifoldCurve s;
            s.p = p;
            s.side = Side::Stable;
            s.arc_tolerance = opt.arc_tolerance;
            StableGraph g =
                make_stable_graph(ps.stable, f.tip.y, kHalfH + kArmDy);
            int nS = sp.n_family + 100;
            for (int i = 0; i < nS; ++i) {
                double sv = g.s_lo + (g.s_hi - g.s_lo) * i / (nS - 1);
                s.points.push_back(apply_inverse(p, ps.stable.point(sv)));
            }
            return {std::move(u), std::move(s)};
        } catch (const Unresolved& u) {
            if (level >= 1)
                throw AmbiguousCount(u.what + std::string(" at a=") +
                                     std::to_string(p.a) + ", b=" +
                                     std::to_string(p.b));
        }
    }
}

double a_tgc(double b, const PairSpec& pair, const TangencyOptions& opt) {
    if (b == 0.0)
        throw SingularParameter("the boundary at b=0 is a one-sided limit");
    std::string key;
    if (opt.cache) {
        key = cache_key("a_tgc", b, pair, opt);
        double hit;
        if (opt.cache->lookup(key, hit)) {
            g_cache_hits.fetch_add(1, std::memory_order_relaxed);
            return hit;
        }
    }
    double lo = opt.bracket_lo, hi = opt.bracket_hi;
    if (lo == 0.0 && hi == 0.0) {
        if (opt.seed_grid) {
            double guess = a_aprx(b, *opt.seed_grid);
            lo = guess - 0.1;
            hi = guess + 0.1;
        } else {
            lo = 1.5;
            hi = 7.0;
        }
    }
    int clo = tangency_indicator({lo, b}, pair, opt);
    int chi = tangency_indicator({hi, b}, pair, opt);
    g_bracket_checks.fetch_add(1, std::memory_order_relaxed);
    if (clo != 0 || chi < pair.expected_count_after)
        throw BadBracket("indicator is " + std::to_string(clo) + " at a=" +
                         std::to_string(lo) + " and " + std::to_string(chi) +
                         " at a=" + std::to_string(hi));
    while (hi - lo > opt.bisect_tol) {
        double mid = 0.5 * (lo + hi);
        if (tangency_indicator({mid, b}, pair, opt) >=
            pair.expected_count_after)
            hi = mid;
        else
            lo = mid;
        g_bisection_steps.fetch_add(1, std::memory_order_relaxed);
    }
    double root = 0.5 * (lo + hi);
    if (opt.cache)
        opt.cache->store(key, root);
    return root;
}

double five_point_stencil(double fm2, double fm1, double fp1, double fp2,
                          double delta) {
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * delta);
}

namespace {

double slope_with_center(double b, const PairSpec& pair,
                         const TangencyOptions& opt, double a_center) {
    double d = 1e-4;
    TangencyOptions o = opt;
    o.seed_grid = nullptr;
    o.bracket_lo = a_center - 0.05;
    o.bracket_hi = a_center + 0.05;
    double am2 = a_tgc(b - 2 * d, pair, o);
    double am1 = a_tgc(b - d, pair, o);
    double ap1 = a_tgc(b + d, pair, o);
    double ap2 = a_tgc(b + 2 * d, pair, o);
    return five_point_stencil(am2, am1, ap1, ap2, d);
}

}  // namespace

double slope_five_point(double b, const PairSpec& pair,
                        const TangencyOptions& opt) {
    return slope_with_center(b, pair, opt, a_tgc(b, pair, opt));
}

std::vector<GridRow> build_grid(int sign, int n_max,
                                const TangencyOptions& opt) {
    return build_grid_impl(sign, n_max, opt, true);
}

std::vector<GridRow> build_grid_serial(int sign, int n_max,
                                       const TangencyOptions& opt) {
    return build_grid_impl(sign, n_max, opt, false);
}

double a_aprx(double b, const std::vector<GridRow>& grid) {
    std::vector<const GridRow*> rows;
    for (auto& r : grid)
        if (r.valid)
            rows.push_back(&r);
    if (rows.size() < 2)
        throw EmptyInput("grid interpolation needs at least two valid rows");
    std::sort(rows.begin(), rows.end(),
              [](const GridRow* x, const GridRow* y) { return x->b_n < y->b_n; });
    if (b < rows.front()->b_n || b > rows.back()->b_n)
        throw OutOfRange("b=" + std::to_string(b) +
                         " is outside the grid span");
    auto it = std::lower_bound(
        rows.begin(), rows.end(), b,
        [](const GridRow* r, double v) { return r->b_n < v; });
    if (it == rows.begin())
        return (*it)->a_n;
    const GridRow* r1 = *it;
    const GridRow* r0 = *(it - 1);
    if (r1->b_n == r0->b_n)
        return r0->a_n;
    double w = (b - r0->b_n) / (r1->b_n - r0->b_n);
    return r0->a_n + w * (r1->a_n - r0->a_n);
}

double a_aprx(Complex b, const std::vector<GridRow>& grid) {
    return a_aprx(b.real(), grid);
}

TangencyStats tangency_stats() {
    TangencyStats st;
    st.indicator_evals = g_indicator_evals.load();
    st.bisection_steps = g_bisection_steps.load();
    st.bracket_checks = g_bracket_checks.load();
    st.cache_hits = g_cache_hits.load();
    return st;
}

void reset_tangency_stats() {
    g_indicator_evals = 0;
    g_bisection_steps = 0;
    g_bracket_checks = 0;
    g_cache_hits = 0;
}

}  // namespace henon
