#include "henon/gamma.hpp"

#include <cmath>
#include <sstream>

#include "henon/errors.hpp"

namespace henon {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Cycle seeds at (a, b) = (2, 0), where the map restricted to the x-axis
// image is conjugate to a degree-two angle doubling and cycles have the
// closed form x_i = 2 cos(2^i theta). The y coordinate trails by one step.
Vec2 seed_at_base(int period, int variant) {
    switch (period) {
        case 1:
            return {-1.0, -1.0};
        case 2: {
            double x0 = (-1.0 + std::sqrt(5.0)) / 2.0;
            double x1 = (-1.0 - std::sqrt(5.0)) / 2.0;
            return {x0, x1};
        }
        case 3: {
            double th = (variant == 0) ? 2.0 * kPi / 9.0 : 2.0 * kPi / 7.0;
            double x0 = 2.0 * std::cos(th);
            double x2 = 2.0 * std::cos(4.0 * th);
            return {x0, x2};
        }
        default: {
            std::ostringstream msg;
            msg << "no stored cycle seed for period " << period;
            throw DomainError(msg.str());
        }
    }
}

}  // namespace

Cycle reference_cycle(Param p, int period, int variant) {
    if (period == 3 && variant != 0 && variant != 1)
        throw DomainError("period-3 cycle variant must be 0 or 1");
    const Param base{2.0, 0.0};
    double dist = std::max(std::abs(p.a - base.a), std::abs(p.b - base.b));
    int steps = std::max(1, static_cast<int>(std::ceil(dist / 0.05)));
    Vec2 seed = seed_at_base(period, variant);
    Cycle c;
    for (int i = 1; i <= steps; ++i) {
        double t = static_cast<double>(i) / steps;
        Param q{base.a + t * (p.a - base.a), base.b + t * (p.b - base.b)};
        c = find_cycle(q, period, seed);
        seed = c.points.front();
    }
    return c;
}

double gamma_value(Param p, int period, int variant) {
    auto [fp, fq] = fixed_points(p);
    Cycle c = reference_cycle(p, period, variant);
    return 0.5 * std::log(std::abs(fq.lambda_u)) - c.lyapunov;
}

namespace {

GammaPartials partials_at_step(Param p, int period, int variant, double h) {
    auto g = [&](double a, double b) {
        return gamma_value({a, b}, period, variant);
    };
    auto central = [&](double step) -> GammaPartials {
        return {(g(p.a + step, p.b) - g(p.a - step, p.b)) / (2.0 * step),
                (g(p.a, p.b + step) - g(p.a, p.b - step)) / (2.0 * step)};
    };
    GammaPartials full = central(h);
    GammaPartials half = central(h / 2.0);
    return {(4.0 * half.da - full.da) / 3.0, (4.0 * half.db - full.db) / 3.0};
}

}  // namespace

GammaPartials gamma_partials(Param p, int period, int variant) {
    GammaPartials fine = partials_at_step(p, period, variant, 1e-6);
    GammaPartials coarse = partials_at_step(p, period, variant, 1e-5);
    auto rel = [](double x, double y) {
        return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-30});
    };
    if (rel(fine.da, coarse.da) > 1e-3 || rel(fine.db, coarse.db) > 1e-3)
        throw NonSmoothPoint("gamma partials disagree across step sizes");
    return fine;
}

double zero_curve_slope(Param p, int period, int variant) {
    GammaPartials d = gamma_partials(p, period, variant);
    if (d.da == 0.0) throw NonSmoothPoint("zero curve is vertical in a");
    return -d.db / d.da;
}

ZeroCurve trace_zero_curve(int period, double b_lo, double b_hi, double step,
                           int variant) {
    if (!(step > 0.0)) throw DomainError("trace step must be positive");
    if (b_hi < b_lo) std::swap(b_lo, b_hi);

    auto solve = [&](double b, double lo, double hi) -> double {
        auto g = [&](double a) { return gamma_value({a, b}, period, variant); };
        double glo = g(lo);
        double ghi = g(hi);
        if (glo == 0.0) return lo;
        if (ghi == 0.0) return hi;
        if ((glo > 0.0) == (ghi > 0.0)) {
            std::ostringstream msg;
            msg << "no sign change in [" << lo << ", " << hi << "] at b=" << b;
            throw LostBracket(msg.str());
        }
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            double mid = 0.5 * (lo + hi);
            if ((g(mid) > 0.0) == (glo > 0.0))
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    ZeroCurve curve;
    curve.period = period;
    curve.variant = variant;
    bool have_prev = false;
    double prev = 0.0;
    int n = static_cast<int>(std::floor((b_hi - b_lo) / step + 0.5)) + 1;
    for (int i = 0; i < n; ++i) {
        double b = b_lo + i * step;
        if (b > b_hi + step * 1e-9) break;
        double root;
        if (!have_prev) {
            root = solve(b, 1.5, 7.0);
        } else {
            // Continue from the previous root, widening until bracketed.
            double r = 0.05;
            for (;;) {
                double lo = prev - r;
                double hi = prev + r;
                try {
                    root = solve(b, lo, hi);
                    break;
                } catch (const LostBracket&) {
                    r *= 2.0;
                    if (r > 0.8) throw;
                }
            }
        }
        curve.samples.emplace_back(b, root);
        prev = root;
        have_prev = true;
    }
    if (curve.samples.empty())
        throw DomainError("empty b range in zero curve trace");
    return curve;
}

ScanResult nondegeneracy_scan(const std::vector<std::pair<double, double>>& ab,
                              double delta, int period, int variant) {
    if (ab.empty()) throw EmptyBoundary("no boundary samples to scan");
    ScanResult r;
    r.verdict = true;
    bool first = true;
    for (auto [a, b] : ab) {
        if (!(b > 0.0 && b <= delta)) continue;
        double g = gamma_value({a, b}, period, variant);
        if (first || g < r.min_margin) r.min_margin = g;
        first = false;
        ++r.samples_used;
        if (g <= 0.0) r.verdict = false;
    }
    if (first) throw EmptyBoundary("no samples with b in (0, delta]");
    return r;
}

}  // namespace henon
