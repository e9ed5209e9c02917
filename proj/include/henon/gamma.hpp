#pragma once

#include <vector>

#include "henon/henon_core.hpp"

namespace henon {

/// One evaluation of the expansion-gap function at a parameter point.
struct GammaSample {
    double a = 0.0;
    double b = 0.0;
    double gamma = 0.0;
    int cycle_period = 1;
};

/// Traced zero locus of the gap function: samples (b, a) with gamma = 0.
struct ZeroCurve {
    int period = 1;
    int variant = 0;
    std::vector<std::pair<double, double>> samples;  // (b, a)
};

/// Half the log-expansion of Q minus the per-step log-expansion of the
/// reference cycle. period 1 uses the fixed point P; period 3 has two
/// distinct cycles selected by variant.
double gamma_value(Param p, int period = 1, int variant = 0);

/// Reference cycle located by parameter continuation from the seeds at
/// (a, b) = (2, 0).
Cycle reference_cycle(Param p, int period, int variant = 0);

struct GammaPartials {
    double da = 0.0;
    double db = 0.0;
};

/// Central differences with one Richardson step, cross-checked at a
/// coarser step; throws NonSmoothPoint when the two disagree.
GammaPartials gamma_partials(Param p, int period = 1, int variant = 0);

/// Slope da/db of the zero curve through p, from the partials.
double zero_curve_slope(Param p, int period = 1, int variant = 0);

ZeroCurve trace_zero_curve(int period, double b_lo, double b_hi, double step,
                           int variant = 0);

struct ScanResult {
    bool verdict = false;
    double min_margin = 0.0;
    std::size_t samples_used = 0;
};

/// Checks gamma > 0 at every boundary sample with 0 < b <= delta.
ScanResult nondegeneracy_scan(const std::vector<std::pair<double, double>>& ab,
                              double delta, int period = 1, int variant = 0);

}  // namespace henon
