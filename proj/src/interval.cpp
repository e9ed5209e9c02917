#include "henon/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace henon {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double bump_down(double v) { return std::nextafter(v, -kInf); }
double bump_up(double v) { return std::nextafter(v, kInf); }

// Rounded sum plus the exact error term (Knuth two-sum).
struct SumResidual {
    double s;
    double err;
};

SumResidual two_sum(double a, double b) {
    double s = a + b;
    double bp = s - a;
    double err = (a - (s - bp)) + (b - bp);
    return {s, err};
}

double add_down(double a, double b) {
    auto [s, err] = two_sum(a, b);
    return err < 0 ? bump_down(s) : s;
}

double add_up(double a, double b) {
    auto [s, err] = two_sum(a, b);
    return err > 0 ? bump_up(s) : s;
}

double mul_down(double a, double b) {
    double p = a * b;
    double err = std::fma(a, b, -p);
    return err < 0 ? bump_down(p) : p;
}

double mul_up(double a, double b) {
    double p = a * b;
    double err = std::fma(a, b, -p);
    return err > 0 ? bump_up(p) : p;
}

double div_down(double a, double b) {
    double q = a / b;
    double rem = -std::fma(q, b, -a);
    bool true_below = (rem < 0) != (b < 0) && rem != 0;
    return true_below ? bump_down(q) : q;
}

double div_up(double a, double b) {
    double q = a / b;
    double rem = -std::fma(q, b, -a);
    bool true_above = (rem < 0) == (b < 0) && rem != 0;
    return true_above ? bump_up(q) : q;
}

double sqrt_down(double x) {
    double r = std::sqrt(x);
    double err = std::fma(r, r, -x);
    return err > 0 ? bump_down(r) : r;
}

double sqrt_up(double x) {
    double r = std::sqrt(x);
    double err = std::fma(r, r, -x);
    return err < 0 ? bump_up(r) : r;
}

// libm log is faithful but not proven correctly rounded; pay one ulp
// each way except at the exact point log(1) = 0.
double log_down(double x) { return x == 1.0 ? 0.0 : bump_down(std::log(x)); }
double log_up(double x) { return x == 1.0 ? 0.0 : bump_up(std::log(x)); }

}  // namespace

Interval::Interval(double l, double h) : lo(l), hi(h) {
    if (lo > hi) std::swap(lo, hi);
}

Interval operator+(Interval x, Interval y) {
    return {add_down(x.lo, y.lo), add_up(x.hi, y.hi)};
}

Interval operator-(Interval x, Interval y) {
    return {add_down(x.lo, -y.hi), add_up(x.hi, -y.lo)};
}

Interval operator-(Interval x) { return {-x.hi, -x.lo}; }

Interval operator*(Interval x, Interval y) {
    double lo = kInf, hi = -kInf;
    for (double p : {x.lo, x.hi}) {
        for (double q : {y.lo, y.hi}) {
            lo = std::min(lo, mul_down(p, q));
            hi = std::max(hi, mul_up(p, q));
        }
    }
    return {lo, hi};
}

Interval operator/(Interval x, Interval y) {
    if (y.lo <= 0 && y.hi >= 0)
        throw DomainError("interval division by an interval containing 0");
    double lo = kInf, hi = -kInf;
    for (double p : {x.lo, x.hi}) {
        for (double q : {y.lo, y.hi}) {
            lo = std::min(lo, div_down(p, q));
            hi = std::max(hi, div_up(p, q));
        }
    }
    return {lo, hi};
}

Interval sqrt(Interval x) {
    if (x.lo < 0) throw DomainError("interval sqrt of a partly negative interval");
    return {sqrt_down(x.lo), sqrt_up(x.hi)};
}

Interval log(Interval x) {
    if (x.lo <= 0) throw DomainError("interval log requires a strictly positive interval");
    return {log_down(x.lo), log_up(x.hi)};
}

Interval abs(Interval x) {
    if (x.lo >= 0) return x;
    if (x.hi <= 0) return {-x.hi, -x.lo};
    return {0.0, std::max(-x.lo, x.hi)};
}

bool contains(Interval i, double x) { return i.lo <= x && x <= i.hi; }

bool subset(Interval inner, Interval outer) {
    return outer.lo <= inner.lo && inner.hi <= outer.hi;
}

bool disjoint(Interval x, Interval y) { return x.hi < y.lo || y.hi < x.lo; }

Interval intersect(Interval x, Interval y) {
    if (disjoint(x, y)) throw EmptyInput("empty interval intersection");
    return {std::max(x.lo, y.lo), std::min(x.hi, y.hi)};
}

HullResult hull(const std::vector<Interval>& parts) {
    if (parts.empty()) throw EmptyInput("hull of an empty interval set");
    std::vector<Interval> sorted = parts;
    std::sort(sorted.begin(), sorted.end(),
              [](Interval a, Interval b) { return a.lo < b.lo; });
    HullResult out;
    out.box = sorted.front();
    double reach = sorted.front().hi;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].lo > reach) {
            out.gaps = true;
            out.gap_list.push_back({reach, sorted[i].lo});
        }
        reach = std::max(reach, sorted[i].hi);
    }
    out.box = {sorted.front().lo, reach};
    return out;
}

ComplexRect operator+(const ComplexRect& x, const ComplexRect& y) {
    return {x.re + y.re, x.im + y.im};
}

ComplexRect operator-(const ComplexRect& x, const ComplexRect& y) {
    return {x.re - y.re, x.im - y.im};
}

ComplexRect operator*(const ComplexRect& x, const ComplexRect& y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}

}  // namespace henon
