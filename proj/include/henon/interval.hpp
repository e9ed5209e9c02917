#pragma once

#include <vector>

#include "henon/errors.hpp"

namespace henon {

/**
 * Closed real interval [lo, hi] with outward-rounded arithmetic.
 *
 * Every operation guarantees that the exact real result of the same
 * expression, evaluated on any member points, lies inside the returned
 * interval. Rounding is realized by nextafter bumps applied only when a
 * residual term proves the rounded endpoint fell on the wrong side, so
 * exactly representable results stay exact.
 */
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    explicit Interval(double v) : lo(v), hi(v) {}
    Interval(double l, double h);

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

Interval operator+(Interval x, Interval y);
Interval operator-(Interval x, Interval y);
Interval operator*(Interval x, Interval y);
Interval operator/(Interval x, Interval y);
Interval operator-(Interval x);

Interval sqrt(Interval x);
Interval log(Interval x);
Interval abs(Interval x);

bool contains(Interval i, double x);
bool subset(Interval inner, Interval outer);
bool disjoint(Interval x, Interval y);
Interval intersect(Interval x, Interval y);

/// Smallest interval containing all inputs, plus whether their union,
/// taken as a point set, leaves gaps inside the hull.
struct HullResult {
    Interval box;
    bool gaps = false;
    std::vector<Interval> gap_list;
};

HullResult hull(const std::vector<Interval>& parts);

/// Componentwise rectangle enclosing a set of complex numbers.
struct ComplexRect {
    Interval re;
    Interval im;
};

ComplexRect operator+(const ComplexRect& x, const ComplexRect& y);
ComplexRect operator-(const ComplexRect& x, const ComplexRect& y);
ComplexRect operator*(const ComplexRect& x, const ComplexRect& y);

}  // namespace henon
