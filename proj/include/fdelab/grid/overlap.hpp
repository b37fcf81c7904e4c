#pragma once

#include <algorithm>
#include <cmath>

#include "params.hpp"

namespace fdelab::geom {

inline double interval_overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

namespace detail {

// Antiderivative of sqrt(r^2 - X^2).
inline double chord_primitive(double x, double r) {
    const double c = std::sqrt(std::max(0.0, r * r - x * x));
    const double q = std::clamp(x / r, -1.0, 1.0);
    return 0.5 * (x * c + r * r * std::asin(q));
}

// Area of {X^2 + Y^2 < r^2, X < x, Y < y}.
inline double quadrant_area(double x, double y, double r) {
    if (x <= -r || y <= -r) return 0.0;
    const double xe = std::min(x, r);
    const double A0 = chord_primitive(-r, r);
    if (y >= r) return 2.0 * (chord_primitive(xe, r) - A0);
    const double w = std::sqrt(std::max(0.0, r * r - y * y));
    double area = 0.0;
    // |X| >= w: the chord lies entirely below y when y > 0, above when y < 0.
    auto outer = [&](double a, double b) {
        if (b <= a || y < 0.0) return 0.0;
        return 2.0 * (chord_primitive(b, r) - chord_primitive(a, r));
    };
    auto middle = [&](double a, double b) {
        if (b <= a) return 0.0;
        return y * (b - a) + (chord_primitive(b, r) - chord_primitive(a, r));
    };
    area += outer(-r, std::min(-w, xe));
    area += middle(-w, std::min(w, xe));
    area += outer(w, xe);
    return area;
}

}  // namespace detail

/// Exact area of the disk B_r(c) intersected with [x0,x1] x [y0,y1].
inline double disk_rect_area(double cx, double cy, double r, double x0, double x1, double y0, double y1) {
    if (r <= 0.0 || x1 <= x0 || y1 <= y0) return 0.0;
    x0 -= cx;
    x1 -= cx;
    y0 -= cy;
    y1 -= cy;
    using detail::quadrant_area;
    const double a = quadrant_area(x1, y1, r) - quadrant_area(x0, y1, r) - quadrant_area(x1, y0, r) +
                     quadrant_area(x0, y0, r);
    return std::clamp(a, 0.0, (x1 - x0) * (y1 - y0));
}

/// Measure of B_r(c) intersected with the box [lo, hi] in R^n.
inline double ball_box_measure(int n, const Point& c, double r, const Point& lo, const Point& hi) {
    if (r <= 0.0) return 0.0;
    double near2 = 0.0, far2 = 0.0, box = 1.0;
    for (int a = 0; a < n; ++a) {
        if (hi[a] <= lo[a]) return 0.0;
        const double dn = std::max({lo[a] - c[a], 0.0, c[a] - hi[a]});
        const double df = std::max(std::abs(lo[a] - c[a]), std::abs(hi[a] - c[a]));
        near2 += dn * dn;
        far2 += df * df;
        box *= hi[a] - lo[a];
    }
    if (near2 >= r * r) return 0.0;
    if (far2 <= r * r) return box;
    switch (n) {
        case 1: return interval_overlap(c[0] - r, c[0] + r, lo[0], hi[0]);
        case 2: return disk_rect_area(c[0], c[1], r, lo[0], hi[0], lo[1], hi[1]);
        default: {
            // Slices in the last axis with exact disk areas; midpoint rule in z.
            constexpr int slabs = 64;
            const double z0 = std::max(lo[2], c[2] - r), z1 = std::min(hi[2], c[2] + r);
            if (z1 <= z0) return 0.0;
            const double dz = (z1 - z0) / slabs;
            double v = 0.0;
            for (int i = 0; i < slabs; ++i) {
                const double z = z0 + (i + 0.5) * dz - c[2];
                const double rz = std::sqrt(std::max(0.0, r * r - z * z));
                v += disk_rect_area(c[0], c[1], rz, lo[0], hi[0], lo[1], hi[1]) * dz;
            }
            return v;
        }
    }
}

}  // namespace fdelab::geom
