#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <vector>

#include "cylinder.hpp"
#include "overlap.hpp"
#include "scalar_field.hpp"

namespace fdelab {

/// Spatial nodes whose control volume meets a ball, with exact overlap measures.
struct SpaceWeights {
    std::vector<std::size_t> nodes;
    std::vector<double> w;
    double total = 0.0;
};

/// Time nodes whose control interval meets a window, with overlap lengths.
struct TimeWeights {
    std::vector<std::size_t> k;
    std::vector<double> w;
    double total = 0.0;
};

struct Quadrature {
    SpaceWeights space;
    TimeWeights time;
    double measure = 0.0;  ///< |Q intersected with the grid domain|
    bool clipped = false;  ///< Q sticks out of the domain
};

namespace detail {
inline std::pair<std::size_t, std::size_t> node_range(double a, double b, double lo, double step, std::size_t count) {
    const double u0 = std::floor((a - lo) / step - 0.5);
    const double u1 = std::ceil((b - lo) / step + 0.5);
    const std::size_t i0 = u0 <= 0.0 ? 0 : std::min(count - 1, static_cast<std::size_t>(u0));
    const std::size_t i1 = u1 <= 0.0 ? 0 : std::min(count - 1, static_cast<std::size_t>(u1));
    return {i0, i1};
}
}  // namespace detail

inline SpaceWeights ball_weights(const SpaceTimeGrid& g, const Point& c, double r) {
    SpaceWeights out;
    const int n = g.dim();
    std::array<std::pair<std::size_t, std::size_t>, 3> range{{{0, 0}, {0, 0}, {0, 0}}};
    for (int a = 0; a < n; ++a) {
        if (c[a] + r < g.lo(a) || c[a] - r > g.hi(a)) return out;
        range[a] = detail::node_range(c[a] - r, c[a] + r, g.lo(a), g.h(), g.nodes(a));
    }
    std::array<std::size_t, 3> idx{0, 0, 0};
    Point lo{0, 0, 0}, hi{0, 0, 0};
    for (idx[0] = range[0].first; idx[0] <= range[0].second; ++idx[0]) {
        std::tie(lo[0], hi[0]) = g.cell(0, idx[0]);
        for (idx[1] = range[1].first; idx[1] <= range[1].second; ++idx[1]) {
            if (n > 1) std::tie(lo[1], hi[1]) = g.cell(1, idx[1]);
            for (idx[2] = range[2].first; idx[2] <= range[2].second; ++idx[2]) {
                if (n > 2) std::tie(lo[2], hi[2]) = g.cell(2, idx[2]);
                const double w = geom::ball_box_measure(n, c, r, lo, hi);
                if (w > 0.0) {
                    out.nodes.push_back(g.space_index(idx));
                    out.w.push_back(w);
                    out.total += w;
                }
            }
        }
    }
    return out;
}

inline TimeWeights window_weights(const SpaceTimeGrid& g, double a, double b) {
    TimeWeights out;
    if (b <= g.t_start() || a >= g.t_end() || b <= a) return out;
    const auto [k0, k1] = detail::node_range(a, b, g.t_start(), g.dt(), g.time_nodes());
    for (std::size_t k = k0; k <= k1; ++k) {
        const auto [c0, c1] = g.time_cell(k);
        const double w = geom::interval_overlap(c0, c1, a, b);
        if (w > 0.0) {
            out.k.push_back(k);
            out.w.push_back(w);
            out.total += w;
        }
    }
    return out;
}

inline Quadrature quadrature(const SpaceTimeGrid& g, const Cylinder& q) {
    Quadrature out;
    out.time = window_weights(g, q.t_lo(), q.t_hi());
    out.space = ball_weights(g, q.x, q.rho);
    out.measure = out.time.total * out.space.total;
    out.clipped = !q.inside(g);
    require(out.measure > 0.0, ErrorCode::EmptyIntersection, "cylinder misses the grid domain: " + q.describe(g.dim()));
    return out;
}

/// Sum over the quadrature of weight * fn(linear node index).
template <class Fn>
double integrate(const SpaceTimeGrid& g, const Quadrature& q, Fn&& fn) {
    double total = 0.0;
    for (std::size_t a = 0; a < q.time.k.size(); ++a) {
        const std::size_t base = q.time.k[a] * g.space_size();
        double inner = 0.0;
        for (std::size_t b = 0; b < q.space.nodes.size(); ++b) inner += q.space.w[b] * fn(base + q.space.nodes[b]);
        total += q.time.w[a] * inner;
    }
    return total;
}

template <class Fn>
double mean(const SpaceTimeGrid& g, const Quadrature& q, Fn&& fn) {
    return integrate(g, q, fn) / q.measure;
}

/// Max of fn over nodes carrying positive weight (the grid surrogate of ess sup).
template <class Fn>
double node_max(const SpaceTimeGrid& g, const Quadrature& q, Fn&& fn) {
    double m = -INFINITY;
    for (std::size_t k : q.time.k)
        for (std::size_t j : q.space.nodes) m = std::max(m, fn(g.index(k, j)));
    return m;
}

namespace detail {
inline bool is_integer(double e) { return std::floor(e) == e; }

inline double abs_pow(double v, double e) {
    const double a = std::abs(v);
    if (e == 1.0) return a;
    if (e == 2.0) return a * a;
    return a == 0.0 ? 0.0 : std::pow(a, e);
}
}  // namespace detail

/// mean over Q of |g|^exponent by midpoint quadrature with fractional boundary weights.
inline double cylinder_mean(const ScalarField& field, const Cylinder& cyl, double exponent) {
    require(exponent > 0.0, ErrorCode::InvalidExponent, "mean exponent must be positive");
    const auto& g = field.grid();
    const Quadrature q = quadrature(g, cyl);
    const auto v = field.values();
    if (!detail::is_integer(exponent) && !field.nonnegative()) {
        const double lo = node_max(g, q, [&](std::size_t i) { return -v[i]; });
        require(lo <= 0.0, ErrorCode::NegativeBase, "fractional exponent applied to a negative value");
    }
    return mean(g, q, [&](std::size_t i) { return detail::abs_pow(v[i], exponent); });
}

/**
 * (g)^eta = (1/|eta|_1) int g eta dx on B_r(c) at the time slice nearest t.
 * eta is evaluated at nodes and integrated with the ball-overlap weights.
 */
template <class Eta>
double weighted_slice_mean(const ScalarField& field, double t, const Point& c, double r, Eta&& eta) {
    const auto& g = field.grid();
    const std::size_t k = g.nearest_time(t);
    const SpaceWeights sw = ball_weights(g, c, r);
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < sw.nodes.size(); ++b) {
        const double e = eta(g.point(sw.nodes[b]));
        require(e >= 0.0, ErrorCode::InvalidArgument, "weight must be nonnegative");
        num += sw.w[b] * e * field.at(k, sw.nodes[b]);
        den += sw.w[b] * e;
    }
    require(den > 0.0, ErrorCode::ZeroWeight, "weight vanishes on the ball");
    return num / den;
}

}  // namespace fdelab
