#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "../grid/gradient.hpp"
#include "../grid/params.hpp"
#include "../grid/quadrature.hpp"

namespace fdelab {

/// A solution snapshot with the derived fields every estimate needs.
struct EstimateFields {
    ScalarField u;
    ScalarField f;      ///< zero when the equation has no source
    ScalarField grad2;  ///< |D u^m|^2
    ModelParams params;

    double m() const { return params.m; }
    const SpaceTimeGrid& grid() const { return u.grid(); }

    static EstimateFields make(const ScalarField& u, const ScalarField* f, const ModelParams& P) {
        require(u.grid().dim() == P.n, ErrorCode::InvalidArgument, "field dimension differs from the model");
        require(u.min_value() >= 0.0, ErrorCode::NegativeBase, "estimates need u >= 0");
        if (f) require(f->grid().size() == u.grid().size(), ErrorCode::InvalidArgument, "f lives on another grid");
        return EstimateFields{u, f ? *f : ScalarField::constant(u.grid(), 0.0, "f"), grad_energy_field(u, P.m), P};
    }
};

namespace detail {

inline double upow(double v, double e) { return v <= 0.0 ? 0.0 : std::pow(v, e); }

inline void require_inside(const SpaceTimeGrid& g, const Cylinder& Q, const char* what) {
    require(Q.inside(g), ErrorCode::DilationEscapesDomain, std::string(what) + " leaves the grid: " + Q.describe(g.dim()));
}

/// Time nodes strictly inside (lo, hi), or with hi included; the nearest node if none is.
inline std::vector<std::size_t> nodes_in_window(const SpaceTimeGrid& g, double lo, double hi, bool closed_top = false) {
    std::vector<std::size_t> ks;
    for (std::size_t k = 0; k < g.time_nodes(); ++k) {
        const double t = g.time(k);
        if (t > lo && (t < hi || (closed_top && t <= hi))) ks.push_back(k);
    }
    if (ks.empty()) ks.push_back(g.nearest_time(0.5 * (lo + hi)));
    return ks;
}

/// sum_j w_j fn(index(k, j)) over B_rho(x) at time node k.
template <class Fn>
double slice_integral(const SpaceTimeGrid& g, std::size_t k, const Point& x, double rho, Fn&& fn) {
    const SpaceWeights sw = ball_weights(g, x, rho);
    double s = 0.0;
    for (std::size_t b = 0; b < sw.nodes.size(); ++b) s += sw.w[b] * fn(g.index(k, sw.nodes[b]));
    return s;
}

/// max over k in ks of the slice integral.
template <class Fn>
double slice_sup(const SpaceTimeGrid& g, const std::vector<std::size_t>& ks, const Point& x, double rho, Fn&& fn) {
    double m = 0.0;
    for (std::size_t k : ks) m = std::max(m, slice_integral(g, k, x, rho, fn));
    return m;
}

template <class Fn>
double space_time_integral(const SpaceTimeGrid& g, const Cylinder& Q, Fn&& fn) {
    return integrate(g, quadrature(g, Q), fn);
}

template <class Fn>
double space_time_mean(const SpaceTimeGrid& g, const Cylinder& Q, Fn&& fn) {
    return mean(g, quadrature(g, Q), fn);
}

/**
 * Grid surrogate of ess sup over Q: max over nodes with |x - x0| < rho and t in
 * the window (top end included when closed_top). Falls back to the node nearest
 * the center when no node lies inside.
 */
template <class Fn>
double node_sup(const SpaceTimeGrid& g, const Cylinder& Q, Fn&& fn, bool closed_top = false) {
    const int n = g.dim();
    const auto ks = nodes_in_window(g, Q.t_lo(), Q.t_hi(), closed_top);
    const SpaceWeights sw = ball_weights(g, Q.x, Q.rho);
    double best = -INFINITY;
    for (std::size_t j : sw.nodes) {
        if (!(distance(g.point(j), Q.x, n) < Q.rho)) continue;
        for (std::size_t k : ks) best = std::max(best, fn(g.index(k, j)));
    }
    if (best == -INFINITY) {
        std::size_t jn = sw.nodes.empty() ? 0 : sw.nodes.front();
        double dn = INFINITY;
        for (std::size_t j : sw.nodes)
            if (distance(g.point(j), Q.x, n) < dn) dn = distance(g.point(j), Q.x, n), jn = j;
        for (std::size_t k : ks) best = std::max(best, fn(g.index(k, jn)));
    }
    return best;
}

}  // namespace detail
}  // namespace fdelab
