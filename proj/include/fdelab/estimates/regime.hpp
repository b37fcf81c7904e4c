#pragma once

#include <cmath>

#include "../grid/quadrature.hpp"

namespace fdelab {

enum class RegimeLabel { Degenerate, NonDegenerate };

inline const char* to_string(RegimeLabel r) { return r == RegimeLabel::Degenerate ? "DEGENERATE" : "NON_DEGENERATE"; }

struct Regime {
    RegimeLabel label = RegimeLabel::NonDegenerate;
    double epsilon = 0.1;
    double oscillation_ratio = 0.0;
    bool zero_solution = false;  ///< mean of u^(m+1) vanished; labeled non-degenerate by convention
};

/// ratio = (mean |u^m - mean u^m|^((m+1)/m))^(1/(m+1)) / (mean u^(m+1))^(1/(m+1)).
inline Regime regime_classify(const ScalarField& u, const Cylinder& Q, double epsilon, double m) {
    require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
    require(m > 0.0 && m <= 1.0, ErrorCode::InvalidExponent, "need 0 < m <= 1");
    const auto& g = u.grid();
    const Quadrature q = quadrature(g, Q);
    const auto v = u.values();
    const double lo = node_max(g, q, [&](std::size_t i) { return -v[i]; });
    require(lo <= 0.0, ErrorCode::NegativeBase, "regime classification needs u >= 0");
    Regime r;
    r.epsilon = epsilon;
    const double size = mean(g, q, [&](std::size_t i) { return std::pow(v[i], m + 1.0); });
    if (size == 0.0) {
        r.zero_solution = true;
        return r;
    }
    // centered on a node value so that a constant field gives exactly zero oscillation
    const double ref =
        q.time.k.empty() || q.space.nodes.empty() ? 0.0 : std::pow(v[g.index(q.time.k.front(), q.space.nodes.front())], m);
    const double avg = ref + mean(g, q, [&](std::size_t i) { return std::pow(v[i], m) - ref; });
    const double osc = mean(g, q, [&](std::size_t i) { return detail::abs_pow(std::pow(v[i], m) - avg, (m + 1.0) / m); });
    r.oscillation_ratio = std::pow(osc, 1.0 / (m + 1.0)) / std::pow(size, 1.0 / (m + 1.0));
    r.label = r.oscillation_ratio >= epsilon ? RegimeLabel::Degenerate : RegimeLabel::NonDegenerate;
    return r;
}

/**
 * Construction cylinder of radius r at (x, t) with length s = theta r^2, where
 * theta solves theta = (mean_Q u^(m+1))^((1-m)/(m+1)) by fixed-point iteration.
 * The returned cylinder is intrinsic up to the iteration residual.
 */
inline Cylinder intrinsic_cylinder(const ScalarField& u, const Point& x, double t, double r, double m, int iters = 60) {
    require(r > 0.0, ErrorCode::InvalidArgument, "radius must be positive");
    require(m > 0.0 && m < 1.0, ErrorCode::InvalidExponent, "need 0 < m < 1");
    const auto& g = u.grid();
    const double s_max = 2.0 * std::min(t - g.t_start(), g.t_end() - t);
    require(s_max > 0.0, ErrorCode::InvalidArgument, "time outside the grid");
    auto length = [&](double th) { return std::min(th * r * r, s_max); };
    double theta = std::pow(std::max(cylinder_mean(u, Cylinder::construction(x, t, length(1.0), r), m + 1.0), 0.0),
                            (1.0 - m) / (m + 1.0));
    require(theta > 0.0, ErrorCode::ZeroSolution, "u vanishes near the center");
    for (int it = 0; it < iters; ++it) {
        const double next = std::pow(cylinder_mean(u, Cylinder::construction(x, t, length(theta), r), m + 1.0),
                                     (1.0 - m) / (m + 1.0));
        const bool done = std::abs(next - theta) <= 1e-13 * theta;
        theta = next;
        if (done) break;
    }
    return Cylinder::construction(x, t, length(theta), r);
}

}  // namespace fdelab
