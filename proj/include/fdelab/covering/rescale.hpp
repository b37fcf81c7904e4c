#pragma once

#include <cmath>
#include <optional>

#include "../grid/gradient.hpp"
#include "../grid/interpolate.hpp"
#include "../grid/quadrature.hpp"

namespace fdelab {

/// Ambient cylinder Q_{2 theta_o R^2, 2R}(x_o, t_o) and the unit grid on [-2,2]^n x [-2,2].
struct RescaleSpec {
    Point x_o{0, 0, 0};
    double t_o = 0.0;
    double R = 1.0;
    double theta_o = 1.0;
    double C = 1.0;  ///< sub-intrinsic constant of the ambient cylinder
    std::size_t nodes = 33;
    std::size_t time_nodes = 33;
};

struct ScaledProblem {
    ScalarField u;  ///< u~(y,s) = lambda_o u(x_o + R y, t_o + theta_o R^2 s)
    ScalarField f;  ///< f~ = lambda_o^m R^2 f(...)
    double lambda_o = 1.0;
    double ambient_ratio = 0.0;  ///< (mean of u^(m+1) on the ambient cylinder)^((1-m)/(m+1)) / theta_o
    RescaleSpec spec;
};

inline Cylinder ambient_cylinder(const RescaleSpec& s) {
    return Cylinder::centered(s.x_o, s.t_o, 2.0 * s.theta_o * s.R * s.R, 2.0 * s.R);
}

inline SpaceTimeGrid unit_grid(int n, std::size_t nodes, std::size_t time_nodes) {
    return SpaceTimeGrid::cube(n, -2.0, 2.0, nodes, -2.0, 2.0, time_nodes);
}

/**
 * Rescales (u, f) from the ambient cylinder to Q_{2,2}. u_exact, when given,
 * is sampled instead of interpolating u; the sub-intrinsic check always uses
 * the grid field u.
 */
template <class Exact>
ScaledProblem rescale_to_unit(const ScalarField& u, const ScalarField* f, double m, const RescaleSpec& s,
                              Exact&& u_exact) {
    require(m > 0.0 && m < 1.0, ErrorCode::InvalidExponent, "need 0 < m < 1");
    require(s.R > 0.0 && s.theta_o > 0.0 && s.C > 0.0, ErrorCode::InvalidArgument, "R, theta_o, C must be positive");
    const auto& g = u.grid();
    const Cylinder amb = ambient_cylinder(s);
    require(amb.inside(g), ErrorCode::DilationEscapesDomain, "ambient cylinder leaves the grid: " + amb.describe(g.dim()));
    const double mean = cylinder_mean(u, amb, m + 1.0);
    ScaledProblem out{ScalarField(), ScalarField(), std::pow(s.theta_o, 1.0 / (m - 1.0)), 0.0, s};
    out.ambient_ratio = (mean > 0.0 ? std::pow(mean, (1.0 - m) / (m + 1.0)) : 0.0) / s.theta_o;
    require(out.ambient_ratio <= s.C * (1.0 + 1e-12), ErrorCode::NotSubIntrinsic,
            "ambient cylinder is not sub-intrinsic: ratio " + std::to_string(out.ambient_ratio));
    const auto ug = unit_grid(g.dim(), s.nodes, s.time_nodes);
    const double lo = out.lambda_o, tscale = s.theta_o * s.R * s.R;
    auto to_source = [&](const Point& y, double t, Point& x) {
        for (int a = 0; a < 3; ++a) x[a] = a < g.dim() ? s.x_o[a] + s.R * y[a] : 0.0;
        return s.t_o + tscale * t;
    };
    out.u = ScalarField::sample(
        ug,
        [&](const Point& y, double t) {
            Point x;
            const double ts = to_source(y, t, x);
            return lo * u_exact(x, ts);
        },
        true, "u~");
    const double fscale = std::pow(lo, m) * s.R * s.R;
    out.f = f ? ScalarField::sample(
                    ug,
                    [&](const Point& y, double t) {
                        Point x;
                        const double ts = to_source(y, t, x);
                        return fscale * interpolate(*f, x, ts);
                    },
                    false, "f~")
              : ScalarField::constant(ug, 0.0, "f~");
    return out;
}

inline ScaledProblem rescale_to_unit(const ScalarField& u, const ScalarField* f, double m, const RescaleSpec& s) {
    return rescale_to_unit(u, f, m, s, [&](const Point& x, double t) { return interpolate(u, x, t); });
}

}  // namespace fdelab
