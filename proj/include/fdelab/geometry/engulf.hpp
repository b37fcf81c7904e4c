#pragma once

#include <cmath>
#include <limits>

#include "profile.hpp"

namespace fdelab {

/// Ambient comparison theta_o <= theta_{S,z} <= c K^(2p a_check) theta_o, with theta_o = S / R^2.
struct AmbientBounds {
    double theta_o = 0.0;
    double theta_S = 0.0;
    double ambient_ratio = 0.0;  ///< (mean over Q_{2S,2R})^((2-p)/p) / theta_o
    double constant = 0.0;       ///< theta_S / (K^(2p a_check) theta_o)
    bool lower_ok = false;
};

/// pre: Q_{2S,2R}(x_o,t_o) (centered, time length 4S) is K-sub-intrinsic for f.
inline AmbientBounds ambient_bounds(const ProfileBuilder& B, const ScalingProfile& P, const Point& x_o, double t_o) {
    require(!P.empty(), ErrorCode::ProfileMissing, "empty profile");
    const auto& c = B.consts();
    AmbientBounds a;
    a.theta_o = c.S / (c.R * c.R);
    const double mean = B.integrator().cylinder_mean(Cylinder::centered(x_o, t_o, 2.0 * c.S, 2.0 * c.R));
    a.ambient_ratio = (mean > 0.0 ? std::pow(mean, (2.0 - c.p) / c.p) : 0.0) / a.theta_o;
    require(a.ambient_ratio <= c.K, ErrorCode::NotSubIntrinsic,
            "ambient cylinder is not sub-intrinsic: ratio " + std::to_string(a.ambient_ratio));
    a.theta_S = P.theta.back();
    a.lower_ok = a.theta_S >= a.theta_o * (1.0 - 1e-12);
    a.constant = a.theta_S / (std::pow(c.K, 2.0 * c.p * c.a_check) * a.theta_o);
    return a;
}

struct EngulfResult {
    bool intersect = false;
    /// smallest grid ratio c1 = s'/s with Q(s,z) in Q(s',y) and Q(s,y) in Q(s',z); inf if none on the grid
    double c1 = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {
inline double min_engulf_ratio(const ScalingProfile& inner, const ScalingProfile& outer, std::size_t j, int n) {
    const Cylinder q = inner.cylinder(j);
    for (std::size_t k = j; k < outer.size(); ++k)
        if (outer.cylinder(k).contains(q, n)) return outer.s[k] / outer.s[j];
    return std::numeric_limits<double>::infinity();
}
}  // namespace detail

inline EngulfResult two_point_engulfing(const ScalingProfile& pz, const ScalingProfile& py, std::size_t j) {
    require(!pz.empty() && !py.empty(), ErrorCode::ProfileMissing, "both profiles are required");
    require(pz.size() == py.size() && pz.s.back() == py.s.back(), ErrorCode::ProfileMissing,
            "profiles live on different s-grids");
    require(j < pz.size(), ErrorCode::InvalidArgument, "s index out of range");
    const int n = pz.consts.n;
    EngulfResult r;
    r.intersect = pz.cylinder(j).intersects(py.cylinder(j), n);
    if (!r.intersect) return r;
    r.c1 = std::max(detail::min_engulf_ratio(pz, py, j, n), detail::min_engulf_ratio(py, pz, j, n));
    return r;
}

/// Height limit S / c_o with c_o = c K^(2p a_hat).
inline double engulf_height_limit(const GeometryConstants& c, double c_const) {
    return c.S / (c_const * std::pow(c.K, 2.0 * c.p * c.a_hat));
}

}  // namespace fdelab
