#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "../geometry/profile.hpp"
#include "fields.hpp"
#include "report.hpp"

namespace fdelab {

/**
 * Cylinders with lower vertex (x0, t0): Q_t = B_{r(t)} x (t0, t0 + t] and
 * Q_{(1+sigma)t} = B_{r((1+sigma)t)} x (t0 - sigma t, t0 + t]. Radii come from the
 * profile based at (x0, t0), whose cylinder of size 2t is exactly Q_{2t}.
 */
struct VertexGeometry {
    Point x{0, 0, 0};
    double t0 = 0.0, t = 0.0;
    double K = 1.0;
    std::vector<double> sigmas;  ///< ascending, starts at 0 and ends at 1
    std::vector<double> radii;   ///< r((1 + sigma) t)

    double r_t() const { return radii.front(); }
    double r_2t() const { return radii.back(); }
    double theta_t() const { return t / (r_t() * r_t()); }
    double theta_2t() const { return 2.0 * t / (r_2t() * r_2t()); }
    Cylinder Q(std::size_t i) const { return Cylinder::window(x, t0 - sigmas[i] * t, t0 + t, radii[i]); }
    Cylinder Qt() const { return Q(0); }
    Cylinder Q2t() const { return Q(sigmas.size() - 1); }
    Cylinder Q3half() const {
        for (std::size_t i = 0; i < sigmas.size(); ++i)
            if (sigmas[i] == 0.5) return Q(i);
        fail(ErrorCode::InvalidArgument, "sigma grid lacks 1/2");
    }
};

inline VertexGeometry vertex_geometry(const ProfileBuilder& B, const ScalingProfile& P, double t,
                                      std::vector<double> sigmas = {0.0, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    require(t > 0.0 && 2.0 * t <= P.s.back() * (1.0 + 1e-12), ErrorCode::InvalidArgument, "need 0 < 2t <= S");
    require(sigmas.size() >= 2 && sigmas.front() == 0.0 && sigmas.back() == 1.0, ErrorCode::InvalidArgument,
            "sigma grid must run from 0 to 1");
    VertexGeometry V;
    V.x = P.x;
    V.t0 = P.t;
    V.t = t;
    V.K = P.consts.K;
    V.sigmas = std::move(sigmas);
    for (double s : V.sigmas) V.radii.push_back(B.radius_at(P, (1.0 + s) * t));
    for (double r : V.radii) require(r > 0.0, ErrorCode::InvalidArgument, "zero radius in the vertex family");
    return V;
}

struct SupBoundReport {
    InequalityReport report;
    double intrinsic_ratio = 0.0;  ///< rho* / theta_t on Q_t
    double f_small_lhs = 0.0, f_small_rhs = 0.0;
    std::vector<double> sigma_ratio;  ///< sup over Q_{(1+sigma)t} divided by the rhs mean
    double fitted_q = 0.0;            ///< slope of log ratio against -log(1 - sigma), sigma < 1
};

namespace detail {

inline void check_vertex_hypotheses(const EstimateFields& F, const VertexGeometry& V, double f_c, SupBoundReport& out) {
    const auto& g = F.grid();
    const double m = F.m();
    require_inside(g, V.Q2t(), "vertex cylinder Q_2t");
    const IntrinsicCheck ic = check_intrinsic(F.u, V.Qt(), V.theta_t(), V.K, m);
    out.intrinsic_ratio = ic.ratio;
    require(ic.intrinsic, ErrorCode::NotIntrinsic,
            "Q_t is not intrinsic: rho*/theta = " + std::to_string(ic.ratio) + " with K = " + std::to_string(V.K));
    const auto f = F.f.values();
    out.f_small_lhs = V.r_2t() * V.r_2t() * std::max(0.0, node_sup(g, V.Q2t(), [&](std::size_t i) { return f[i] * f[i]; }));
    out.f_small_rhs = f_c / V.t * std::pow(V.theta_2t(), (1.0 + m) / (1.0 - m));
    require(out.f_small_lhs <= out.f_small_rhs, ErrorCode::FSmallnessFails,
            "sup r(2t)^2 f^2 = " + std::to_string(out.f_small_lhs) + " exceeds " + std::to_string(out.f_small_rhs));
}

}  // namespace detail

/**
 * max of u over B_{r(t)} x [t0, t0 + t] against (mean over Q_2t of u^p)^(1/p).
 * The sigma sweep records sup over Q_{(1+sigma)t} for the blow-up fit.
 */
inline SupBoundReport sup_bound(const EstimateFields& F, const VertexGeometry& V, double p_mean, double f_c = 1.0) {
    require(p_mean > 0.0, ErrorCode::InvalidExponent, "mean exponent must be positive");
    SupBoundReport out;
    detail::check_vertex_hypotheses(F, V, f_c, out);
    const auto& g = F.grid();
    const auto u = F.u.values();
    auto id = [&](std::size_t i) { return u[i]; };
    const Cylinder Qt = V.Qt(), Q2 = V.Q2t();
    const double lhs = detail::node_sup(g, Cylinder::window(V.x, V.t0 - 1e-12 * V.t, V.t0 + V.t, Qt.rho), id, true);
    const double rhs = std::pow(detail::space_time_mean(g, Q2, [&](std::size_t i) { return detail::upow(u[i], p_mean); }),
                                1.0 / p_mean);
    out.report = InequalityReport::make("sup_bound_p" + std::to_string(p_mean).substr(0, 4), lhs, {{"power_mean", rhs}},
                                        INFINITY, Qt.describe(g.dim()));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = 0; i + 1 < V.sigmas.size(); ++i) {
        const double ratio = rhs > 0.0 ? detail::node_sup(g, V.Q(i), id, true) / rhs : 0.0;
        out.sigma_ratio.push_back(ratio);
        if (ratio > 0.0) {
            const double x = -std::log(1.0 - V.sigmas[i]), y = std::log(ratio);
            sx += x, sy += y, sxx += x * x, sxy += x * y, ++cnt;
        }
    }
    const double den = cnt * sxx - sx * sx;
    out.fitted_q = cnt >= 2 && den > 0.0 ? (cnt * sxy - sx * sy) / den : 0.0;
    return out;
}

struct ReverseHolderReport {
    InequalityReport report;
    bool jensen_small = true;  ///< power-mean order on Q_{3t/2}
    bool jensen_large = true;  ///< power-mean order on Q_2t
};

/// (mean over Q_{3t/2} of u^(m+1))^(1/(m+1)) against (mean over Q_2t of u^m)^(1/m).
inline ReverseHolderReport reverse_holder_u(const EstimateFields& F, const VertexGeometry& V, double f_c = 1.0) {
    SupBoundReport hyp;
    detail::check_vertex_hypotheses(F, V, f_c, hyp);
    const auto& g = F.grid();
    const double m = F.m();
    const auto u = F.u.values();
    auto pm = [&](const Cylinder& Q, double e) {
        return std::pow(detail::space_time_mean(g, Q, [&](std::size_t i) { return detail::upow(u[i], e); }), 1.0 / e);
    };
    const Cylinder Qs = V.Q3half(), Ql = V.Q2t();
    ReverseHolderReport out;
    const double lhs = pm(Qs, m + 1.0), rhs = pm(Ql, m);
    out.report = InequalityReport::make("reverse_holder_u", lhs, {{"mean_power_m", rhs}}, INFINITY, Qs.describe(g.dim()));
    out.jensen_small = pm(Qs, m) <= lhs * (1.0 + 1e-12);
    out.jensen_large = rhs <= pm(Ql, m + 1.0) * (1.0 + 1e-12);
    return out;
}

/**
 * rho* / theta on the profile cylinders of size a s for each a, with s = P.s[j]
 * intrinsic. The recorded constant is max(ratio, 1/ratio).
 */
inline std::vector<double> intrinsic_consistency(const ScalarField& u, const ProfileBuilder& B, const ScalingProfile& P,
                                                 std::size_t j, const std::vector<double>& factors) {
    require(j < P.size(), ErrorCode::InvalidArgument, "level out of range");
    const double m = P.consts.m();
    std::vector<double> out;
    for (double a : factors) {
        require(a > 1.0 && a <= 2.0, ErrorCode::InvalidArgument, "factor must lie in (1, 2]");
        const double s = a * P.s[j];
        require(s <= P.s.back() * (1.0 + 1e-12), ErrorCode::InvalidArgument, "a s exceeds S");
        const double r = B.radius_at(P, std::min(s, P.s.back()));
        const IntrinsicCheck c = check_intrinsic(u, Cylinder::construction(P.x, P.t, s, r), s / (r * r), P.consts.K, m);
        out.push_back(std::max(c.ratio, c.ratio > 0.0 ? 1.0 / c.ratio : INFINITY));
    }
    return out;
}

}  // namespace fdelab
