#pragma once

#include <cmath>
#include <string>

#include "fields.hpp"
#include "report.hpp"

namespace fdelab {

enum class EnergyVariant { Full, Modified };

/**
 * Energy estimate on Q_{theta rho^2, rho}(z0) against Q_{theta (2rho)^2, 2rho}(z0),
 * centered cylinders, integrals (not means) on both sides.
 */
inline InequalityReport energy_estimate(const EstimateFields& F, const Point& x0, double t0, double rho, double theta,
                                        double c_level, EnergyVariant variant) {
    require(rho > 0.0 && theta > 0.0 && c_level >= 0.0, ErrorCode::InvalidArgument, "need rho, theta > 0, c >= 0");
    const auto& g = F.grid();
    const double m = F.m();
    const Cylinder Q1 = Cylinder::centered(x0, t0, theta * rho * rho, rho);
    const Cylinder Q2 = Cylinder::centered(x0, t0, theta * 4.0 * rho * rho, 2.0 * rho);
    detail::require_inside(g, Q2, "energy cylinder");
    const auto u = F.u.values(), f = F.f.values(), G = F.grad2.values();
    const double cm = detail::upow(c_level, m);
    auto dm = [&](std::size_t i) { return std::abs(detail::upow(u[i], m) - cm); };
    auto du = [&](std::size_t i) { return std::abs(u[i] - c_level); };

    const auto ks = detail::nodes_in_window(g, Q1.t_lo(), Q1.t_hi());
    InequalityReport r;
    r.lhs_terms.push_back(
        {"sup_power", detail::slice_sup(g, ks, x0, rho, [&](std::size_t i) { return std::pow(dm(i), (m + 1.0) / m); })});
    if (variant == EnergyVariant::Full)
        r.lhs_terms.push_back({"sup_product", detail::slice_sup(g, ks, x0, rho, [&](std::size_t i) { return dm(i) * du(i); })});
    r.lhs_terms.push_back({"gradient", detail::space_time_integral(g, Q1, [&](std::size_t i) { return G[i]; })});
    for (const auto& t : r.lhs_terms) r.lhs += t.second;

    const double scale_t = 1.0 / (theta * rho * rho), scale_x = 1.0 / (rho * rho);
    if (variant == EnergyVariant::Full) {
        r.rhs_terms.push_back({"time", scale_t * detail::space_time_integral(g, Q2, [&](std::size_t i) { return dm(i) * du(i); })});
        r.rhs_terms.push_back({"space", scale_x * detail::space_time_integral(g, Q2, [&](std::size_t i) { return dm(i) * dm(i); })});
    } else {
        r.rhs_terms.push_back(
            {"time", scale_t * detail::space_time_integral(g, Q2, [&](std::size_t i) { return std::pow(du(i), m + 1.0); })});
        r.rhs_terms.push_back(
            {"space", scale_x * detail::space_time_integral(g, Q2, [&](std::size_t i) { return std::pow(du(i), 2.0 * m); })});
    }
    r.rhs_terms.push_back({"source", rho * rho * detail::space_time_integral(g, Q2, [&](std::size_t i) { return f[i] * f[i]; })});
    r.name = variant == EnergyVariant::Full ? "energy_full" : "energy_modified";
    r.geometry = Q2.describe(g.dim());
    r.finish();
    return r;
}

/**
 * On a K-sub-intrinsic Q_{s, sqrt(s/theta)}(z0):
 * (1/s) sup_t mean_{B_{sqrt(s/4theta)}} u^(m+1) + mean over Q_{s/2, sqrt(s/4theta)} of |Du^m|^2
 * against theta^((m+1)/(1-m)) / s + sup_Q (s/theta) f^2.
 */
inline InequalityReport subintrinsic_energy(const EstimateFields& F, const Point& x0, double t0, double s, double theta,
                                            double K) {
    require(s > 0.0 && theta > 0.0 && K >= 1.0, ErrorCode::InvalidArgument, "need s, theta > 0 and K >= 1");
    const auto& g = F.grid();
    const double m = F.m();
    require(m < 1.0, ErrorCode::InvalidExponent, "sub-intrinsic energy needs m < 1");
    const Cylinder Q = Cylinder::centered(x0, t0, s, std::sqrt(s / theta));
    const Cylinder Qh = Cylinder::centered(x0, t0, 0.5 * s, std::sqrt(s / (4.0 * theta)));
    detail::require_inside(g, Q, "sub-intrinsic cylinder");
    const auto u = F.u.values(), f = F.f.values(), G = F.grad2.values();
    auto up = [&](std::size_t i) { return detail::upow(u[i], m + 1.0); };
    const double size = std::pow(detail::space_time_mean(g, Q, up), (1.0 - m) / (m + 1.0));
    require(size <= K * theta * (1.0 + 1e-12), ErrorCode::NotSubIntrinsic,
            "mean^((1-m)/(m+1)) = " + std::to_string(size) + " exceeds K theta = " + std::to_string(K * theta));

    const auto ks = detail::nodes_in_window(g, Qh.t_lo(), Qh.t_hi());
    const double ball = ball_weights(g, x0, Qh.rho).total;
    InequalityReport r;
    r.lhs_terms.push_back({"sup_mean", detail::slice_sup(g, ks, x0, Qh.rho, up) / ball / s});
    r.lhs_terms.push_back({"gradient", detail::space_time_mean(g, Qh, [&](std::size_t i) { return G[i]; })});
    r.lhs = r.lhs_terms[0].second + r.lhs_terms[1].second;
    r.rhs_terms.push_back({"scaling", std::pow(theta, (m + 1.0) / (1.0 - m)) / s});
    r.rhs_terms.push_back({"source", s / theta * std::max(0.0, detail::node_sup(g, Q, [&](std::size_t i) { return f[i] * f[i]; }))});
    r.name = "subintrinsic_energy";
    r.geometry = Q.describe(g.dim());
    r.finish();
    return r;
}

/// Same estimate with Q itself as the sub-intrinsic cylinder: s = half length, theta = s / rho^2.
inline InequalityReport subintrinsic_energy(const EstimateFields& F, const Cylinder& Q, double K) {
    return subintrinsic_energy(F, Q.x, Q.t, Q.half, Q.half / (Q.rho * Q.rho), K);
}

/// Product cutoff zeta = phi(|x - x0|) psi(t) on B_{2rho} x (t0 - T, t0].
struct ZetaSpec {
    double plateau = 0.5;  ///< phi = 1 on B_{plateau * 2rho}, linear down to 0 at 2rho
    double ramp = 0.5;     ///< psi rises linearly from 0 over this fraction of T; 0 means psi = 1
};

/**
 * Truncated energy inequality for (u^m - k^m)_+ on the backward cylinder
 * B_{2rho}(x0) x (t0 - theta (2rho)^2, t0]. The bottom-time term (points with
 * u > k only) is moved to the rhs so the lhs stays nonnegative; it vanishes when
 * the cutoff ramps up from zero.
 */
inline InequalityReport truncation_energy(const EstimateFields& F, const Point& x0, double t0, double rho,
                                          double theta, double k_level, const ZetaSpec& zs = {}) {
    require(k_level > 0.0, ErrorCode::InvalidArgument, "truncation level must be positive");
    require(rho > 0.0 && theta > 0.0, ErrorCode::InvalidArgument, "need rho, theta > 0");
    require(zs.plateau >= 0.0 && zs.plateau < 1.0 && zs.ramp >= 0.0 && zs.ramp <= 1.0, ErrorCode::InvalidArgument,
            "bad cutoff spec");
    const auto& g = F.grid();
    const int n = g.dim();
    const double m = F.m();
    const double T = theta * 4.0 * rho * rho, R2 = 2.0 * rho, tb = t0 - T;
    const Cylinder Q = Cylinder::window(x0, tb, t0, R2);
    detail::require_inside(g, Q, "truncation cylinder");
    const double km = std::pow(k_level, m);
    const double inner = zs.plateau * R2, slope = 1.0 / (R2 - inner);
    const auto u = F.u.values(), f = F.f.values();
    const std::size_t S = g.space_size();

    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::max(0.0, detail::upow(u[i], m) - km);
    const ScalarField wf(g, w, true, "w");
    const VectorField Dw = discrete_gradient(wf);

    auto phi = [&](std::size_t i) {
        const double d = distance(g.point(i % S), x0, n);
        return d <= inner ? 1.0 : std::max(0.0, 1.0 - (d - inner) * slope);
    };
    auto dphi = [&](std::size_t i) {
        const double d = distance(g.point(i % S), x0, n);
        return d > inner && d < R2 ? slope : 0.0;
    };
    auto psi = [&](double t) { return zs.ramp == 0.0 ? 1.0 : std::clamp((t - tb) / (zs.ramp * T), 0.0, 1.0); };
    auto dpsi = [&](double t) { return zs.ramp == 0.0 || t - tb >= zs.ramp * T ? 0.0 : 1.0 / (zs.ramp * T); };
    auto time_of = [&](std::size_t i) { return g.time(i / S); };
    auto zeta = [&](std::size_t i) { return phi(i) * psi(time_of(i)); };

    InequalityReport r;
    const auto ks = detail::nodes_in_window(g, tb, t0, true);
    r.lhs_terms.push_back({"sup_truncated", detail::slice_sup(g, ks, x0, R2, [&](std::size_t i) {
                                                return std::pow(w[i], (m + 1.0) / m) * zeta(i) * zeta(i);
                                            }) / (m + 1.0)});
    const std::size_t kb = g.nearest_time(tb);
    const double bottom = detail::slice_integral(g, kb, x0, R2, [&](std::size_t i) {
        if (!(u[i] > k_level)) return 0.0;
        const double z = phi(i) * psi(tb);
        const double integral = (std::pow(u[i], m + 1.0) - std::pow(k_level, m + 1.0)) / (m + 1.0) - km * (u[i] - k_level);
        return integral * z * z;
    });
    r.lhs_terms.push_back({"gradient", 0.25 * F.params.nu * detail::space_time_integral(g, Q, [&](std::size_t i) {
                                           return Dw.norm2(i) * zeta(i) * zeta(i);
                                       })});
    for (const auto& t : r.lhs_terms) r.lhs += t.second;

    r.rhs_terms.push_back({"time_cutoff", detail::space_time_integral(g, Q, [&](std::size_t i) {
                               return u[i] > k_level ? std::pow(u[i], m + 1.0) * zeta(i) * phi(i) * dpsi(time_of(i)) : 0.0;
                           })});
    r.rhs_terms.push_back({"space_cutoff", detail::space_time_integral(g, Q, [&](std::size_t i) {
                               const double dz = dphi(i) * psi(time_of(i));
                               return w[i] * w[i] * dz * dz;
                           })});
    r.rhs_terms.push_back({"source", detail::space_time_integral(g, Q, [&](std::size_t i) {
                               return zeta(i) * zeta(i) * w[i] * std::abs(f[i]);
                           })});
    r.rhs_terms.push_back({"bottom", bottom});
    r.name = "truncation_energy";
    r.geometry = Q.describe(n);
    r.finish();
    return r;
}

}  // namespace fdelab
