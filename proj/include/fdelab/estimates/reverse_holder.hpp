#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "../geometry/profile.hpp"
#include "fields.hpp"
#include "regime.hpp"
#include "report.hpp"

namespace fdelab {

struct GradReverseHolder {
    InequalityReport report;
    Regime regime;
    double intrinsic_ratio = 0.0;
};

/**
 * Reverse Hoelder inequality for |Du^m| on a profile cylinder Q = Q_{s, r} (total
 * length s), classified on Q itself.
 * DEGENERATE: mean_Q |Du^m|^2 against (mean_{Q_{3s,3r}} |Du^m|^(2v))^(1/v) and sup_{Q_{3s,3r}} r^2 f^2.
 * NON_DEGENERATE (Q plays Q_{2s}): mean over Q_{s, r(2s)} of |Du^m|^2 against
 * (mean_Q |Du^m|^(2v))^(1/v) and mean_Q r^2 f^2.
 */
inline GradReverseHolder grad_reverse_holder(const EstimateFields& F, const Cylinder& Q, RegimeLabel claimed,
                                             double epsilon, double vartheta, double K) {
    require(vartheta > 0.0 && vartheta < 1.0, ErrorCode::InvalidExponent, "vartheta must lie in (0,1)");
    const auto& g = F.grid();
    const double m = F.m();
    const double theta = Q.s() / (Q.rho * Q.rho);
    GradReverseHolder out;
    const IntrinsicCheck ic = check_intrinsic(F.u, Q, theta, K, m);
    out.intrinsic_ratio = ic.ratio;
    require(ic.intrinsic, ErrorCode::NotIntrinsic, "cylinder is not intrinsic: " + Q.describe(g.dim()));
    out.regime = regime_classify(F.u, Q, epsilon, m);
    require(out.regime.label == claimed, ErrorCode::RegimeMismatch,
            std::string("classifier says ") + to_string(out.regime.label) + ", caller says " + to_string(claimed));
    const auto G = F.grad2.values(), f = F.f.values();
    auto grad_power = [&](const Cylinder& C) {
        return std::pow(detail::space_time_mean(g, C, [&](std::size_t i) { return std::pow(G[i], vartheta); }), 1.0 / vartheta);
    };
    auto f2 = [&](std::size_t i) { return f[i] * f[i]; };
    const double r2 = Q.rho * Q.rho;
    auto& r = out.report;
    if (claimed == RegimeLabel::Degenerate) {
        const Cylinder Q3 = Q.scaled(3.0, 3.0);
        detail::require_inside(g, Q3, "dilated cylinder");
        r.lhs = detail::space_time_mean(g, Q, [&](std::size_t i) { return G[i]; });
        r.rhs_terms = {{"gradient_power", grad_power(Q3)}, {"source", r2 * std::max(0.0, detail::node_sup(g, Q3, f2))}};
        r.name = "grad_reverse_holder_degenerate";
    } else {
        detail::require_inside(g, Q, "cylinder");
        const Cylinder Qh = Q.scaled(0.5, 1.0);
        r.lhs = detail::space_time_mean(g, Qh, [&](std::size_t i) { return G[i]; });
        r.rhs_terms = {{"gradient_power", grad_power(Q)}, {"source", r2 * detail::space_time_mean(g, Q, f2)}};
        r.name = "grad_reverse_holder_nondegenerate";
    }
    r.geometry = Q.describe(g.dim());
    r.finish();
    return out;
}

/**
 * Slice means of u at sigma and tau under eta^2 and eta, eta = 1 on B_r(x0) and
 * linear down to 0 on B_{2r}, against s ((1/r) mean |Du^m| + mean |f|) over
 * Q_{2s,2r} = (t0 - 2s, t0 + 2s) x B_{2r}. The normalization of eta cancels in
 * the weighted means.
 */
inline std::pair<InequalityReport, InequalityReport> time_mean_switch(const EstimateFields& F, const Point& x0, double t0,
                                                                      double s, double r, double sigma, double tau) {
    require(s > 0.0 && r > 0.0, ErrorCode::InvalidArgument, "need s, r > 0");
    require(t0 - 2.0 * s <= sigma && sigma < tau && tau <= t0 + 2.0 * s, ErrorCode::BadRange,
            "need t0 - 2s <= sigma < tau <= t0 + 2s");
    const auto& g = F.grid();
    const int n = g.dim();
    const Cylinder Q = Cylinder::centered(x0, t0, 2.0 * s, 2.0 * r);
    detail::require_inside(g, Q, "time-switch cylinder");
    auto eta = [&](const Point& x) {
        const double d = distance(x, x0, n);
        return d <= r ? 1.0 : std::max(0.0, 2.0 - d / r);
    };
    auto eta2 = [&](const Point& x) { return eta(x) * eta(x); };
    const double jump2 = std::abs(weighted_slice_mean(F.u, tau, x0, 2.0 * r, eta2) - weighted_slice_mean(F.u, sigma, x0, 2.0 * r, eta2));
    const double jump1 = std::abs(weighted_slice_mean(F.u, tau, x0, 2.0 * r, eta) - weighted_slice_mean(F.u, sigma, x0, 2.0 * r, eta));
    const auto G = F.grad2.values(), f = F.f.values();
    const double grad = s / r * detail::space_time_mean(g, Q, [&](std::size_t i) { return std::sqrt(G[i]); });
    const double src = s * detail::space_time_mean(g, Q, [&](std::size_t i) { return std::abs(f[i]); });
    const std::string geo = Q.describe(n);
    return {InequalityReport::make("time_mean_switch", jump2, {{"gradient", grad}, {"source", src}}, INFINITY, geo),
            InequalityReport::make("time_mean_switch_linear", jump1, {{"gradient", grad}, {"source", src}}, INFINITY, geo)};
}

}  // namespace fdelab
