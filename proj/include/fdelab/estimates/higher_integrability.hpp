#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fields.hpp"
#include "report.hpp"

namespace fdelab {

enum class ProbeForm { Intrinsic, Parabolic };

/**
 * Intrinsic: Q = Q_{S, sqrt(S/theta)} sub-intrinsic with constant C; lhs
 * (mean over Q_{S/2, r/2} of |Du^m|^(2p))^(1/p), rhs (mean over Q_{2S,2r} of f^(2p))^(1/p)
 * and theta^((m+1)/(1-m)) / S.
 * Parabolic: Q = Q_{R^2, R}, K = (mean_Q u^(m+1))^(1-m); lhs raised to (1-m)/(2mp)
 * against sqrt(K) (mean_Q R^(2p) f^(2p))^((1-m)/(2mp)), K^(3/2) and 1.
 * All cylinders centered at (x, t0).
 */
struct HigherIntegrabilityProbe {
    std::vector<double> p_list{1.05, 1.1, 1.2};
    Point x{0, 0, 0};
    double t0 = 0.0;
    ProbeForm form = ProbeForm::Intrinsic;
    double S = 1.0;      ///< intrinsic height
    double theta = 1.0;  ///< intrinsic scaling
    double C = 1.0;      ///< sub-intrinsic constant
    double R = 1.0;      ///< parabolic radius
    double bounded_tol = 0.2;

    void validate() const {
        require(!p_list.empty(), ErrorCode::InvalidArgument, "empty exponent list");
        for (double p : p_list) require(p > 1.0 && p <= 1.5, ErrorCode::InvalidExponent, "probe exponents must lie in (1, 1.5]");
        require(S > 0.0 && theta > 0.0 && C >= 1.0 && R > 0.0, ErrorCode::InvalidArgument, "bad probe region");
    }
};

struct ProbeRow {
    double p = 0.0;
    std::vector<double> lhs, rhs, ratio;  ///< one entry per refinement level, coarse to fine
    double finest_change = 0.0;           ///< |ratio[L-1] - ratio[L-2]| / ratio[L-1]
    bool bounded = false;
};

inline InequalityReport higher_integrability_report(const EstimateFields& F, const HigherIntegrabilityProbe& pr, double p) {
    const auto& g = F.grid();
    const double m = F.m();
    const auto u = F.u.values(), f = F.f.values(), G = F.grad2.values();
    auto grad_mean = [&](const Cylinder& C) {
        return detail::space_time_mean(g, C, [&](std::size_t i) { return std::pow(G[i], p); });
    };
    InequalityReport r;
    r.name = "higher_integrability_p" + std::to_string(p).substr(0, 4);
    if (pr.form == ProbeForm::Intrinsic) {
        const double rad = std::sqrt(pr.S / pr.theta);
        const Cylinder Q = Cylinder::centered(pr.x, pr.t0, pr.S, rad);
        const Cylinder Q2 = Cylinder::centered(pr.x, pr.t0, 2.0 * pr.S, 2.0 * rad);
        detail::require_inside(g, Q2, "probe cylinder");
        if (m < 1.0) {
            const double size = std::pow(detail::space_time_mean(g, Q, [&](std::size_t i) { return detail::upow(u[i], m + 1.0); }),
                                         (1.0 - m) / (m + 1.0));
            require(size <= pr.C * pr.theta * (1.0 + 1e-12), ErrorCode::NotSubIntrinsic, "probe region is not sub-intrinsic");
        }
        r.lhs = std::pow(grad_mean(Q.scaled(0.5, 0.5)), 1.0 / p);
        r.rhs_terms = {{"source", std::pow(detail::space_time_mean(g, Q2, [&](std::size_t i) { return std::pow(std::abs(f[i]), 2.0 * p); }), 1.0 / p)},
                       {"scaling", m < 1.0 ? std::pow(pr.theta, (m + 1.0) / (1.0 - m)) / pr.S : 1.0 / pr.S}};
        r.geometry = Q.describe(g.dim());
    } else {
        require(m < 1.0, ErrorCode::InvalidExponent, "parabolic form needs m < 1");
        const Cylinder Q = Cylinder::centered(pr.x, pr.t0, pr.R * pr.R, pr.R);
        detail::require_inside(g, Q, "probe cylinder");
        const double e = (1.0 - m) / (2.0 * m * p);
        const double K = std::pow(detail::space_time_mean(g, Q, [&](std::size_t i) { return detail::upow(u[i], m + 1.0); }), 1.0 - m);
        r.lhs = std::pow(grad_mean(Q.scaled(0.5, 0.5)), e);
        const double src = detail::space_time_mean(g, Q, [&](std::size_t i) { return std::pow(pr.R * std::abs(f[i]), 2.0 * p); });
        r.rhs_terms = {{"source", std::sqrt(K) * std::pow(src, e)}, {"size", std::pow(K, 1.5)}, {"one", 1.0}};
        r.geometry = Q.describe(g.dim());
    }
    r.finish();
    return r;
}

/// One row per exponent; levels are the same problem on successively refined grids.
inline std::vector<ProbeRow> higher_integrability_probe(const std::vector<EstimateFields>& levels,
                                                        const HigherIntegrabilityProbe& pr) {
    pr.validate();
    require(levels.size() >= 2, ErrorCode::InvalidArgument, "need at least two refinement levels");
    std::vector<ProbeRow> rows;
    for (double p : pr.p_list) {
        ProbeRow row;
        row.p = p;
        for (const auto& F : levels) {
            const InequalityReport r = higher_integrability_report(F, pr, p);
            row.lhs.push_back(r.lhs);
            row.rhs.push_back(r.rhs_sum());
            row.ratio.push_back(r.degenerate() ? 0.0 : r.constant);
        }
        const double a = row.ratio[row.ratio.size() - 2], b = row.ratio.back();
        row.finest_change = b > 0.0 ? std::abs(a - b) / b : (a == 0.0 ? 0.0 : INFINITY);
        row.bounded = std::isfinite(b) && row.finest_change < pr.bounded_tol;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fdelab
