#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "fields.hpp"
#include "report.hpp"

namespace fdelab {

/// lower <= integral <= upper, the sandwich of the two auxiliary integral bounds.
struct SandwichReport {
    bool above = true;  ///< u >= a branch
    double lower = 0.0, integral = 0.0, upper = 0.0;
    bool holds = true;
};

/**
 * u >= a: int_a^u (y^m - a^m) dy between (u-a)(u^m-a^m)/2 and (u-a)(u^m-a^m).
 * u < a: int_u^a (a^m - y^m) dy between m(a-u)(a^m-u^m)/2 and (a-u)(a^m-u^m).
 */
inline SandwichReport aux_integral_bounds(double u, double a, double m) {
    require(u >= 0.0 && a >= 0.0, ErrorCode::InvalidArgument, "need u, a >= 0");
    require(m > 0.0 && m < 1.0, ErrorCode::InvalidExponent, "need 0 < m < 1");
    SandwichReport r;
    const double um = detail::upow(u, m), am = detail::upow(a, m);
    const double prim = (detail::upow(u, m + 1.0) - detail::upow(a, m + 1.0)) / (m + 1.0);
    const double rect = (u - a) * (um - am);
    r.above = u >= a;
    if (r.above) {
        r.integral = prim - am * (u - a);
        r.lower = 0.5 * rect;
    } else {
        r.integral = am * (a - u) + prim;
        r.lower = 0.5 * m * rect;
    }
    r.upper = rect;
    const double tol = 1e-12 * std::max({1.0, u, a});
    r.holds = r.lower <= r.integral + tol && r.integral <= r.upper + tol;
    return r;
}

/// |a^m - b^m| <= |a - b|^m up to rounding.
inline bool power_inequality(double a, double b, double m) {
    require(a >= 0.0 && b >= 0.0, ErrorCode::InvalidArgument, "need a, b >= 0");
    require(m > 0.0 && m < 1.0, ErrorCode::InvalidExponent, "need 0 < m < 1");
    const double lhs = std::abs(detail::upow(a, m) - detail::upow(b, m));
    const double rhs = detail::upow(std::abs(a - b), m);
    return lhs <= rhs + 1e-14 * std::max({1.0, detail::upow(a, m), detail::upow(b, m)});
}

/// Values with measure weights; means are sum(w g) / sum(w).
struct WeightedSample {
    std::vector<double> g, w;

    double total() const {
        double s = 0.0;
        for (double x : w) s += x;
        return s;
    }
    template <class Fn>
    double mean_of(Fn&& fn, const std::vector<double>* eta = nullptr) const {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double wi = eta ? w[i] * (*eta)[i] : w[i];
            num += wi * fn(g[i]);
            den += wi;
        }
        require(den > 0.0, ErrorCode::ZeroWeight, "sample has no weight");
        return num / den;
    }
};

/// The time slice nearest t restricted to B_r(x).
inline WeightedSample slice_sample(const ScalarField& f, double t, const Point& x, double r) {
    const auto& g = f.grid();
    const std::size_t k = g.nearest_time(t);
    const SpaceWeights sw = ball_weights(g, x, r);
    WeightedSample s;
    for (std::size_t b = 0; b < sw.nodes.size(); ++b) {
        s.g.push_back(f.at(k, sw.nodes[b]));
        s.w.push_back(sw.w[b]);
    }
    return s;
}

inline WeightedSample cylinder_sample(const ScalarField& f, const Cylinder& Q) {
    const auto& g = f.grid();
    const Quadrature q = quadrature(g, Q);
    WeightedSample s;
    for (std::size_t a = 0; a < q.time.k.size(); ++a)
        for (std::size_t b = 0; b < q.space.nodes.size(); ++b) {
            s.g.push_back(f[g.index(q.time.k[a], q.space.nodes[b])]);
            s.w.push_back(q.time.w[a] * q.space.w[b]);
        }
    return s;
}

/**
 * A = mean |g^q - (g)^q|^2, B = mean |g^q - (g^q)|^2. Reports A <= c0 B (empirical
 * c0) and B <= A (best constant, exact). For q <= 1/2 the bound sup g <= K (g) is required.
 */
inline std::pair<InequalityReport, InequalityReport> trick_check(const WeightedSample& s, double q,
                                                                 std::optional<double> K = std::nullopt) {
    require(q > 0.0, ErrorCode::InvalidExponent, "q must be positive");
    for (double v : s.g) require(v >= 0.0, ErrorCode::NegativeBase, "trick needs g >= 0");
    const double gm = s.mean_of([](double v) { return v; });
    if (q <= 0.5) {
        double sup = 0.0;
        for (double v : s.g) sup = std::max(sup, v);
        require(K.has_value() && sup <= *K * gm * (1.0 + 1e-12), ErrorCode::HypothesisUnmet,
                "q <= 1/2 needs sup g <= K mean g");
    }
    const double gq = detail::upow(gm, q);
    const double mq = s.mean_of([q](double v) { return detail::upow(v, q); });
    const double A = s.mean_of([&](double v) { return std::pow(detail::upow(v, q) - gq, 2); });
    const double B = s.mean_of([&](double v) { return std::pow(detail::upow(v, q) - mq, 2); });
    return {InequalityReport::make("trick", A, {{"power_of_mean_osc", B}}),
            InequalityReport::make("trick_best_constant", B, {{"mean_of_power_osc", A}}, 1.0 + 1e-12)};
}

/**
 * For p >= 1/m and weight eta: X = (|u^m - ((u)^eta)^m|^p)^eta^(1/p),
 * Y = (|u^m - (u^m)^eta|^p)^eta^(1/p). Reports X <= c0 Y and Y <= 2 X.
 */
inline std::pair<InequalityReport, InequalityReport> convex_mean_change(const WeightedSample& s,
                                                                        const std::vector<double>& eta, double p,
                                                                        double m) {
    require(m > 0.0 && m < 1.0, ErrorCode::InvalidExponent, "need 0 < m < 1");
    require(p >= 1.0 / m * (1.0 - 1e-12), ErrorCode::HypothesisUnmet, "convex mean change needs p >= 1/m");
    require(eta.size() == s.g.size(), ErrorCode::InvalidArgument, "weight size mismatch");
    for (double e : eta) require(e >= 0.0, ErrorCode::InvalidArgument, "weight must be nonnegative");
    for (double v : s.g) require(v >= 0.0, ErrorCode::NegativeBase, "convex mean change needs u >= 0");
    const double lam_m = detail::upow(s.mean_of([](double v) { return v; }, &eta), m);
    const double em = s.mean_of([m](double v) { return detail::upow(v, m); }, &eta);
    const double X = std::pow(s.mean_of([&](double v) { return std::pow(std::abs(detail::upow(v, m) - lam_m), p); }, &eta),
                              1.0 / p);
    const double Y =
        std::pow(s.mean_of([&](double v) { return std::pow(std::abs(detail::upow(v, m) - em), p); }, &eta), 1.0 / p);
    return {InequalityReport::make("convex_mean_change", X, {{"osc_about_mean_of_power", Y}}),
            InequalityReport::make("convex_mean_change_upper", Y, {{"osc_about_power_of_mean", X}}, 2.0 + 1e-12)};
}

/**
 * Q1 inside Q. When |(f)_Q1| <= eps ((|f|^q)_Q)^(1/q), the bound
 * eps ((|f|^q)_Q)^(1/q) <= eps/(1-eps) (1 + (|Q|/|Q1|)^(1/q)) (mean |f - (f)_Q|^q)^(1/q)
 * holds exactly (tolerance 1). hypothesis is false when the premise fails; the
 * report then carries the values but passes vacuously.
 */
struct ChainReport {
    InequalityReport report;
    bool hypothesis = false;
    double mean_Q1 = 0.0;
};

inline ChainReport small_mean_chain(const ScalarField& f, const Cylinder& Q1, const Cylinder& Q, double q, double eps) {
    require(q >= 1.0, ErrorCode::InvalidExponent, "need q >= 1");
    require(eps > 0.0 && eps < 1.0, ErrorCode::InvalidArgument, "need eps in (0,1)");
    require(Q.contains(Q1, f.grid().dim()), ErrorCode::InvalidArgument, "Q1 must lie inside Q");
    const auto& g = f.grid();
    const Quadrature q1 = quadrature(g, Q1), q0 = quadrature(g, Q);
    const auto v = f.values();
    ChainReport c;
    c.mean_Q1 = mean(g, q1, [&](std::size_t i) { return v[i]; });
    const double fq = std::pow(mean(g, q0, [&](std::size_t i) { return std::pow(std::abs(v[i]), q); }), 1.0 / q);
    const double fm = mean(g, q0, [&](std::size_t i) { return v[i]; });
    const double osc = std::pow(mean(g, q0, [&](std::size_t i) { return std::pow(std::abs(v[i] - fm), q); }), 1.0 / q);
    c.hypothesis = std::abs(c.mean_Q1) <= eps * fq * (1.0 + 1e-12);
    const double factor = eps / (1.0 - eps) * (1.0 + std::pow(q0.measure / q1.measure, 1.0 / q));
    c.report = InequalityReport::make("small_mean_chain", eps * fq, {{"scaled_oscillation", factor * osc}},
                                      c.hypothesis ? 1.0 + 1e-12 : INFINITY, Q.describe(g.dim()));
    return c;
}

struct MeanChangeParams {
    double q = 1.0;                ///< exponent of the trick lemma
    double p = 2.0;                ///< exponent of the convex lemma, >= 1/m
    double m = 0.5;
    std::optional<double> K = {};  ///< sup g <= K (g), needed for q <= 1/2
};

/// The trick lemma and the convex mean change on one weighted sample.
inline std::vector<InequalityReport> mean_change_checks(const WeightedSample& s, const std::vector<double>& eta,
                                                        const MeanChangeParams& prm) {
    auto [a, b] = trick_check(s, prm.q, prm.K);
    auto [c, d] = convex_mean_change(s, eta, prm.p, prm.m);
    return {a, b, c, d};
}

}  // namespace fdelab
