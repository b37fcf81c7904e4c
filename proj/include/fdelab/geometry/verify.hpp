#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "profile.hpp"

namespace fdelab {

/// One verified property: pass flag, empirical constant, and how many instances were tested.
struct PropertyCheck {
    std::string name;
    bool passed = true;
    double constant = 0.0;
    std::size_t checked = 0;
    std::size_t failed = 0;

    void record(bool ok) {
        ++checked;
        if (!ok) {
            ++failed;
            passed = false;
        }
    }
};

struct ProfileReport {
    std::vector<PropertyCheck> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
    }
    const PropertyCheck& get(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        fail(ErrorCode::InvalidArgument, "no property check named " + name);
    }
};

struct VerifyOptions {
    /// gamma = 2^(-i/L) for these grid offsets i (0 gives gamma = 1).
    std::vector<int> gamma_steps{0, 1, 2, 4, 8, 16, 32, 64};
    /// c_tilde = 2^(i/L) for the nesting property; c = c_tilde^b_hat.
    std::vector<int> nesting_steps{4, 8, 16};
    double c_max = 4.0;         ///< admissible empirical constant c(n,p)
    double mean_rel_tol = 1e-6; ///< sub-intrinsic mean bound
    double rel_tol = 1e-10;     ///< identities that are exact up to rounding
};

inline ProfileReport verify_profile(const ScalingProfile& P, const VerifyOptions& o = {}) {
    require(!P.empty(), ErrorCode::ProfileMissing, "empty profile");
    const auto& c = P.consts;
    const double p = c.p, bh = c.b_hat, ah = c.a_hat, beta = c.beta;
    const int n = c.n;
    const std::size_t N = P.size();
    const int L = P.levels_per_octave;
    const double tol = o.rel_tol;
    ProfileReport rep;

    PropertyCheck a{"a_identity"};
    for (std::size_t j = 0; j < N; ++j) {
        const double d1 = std::abs(P.r[j] * P.r[j] * P.theta[j] / P.s[j] - 1.0);
        const double d2 = std::abs(std::sqrt(std::pow(P.lambda[j], p - 2.0) * P.s[j]) / P.r[j] - 1.0);
        a.constant = std::max({a.constant, d1, d2});
        a.record(d1 <= 1e-14 && d2 <= 1e-12 && P.r[j] > 0.0 && P.r[j] <= c.R);
    }
    rep.checks.push_back(a);

    PropertyCheck b{"b_monotone"};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            const double bound = std::pow(P.s[i] / P.s[j], bh) * P.r[j];
            b.constant = std::max(b.constant, P.r[i] / bound);
            b.record(P.r[i] <= bound * (1.0 + tol) && P.r[i] <= P.r[j]);
        }
    rep.checks.push_back(b);

    PropertyCheck cc{"c_subintrinsic"};
    for (std::size_t j = 0; j < N; ++j) {
        const double lp = std::pow(P.lambda[j], p);
        cc.constant = std::max(cc.constant, P.mean_f[j] / lp);
        cc.record(P.mean_f[j] <= lp * (1.0 + o.mean_rel_tol));
    }
    rep.checks.push_back(cc);

    // intrinsic_before[j] = number of intrinsic grid points below j
    std::vector<std::size_t> intr(N + 1, 0);
    for (std::size_t j = 0; j < N; ++j) intr[j + 1] = intr[j] + (P.intrinsic[j] ? 1 : 0);
    PropertyCheck d{"d_intrinsic_witness"}, e{"e_theta_decay"};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            const double bound = std::pow(P.s[i] / P.s[j], bh) * P.r[j];
            const bool any_intrinsic = intr[j] > intr[i];
            if (P.r[i] < bound * (1.0 - tol)) d.record(any_intrinsic);
            if (!any_intrinsic) {
                const double rhs = std::pow(P.s[i] / P.s[j], beta) * P.theta[j];
                e.constant = std::max(e.constant, P.theta[i] / rhs);
                e.record(P.theta[i] <= rhs * (1.0 + tol));
            }
        }
    rep.checks.push_back(d);
    rep.checks.push_back(e);

    PropertyCheck f1{"f_radius"}, f2{"f_volume"}, f3{"f_theta"}, r1{"eq_r_radius"}, r2{"eq_r_theta"};
    for (int gi : o.gamma_steps) {
        const double gamma = std::exp2(-double(gi) / L);
        for (std::size_t j = std::size_t(gi); j < N; ++j) {
            const std::size_t k = j - std::size_t(gi);  // s_k = gamma s_j
            const double c1 = P.r[j] * std::pow(gamma, ah) / P.r[k];
            const double volj = P.s[j] * ball_volume(n, P.r[j]), volk = P.s[k] * ball_volume(n, P.r[k]);
            const double c2 = volj / volk * std::pow(gamma, n * ah + 2.0);
            const double c3 = P.theta[k] / P.theta[j] * std::pow(gamma, std::max(2.0 * ah, beta));
            f1.constant = std::max(f1.constant, c1);
            f2.constant = std::max(f2.constant, c2);
            f3.constant = std::max(f3.constant, c3);
            f1.record(c1 <= o.c_max);
            f2.record(c2 <= o.c_max);
            f3.record(c3 <= o.c_max);
            // r(gamma s) <= gamma^b r(s) <= c gamma^(b-a) r(gamma s)
            const double mid_r = std::pow(gamma, bh) * P.r[j];
            const double cr = mid_r / (std::pow(gamma, bh - ah) * P.r[k]);
            r1.constant = std::max(r1.constant, cr);
            r1.record(P.r[k] <= mid_r * (1.0 + tol) && cr <= o.c_max);
            // theta_s <= gamma^(2b-1) theta_{gamma s} <= c gamma^(2(b-a)) theta_s
            const double mid_t = std::pow(gamma, 2.0 * bh - 1.0) * P.theta[k];
            const double ct = mid_t / (std::pow(gamma, 2.0 * (bh - ah)) * P.theta[j]);
            r2.constant = std::max(r2.constant, ct);
            r2.record(P.theta[j] <= mid_t * (1.0 + tol) && ct <= o.c_max);
        }
    }
    for (auto* x : {&f1, &f2, &f3, &r1, &r2}) rep.checks.push_back(*x);

    // Q_{cs, c r(s)} in Q_{c~ s, r(c~ s)} in Q_{c- s, c- r(s)}, c~ = c^(1/b), c- = max(c~, c~^a)
    PropertyCheck g1{"g_nesting_inner"}, g2{"g_nesting_outer"};
    for (int gi : o.nesting_steps) {
        const double ct = std::exp2(double(gi) / L);
        const double cs = std::pow(ct, bh);
        const double cb = std::max(ct, std::pow(ct, ah));
        for (std::size_t j = 0; j + std::size_t(gi) < N; ++j) {
            const std::size_t k = j + std::size_t(gi);
            g1.constant = std::max(g1.constant, cs * P.r[j] / P.r[k]);
            g1.record(cs * P.r[j] <= P.r[k] * (1.0 + tol) && cs <= ct);
            const double slack = P.r[k] / (cb * P.r[j]);
            g2.constant = std::max(g2.constant, slack);
            g2.record(slack <= o.c_max && ct <= cb);
        }
    }
    rep.checks.push_back(g1);
    rep.checks.push_back(g2);
    return rep;
}

}  // namespace fdelab
