#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include "../grid/quadrature.hpp"
#include "constants.hpp"
#include "window_integrator.hpp"

namespace fdelab {

/// Geometric s-grid S * 2^(-i/L), i = 0 .. L*octaves.
struct SGridSpec {
    int levels_per_octave = 8;
    int octaves = 24;

    std::vector<double> values(double S) const {
        require(levels_per_octave >= 1 && octaves >= 1, ErrorCode::InvalidArgument, "bad s-grid");
        const int N = levels_per_octave * octaves + 1;
        std::vector<double> s(N);
        for (int j = 0; j < N; ++j) s[j] = S * std::exp2(-double(N - 1 - j) / levels_per_octave);
        return s;
    }
};

/// The map s -> (r_tilde, r, lambda, theta) at one base point, on an ascending s-grid.
struct ScalingProfile {
    Point x{0, 0, 0};
    double t = 0.0;
    GeometryConstants consts{};
    int levels_per_octave = 8;
    std::vector<double> s, r_tilde, r, lambda, theta;
    std::vector<double> mean_f;  ///< mean of |f| over Q(s, r(s))
    std::vector<double> ratio;   ///< mean^((2-p)/p) / theta
    std::vector<char> subintrinsic, intrinsic;
    bool clipped = false;

    std::size_t size() const { return s.size(); }
    bool empty() const { return s.empty(); }
    Cylinder cylinder(std::size_t j) const { return Cylinder::construction(x, t, s[j], r[j]); }

    /// Smallest grid index with s[j] >= value (size() if none).
    std::size_t index_at_least(double value) const {
        for (std::size_t j = 0; j < s.size(); ++j)
            if (s[j] >= value * (1.0 - 1e-12)) return j;
        return s.size();
    }
};

struct IntrinsicCheck {
    bool subintrinsic = false;
    bool intrinsic = false;
    double ratio = 0.0;  ///< rho* / theta
};

/// rho* = (mean of u^(m+1) over Q)^((1-m)/(m+1)) compared with theta, up to relative rounding tol.
inline IntrinsicCheck check_intrinsic(const ScalarField& u, const Cylinder& Q, double theta, double K, double m,
                                      double tol = 1e-12) {
    require(theta > 0.0 && K >= 1.0, ErrorCode::InvalidArgument, "need theta > 0 and K >= 1");
    const double mu = cylinder_mean(u, Q, m + 1.0);
    const double rho_star = mu == 0.0 ? 0.0 : std::pow(mu, (1.0 - m) / (m + 1.0));
    IntrinsicCheck c;
    c.ratio = rho_star / theta;
    c.subintrinsic = rho_star <= K * theta * (1.0 + tol);
    c.intrinsic = c.subintrinsic && theta / K <= rho_star * (1.0 + tol);
    return c;
}

/**
 * Builds scaling profiles of a fixed field f (typically u^(m+1)) at arbitrary
 * base points. r_tilde(s) = sup{rho < R : (int_window int_{B_rho} |f|)^(2-p)
 * rho^(2p) |B_rho|^(p-2) <= s^2}; r(s) = min over grid a >= s of (s/a)^b_hat r_tilde(a).
 */
class ProfileBuilder {
public:
    ProfileBuilder(const ScalarField& f, const GeometryConstants& c, SGridSpec sgrid = {})
        : integ_(f), consts_(c), sgrid_(sgrid), s_(sgrid.values(c.S)) {
        require(f.grid().dim() == c.n, ErrorCode::InvalidArgument, "field dimension differs from constants");
    }

    const WindowIntegrator& integrator() const { return integ_; }
    const GeometryConstants& consts() const { return consts_; }
    const SGridSpec& sgrid() const { return sgrid_; }
    const std::vector<double>& s_values() const { return s_; }

    double tilde_r(const Point& x, double t, double s) const {
        BallAccumulator acc(integ_.grid(), x, consts_.R);
        std::vector<double> w;
        return tilde_r_impl(acc, w, x, t, s);
    }

    ScalingProfile build(const Point& x, double t) const {
        const auto& g = integ_.grid();
        const double p = consts_.p;
        ScalingProfile P;
        P.x = x;
        P.t = t;
        P.consts = consts_;
        P.levels_per_octave = sgrid_.levels_per_octave;
        P.s = s_;
        const std::size_t N = s_.size();
        P.clipped = !Cylinder::construction(x, t, consts_.S, consts_.R).inside(g);
        BallAccumulator acc(g, x, consts_.R);
        std::vector<double> w;
        P.r_tilde.resize(N);
        for (std::size_t j = 0; j < N; ++j) P.r_tilde[j] = tilde_r_impl(acc, w, x, t, s_[j]);
        P.r.resize(N);
        P.r[N - 1] = P.r_tilde[N - 1];
        for (std::size_t j = N - 1; j-- > 0;)
            P.r[j] = std::min(P.r_tilde[j], std::pow(s_[j] / s_[j + 1], consts_.b_hat) * P.r[j + 1]);
        P.lambda.resize(N);
        P.theta.resize(N);
        P.mean_f.resize(N);
        P.ratio.resize(N);
        P.subintrinsic.resize(N);
        P.intrinsic.resize(N);
        for (std::size_t j = 0; j < N; ++j) {
            const double r2 = P.r[j] * P.r[j];
            P.theta[j] = s_[j] / r2;
            P.lambda[j] = std::pow(r2 / s_[j], 1.0 / (p - 2.0));
            load_window(acc, w, t, s_[j]);
            const double meas = acc.measure(P.r[j]) * integ_.window_measure(t - 0.5 * s_[j], t + 0.5 * s_[j]);
            P.mean_f[j] = meas > 0.0 ? acc.integral(P.r[j]) / meas : 0.0;
            const double rs = P.mean_f[j] > 0.0 ? std::pow(P.mean_f[j], (2.0 - p) / p) : 0.0;
            P.ratio[j] = rs / P.theta[j];
            P.subintrinsic[j] = P.ratio[j] <= consts_.K;
            P.intrinsic[j] = P.subintrinsic[j] && P.ratio[j] >= 1.0 / consts_.K;
        }
        return P;
    }

    /// r at an arbitrary s in (0, S], consistent with the grid construction.
    double radius_at(const ScalingProfile& P, double s) const {
        require(!P.empty(), ErrorCode::ProfileMissing, "empty profile");
        require(s > 0.0 && s <= P.s.back() * (1.0 + 1e-12), ErrorCode::InvalidArgument, "s outside (0, S]");
        const std::size_t j = P.index_at_least(s);
        if (std::abs(P.s[j] - s) <= 1e-12 * s) return P.r[j];
        return std::min(tilde_r(P.x, P.t, s), std::pow(s / P.s[j], consts_.b_hat) * P.r[j]);
    }

private:
    void load_window(BallAccumulator& acc, std::vector<double>& w, double t, double s) const {
        const auto& nodes = acc.nodes();
        w.resize(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = integ_.node_window(nodes[i], t - 0.5 * s, t + 0.5 * s);
        acc.load(w);
    }

    double tilde_r_impl(BallAccumulator& acc, std::vector<double>& w, const Point&, double t, double s) const {
        require(s > 0.0, ErrorCode::InvalidArgument, "s must be positive");
        load_window(acc, w, t, s);
        const double p = consts_.p;
        const int n = consts_.n;
        const double b0 = 2.0 * p + n * (p - 2.0);
        const double log_omega = std::log(unit_ball_volume(n));
        const double target = 2.0 * std::log(s);
        auto holds = [&](double rho) {
            const double I = acc.integral(rho);
            if (I <= 0.0) return true;
            return (2.0 - p) * std::log(I) + b0 * std::log(rho) + (p - 2.0) * log_omega <= target;
        };
        const double R = consts_.R;
        if (holds(R)) return R;
        double lo = 0.5 * R;
        while (!holds(lo)) {
            lo *= 0.5;
            if (lo < 1e-300) return 0.0;
        }
        double hi = std::min(R, 2.0 * lo);
        const double h_tol = 0.5 * integ_.grid().h();
        while (hi - lo > std::min(h_tol, 1e-9 * hi)) {
            const double mid = 0.5 * (lo + hi);
            if (holds(mid))
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }

    WindowIntegrator integ_;
    GeometryConstants consts_;
    SGridSpec sgrid_;
    std::vector<double> s_;
};

/// CSV columns: s, r_tilde, r, lambda, theta, subintrinsic, intrinsic.
inline void write_profile_csv(std::ostream& os, const ScalingProfile& P) {
    os << "s,r_tilde,r,lambda,theta,subintrinsic,intrinsic\n";
    os.precision(17);
    for (std::size_t j = 0; j < P.size(); ++j)
        os << P.s[j] << ',' << P.r_tilde[j] << ',' << P.r[j] << ',' << P.lambda[j] << ',' << P.theta[j] << ','
           << int(P.subintrinsic[j]) << ',' << int(P.intrinsic[j]) << '\n';
}

}  // namespace fdelab
