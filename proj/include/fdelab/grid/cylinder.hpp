#pragma once

#include <cmath>
#include <string>

#include "space_time_grid.hpp"

namespace fdelab {

enum class TimeConvention {
    Centered2Tau,    ///< (t0 - tau, t0 + tau) x B_rho, total length 2 tau
    ConstructionS,   ///< total length s centered at t0
};

/// Open space-time cylinder (t_lo, t_hi) x B_rho(x).
struct Cylinder {
    Point x{0, 0, 0};
    double t = 0.0;
    double half = 0.0;  ///< half of the time length
    double rho = 0.0;
    TimeConvention convention = TimeConvention::Centered2Tau;

    static Cylinder centered(const Point& x, double t, double tau, double rho) {
        require(tau > 0.0 && rho > 0.0, ErrorCode::InvalidArgument, "cylinder needs tau > 0 and rho > 0");
        return Cylinder{x, t, tau, rho, TimeConvention::Centered2Tau};
    }
    static Cylinder construction(const Point& x, double t, double s, double rho) {
        require(s > 0.0 && rho > 0.0, ErrorCode::InvalidArgument, "cylinder needs s > 0 and rho > 0");
        return Cylinder{x, t, 0.5 * s, rho, TimeConvention::ConstructionS};
    }
    /// Vertex-anchored window (t_a, t_b] realized as an open window; measure is unaffected.
    static Cylinder window(const Point& x, double t_a, double t_b, double rho) {
        require(t_b > t_a && rho > 0.0, ErrorCode::InvalidArgument, "cylinder needs t_b > t_a and rho > 0");
        return Cylinder{x, 0.5 * (t_a + t_b), 0.5 * (t_b - t_a), rho, TimeConvention::ConstructionS};
    }

    double t_lo() const { return t - half; }
    double t_hi() const { return t + half; }
    double length() const { return 2.0 * half; }
    double tau() const { return half; }
    double s() const { return 2.0 * half; }
    double measure(int n) const { return length() * ball_volume(n, rho); }

    bool contains(const Point& y, double ty, int n) const {
        return std::abs(ty - t) < half && distance(x, y, n) < rho;
    }
    /// Closure inclusion of other in this, with a relative tolerance for roundoff.
    bool contains(const Cylinder& o, int n, double tol = 1e-12) const {
        const double scale = std::max({1.0, std::abs(t), rho});
        return o.t_lo() >= t_lo() - tol * scale && o.t_hi() <= t_hi() + tol * scale &&
               distance(x, o.x, n) + o.rho <= rho + tol * scale;
    }
    bool intersects(const Cylinder& o, int n) const {
        return std::abs(t - o.t) < half + o.half && distance(x, o.x, n) < rho + o.rho;
    }

    /// True when the closed cylinder lies in the grid's space-time box.
    bool inside(const SpaceTimeGrid& g, double tol = 1e-12) const {
        const double ts = std::max(1.0, std::abs(g.t_end()) + std::abs(g.t_start()));
        if (t_lo() < g.t_start() - tol * ts || t_hi() > g.t_end() + tol * ts) return false;
        for (int a = 0; a < g.dim(); ++a) {
            const double xs = std::max(1.0, std::abs(g.lo(a)) + std::abs(g.hi(a)));
            if (x[a] - rho < g.lo(a) - tol * xs || x[a] + rho > g.hi(a) + tol * xs) return false;
        }
        return true;
    }

    Cylinder scaled(double time_factor, double radius_factor) const {
        Cylinder c = *this;
        c.half *= time_factor;
        c.rho *= radius_factor;
        return c;
    }

    std::string describe(int n) const {
        std::string s = "x=(";
        for (int a = 0; a < n; ++a) s += (a ? "," : "") + std::to_string(x[a]);
        s += ") t=" + std::to_string(t) + " len=" + std::to_string(length()) + " rho=" + std::to_string(rho);
        return s;
    }
};

}  // namespace fdelab
