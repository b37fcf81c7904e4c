#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "../error.hpp"

namespace fdelab {

/// Spatial point; components beyond the grid dimension are zero.
using Point = std::array<double, 3>;

inline double unit_ball_volume(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return std::numbers::pi;
        case 3: return 4.0 * std::numbers::pi / 3.0;
        default: fail(ErrorCode::InvalidArgument, "dimension must be 1, 2 or 3");
    }
}

inline double ball_volume(int n, double rho) { return unit_ball_volume(n) * std::pow(rho, n); }

inline double distance(const Point& a, const Point& b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Exponents and ellipticity bounds of u_t - div A(x,t,u,Du^m) = f.
struct ModelParams {
    int n = 2;
    double m = 0.5;
    double nu = 1.0;
    double L = 1.0;

    double p() const { return m + 1.0; }
    bool heat_limit_case() const { return m == 1.0; }

    static ModelParams make(int n, double m, double nu = 1.0, double L = 1.0) {
        require(n >= 1 && n <= 3, ErrorCode::InvalidArgument, "dimension must be 1, 2 or 3");
        const double m_min = std::max(0.0, double(n - 2)) / double(n + 2);
        require(m > m_min && m < 1.0, ErrorCode::InvalidExponent,
                "m must lie in ((n-2)_+/(n+2), 1), got " + std::to_string(m));
        require(nu > 0.0 && nu <= L && std::isfinite(L), ErrorCode::InvalidArgument,
                "ellipticity bounds must satisfy 0 < nu <= L < inf");
        return ModelParams{n, m, nu, L};
    }

    /// m = 1 (heat equation); only meant for sanity tests.
    static ModelParams heat_limit(int n, double nu = 1.0, double L = 1.0) {
        require(n >= 1 && n <= 3, ErrorCode::InvalidArgument, "dimension must be 1, 2 or 3");
        require(nu > 0.0 && nu <= L, ErrorCode::InvalidArgument, "ellipticity bounds must satisfy 0 < nu <= L");
        return ModelParams{n, 1.0, nu, L};
    }
};

}  // namespace fdelab
