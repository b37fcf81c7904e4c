#pragma once

#include <cmath>

#include "../grid/params.hpp"

namespace fdelab {

/// u(x,t) = t^-alpha (C + k |x|^2 t^-2beta)^(-1/(1-m)).
struct Barenblatt {
    int n = 2;
    double m = 0.5;
    double C = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double k = 0.0;

    static Barenblatt make(const ModelParams& params, double C) {
        const int n = params.n;
        const double m = params.m;
        const double denom = n * (m - 1.0) + 2.0;
        require(denom > 0.0, ErrorCode::InvalidExponent, "n(m-1)+2 must be positive");
        require(m < 1.0 && m > 0.0, ErrorCode::InvalidExponent, "profile needs 0 < m < 1");
        require(C > 0.0, ErrorCode::InvalidArgument, "profile constant C must be positive");
        Barenblatt b;
        b.n = n;
        b.m = m;
        b.C = C;
        b.alpha = n / denom;
        b.beta = b.alpha / n;
        b.k = (1.0 - m) * b.alpha / (2.0 * m * n);
        return b;
    }

    double operator()(const Point& x, double t) const {
        require(t > 0.0, ErrorCode::InvalidArgument, "profile needs t > 0");
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
        return std::pow(t, -alpha) * std::pow(C + k * r2 * std::pow(t, -2.0 * beta), -1.0 / (1.0 - m));
    }

    /// Spatial gradient of u^m.
    Point grad_power(const Point& x, double t) const {
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
        const double tb = std::pow(t, -2.0 * beta);
        const double q = C + k * r2 * tb;
        const double e = -m / (1.0 - m);
        const double factor = std::pow(t, -alpha * m) * e * std::pow(q, e - 1.0) * 2.0 * k * tb;
        Point g{0, 0, 0};
        for (int a = 0; a < n; ++a) g[a] = factor * x[a];
        return g;
    }
};

inline double barenblatt(const ModelParams& params, double C, const Point& x, double t) {
    return Barenblatt::make(params, C)(x, t);
}

}  // namespace fdelab
