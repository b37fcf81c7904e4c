#pragma once

#include <cmath>
#include <string>

#include "../grid/params.hpp"

namespace fdelab {

/// Exponents and sizes of the sub-intrinsic cylinder construction.
struct GeometryConstants {
    int n = 2;
    double p = 1.5;
    double b_hat = 0.25;
    double beta = 0.5;     ///< 1 - 2 b_hat
    double a_hat = 1.25;   ///< b_hat + 2 / (2p - (2-p) n)
    double a_check = 0.5;  ///< 1 / (2p + n (p-2))
    double S = 1.0;
    double R = 1.0;
    double K = 4.0;

    static GeometryConstants make(const ModelParams& params, double b_hat, double S, double R, double K = 4.0) {
        const int n = params.n;
        const double p = params.p();
        const double b0 = (n + 2) * p - 2.0 * n;
        require(b0 > 0.0, ErrorCode::InvalidExponent, "need p > 2n/(n+2)");
        require(b_hat > 0.0 && b_hat <= 0.5 && b_hat < b0, ErrorCode::InvalidExponent,
                "b_hat must satisfy 0 < b_hat <= 1/2 and b_hat < (n+2)p - 2n");
        require(S > 0.0 && R > 0.0, ErrorCode::InvalidArgument, "S and R must be positive");
        require(K >= 1.0, ErrorCode::InvalidArgument, "K must be at least 1");
        GeometryConstants c;
        c.n = n;
        c.p = p;
        c.b_hat = b_hat;
        c.beta = 1.0 - 2.0 * b_hat;
        c.a_hat = b_hat + 2.0 / (2.0 * p - (2.0 - p) * n);
        c.a_check = 1.0 / (2.0 * p + n * (p - 2.0));
        c.S = S;
        c.R = R;
        c.K = K;
        return c;
    }

    double m() const { return p - 1.0; }

    /// 1 < 1/beta < (m+1)/(1-m), needed by the level-set covering.
    bool covering_admissible() const {
        if (beta <= 0.0) return false;
        const double inv = 1.0 / beta;
        return inv > 1.0 && inv < (m() + 1.0) / (1.0 - m());
    }
    void require_covering() const {
        require(covering_admissible(), ErrorCode::InvalidExponent,
                "b_hat=" + std::to_string(b_hat) + " violates 1 < 1/(1-2 b_hat) < (m+1)/(1-m)");
    }
};

}  // namespace fdelab
