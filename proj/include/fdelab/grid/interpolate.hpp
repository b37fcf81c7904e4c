#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "scalar_field.hpp"

namespace fdelab {

/// Multilinear interpolation in space and linear in time. The point must lie in the grid box.
inline double interpolate(const ScalarField& f, const Point& x, double t) {
    const auto& g = f.grid();
    const int n = g.dim();
    const double eps = 1e-12;
    auto locate = [&](double v, double lo, double step, std::size_t count, double& w) {
        double u = (v - lo) / step;
        require(u >= -eps && u <= double(count - 1) + eps, ErrorCode::DilationEscapesDomain,
                "interpolation point outside the grid");
        u = std::clamp(u, 0.0, double(count - 1));
        std::size_t i = std::min(static_cast<std::size_t>(u), count >= 2 ? count - 2 : 0);
        w = count >= 2 ? u - double(i) : 0.0;
        return i;
    };
    std::array<std::size_t, 3> base{0, 0, 0};
    std::array<double, 3> w{0, 0, 0};
    for (int a = 0; a < n; ++a) base[a] = locate(x[a], g.lo(a), g.h(), g.nodes(a), w[a]);
    double wt = 0.0;
    const std::size_t k = locate(t, g.t_start(), g.dt(), g.time_nodes(), wt);
    double out = 0.0;
    for (int dk = 0; dk < 2; ++dk) {
        const double ft = dk ? wt : 1.0 - wt;
        if (ft == 0.0) continue;
        for (int corner = 0; corner < (1 << n); ++corner) {
            double fw = ft;
            std::array<std::size_t, 3> idx{0, 0, 0};
            for (int a = 0; a < n; ++a) {
                const int bit = (corner >> a) & 1;
                fw *= bit ? w[a] : 1.0 - w[a];
                idx[a] = base[a] + std::size_t(bit);
            }
            if (fw == 0.0) continue;
            out += fw * f.at(k + std::size_t(dk), g.space_index(idx));
        }
    }
    return out;
}

}  // namespace fdelab
