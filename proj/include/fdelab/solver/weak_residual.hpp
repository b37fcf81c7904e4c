#pragma once

#include <cmath>
#include <vector>

#include "../grid/gradient.hpp"
#include "structure.hpp"

namespace fdelab {

/// phi(x,t) = psi(|x - c| / rho) psi((t - t0) / tau) with psi(s) = exp(-1/(1 - s^2)).
struct Bump {
    Point c{0, 0, 0};
    double rho = 1.0;
    double t0 = 0.0;
    double tau = 1.0;
};

namespace detail {
inline double psi(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }
inline double dpsi(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return psi(s) * (-2.0 * s / (q * q));
}
}  // namespace detail

/// Five bumps: one centered, four shifted along the axes, all well inside the grid.
inline std::vector<Bump> default_battery(const SpaceTimeGrid& g) {
    double half = INFINITY;
    Point mid{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) {
        half = std::min(half, 0.5 * (g.hi(a) - g.lo(a)));
        mid[a] = 0.5 * (g.lo(a) + g.hi(a));
    }
    const double tm = 0.5 * (g.t_start() + g.t_end());
    const double T = 0.5 * (g.t_end() - g.t_start());
    std::vector<Bump> out;
    out.push_back({mid, 0.5 * half, tm, 0.8 * T});
    for (int a = 0; a < std::min(g.dim(), 2); ++a)
        for (int side : {-1, 1}) {
            Point c = mid;
            c[a] += side * 0.4 * half;
            out.push_back({c, 0.45 * half, tm + 0.1 * side * T, 0.6 * T});
        }
    return out;
}

/**
 * max over the battery of |int int -u phi_t + A(Du^m).Dphi - f phi| / int int (|phi| + |phi_t| + |Dphi|),
 * all integrals by the nodal rule on the full grid.
 */
inline double weak_residual(const ScalarField& u, const ScalarField* f, const StructureField& A, double m,
                            const std::vector<Bump>& battery) {
    const auto& g = u.grid();
    const int n = g.dim();
    const ScalarField v = u.power(m);
    double worst = 0.0;
    std::vector<double> cellw(g.space_size());
    for (std::size_t j = 0; j < cellw.size(); ++j) cellw[j] = g.cell_volume(j);
    for (const Bump& b : battery) {
        double I = 0.0, norm = 0.0;
        for (std::size_t k = 0; k < g.time_nodes(); ++k) {
            const double t = g.time(k);
            const double st = (t - b.t0) / b.tau;
            const double pt = detail::psi(st);
            if (pt == 0.0) continue;
            const double pt_t = detail::dpsi(st) / b.tau;
            const double wt = g.time_cell_length(k);
            const auto vs = v.slice(k);
            double Ik = 0.0, Nk = 0.0;
            for (std::size_t j = 0; j < g.space_size(); ++j) {
                const Point x = g.point(j);
                const double r = distance(x, b.c, n);
                const double sr = r / b.rho;
                const double px = detail::psi(sr);
                if (px == 0.0) continue;
                const double phi = px * pt, phi_t = px * pt_t;
                const double dr = r > 0.0 ? detail::dpsi(sr) / b.rho * pt / r : 0.0;
                double flux = 0.0, gnorm = 0.0;
                for (int a = 0; a < n; ++a) {
                    const double dphi = dr * (x[a] - b.c[a]);
                    const double d = slice_derivative(g, vs, j, a);
                    flux += A.coefficient(a, x, t) * d * dphi;
                    gnorm += dphi * dphi;
                }
                const double fv = f ? f->at(k, j) : 0.0;
                Ik += cellw[j] * (-u.at(k, j) * phi_t + flux - fv * phi);
                Nk += cellw[j] * (std::abs(phi) + std::abs(phi_t) + std::sqrt(gnorm));
            }
            I += wt * Ik;
            norm += wt * Nk;
        }
        if (norm > 0.0) worst = std::max(worst, std::abs(I) / norm);
    }
    return worst;
}

}  // namespace fdelab
