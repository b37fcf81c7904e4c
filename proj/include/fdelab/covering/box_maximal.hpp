#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "../grid/quadrature.hpp"
#include "../parallel.hpp"

namespace fdelab {

/**
 * M*(g)(x,t): sup of the mean of |g| over I x B containing (x,t), with I a
 * union of consecutive time control volumes and B an open ball centered at a
 * node, clipped to the grid box. Dyadic: radii (h/2) 2^k and 2^k time cells.
 * Exhaustive: radii (h/2) k and every interval.
 */
enum class BoxMode { Dyadic, Exhaustive };

namespace detail {

inline std::vector<double> box_radii(const SpaceTimeGrid& g, BoxMode mode) {
    double diag = 0.0;
    for (int a = 0; a < g.dim(); ++a) diag += (g.hi(a) - g.lo(a)) * (g.hi(a) - g.lo(a));
    diag = std::sqrt(diag);
    std::vector<double> r;
    const double h2 = 0.5 * g.h();
    if (mode == BoxMode::Dyadic) {
        for (double rho = h2; rho <= 2.0 * diag; rho *= 2.0) r.push_back(rho);
    } else {
        for (std::size_t k = 1; h2 * double(k) <= diag + h2; ++k) r.push_back(h2 * double(k));
    }
    return r;
}

/// best[k] = max over admissible windows containing time node k of the window mean on one ball.
inline void best_windows(const std::vector<double>& slice_integral, const std::vector<double>& cell_len, double area,
                         BoxMode mode, std::vector<double>& best) {
    const std::size_t NT = slice_integral.size();
    std::vector<double> P(NT + 1, 0.0), T(NT + 1, 0.0);
    for (std::size_t k = 0; k < NT; ++k) {
        P[k + 1] = P[k] + slice_integral[k] * cell_len[k];
        T[k + 1] = T[k] + cell_len[k];
    }
    best.assign(NT, 0.0);
    auto visit = [&](std::size_t a, std::size_t len) {
        const double m = (P[a + len] - P[a]) / (area * (T[a + len] - T[a]));
        for (std::size_t k = a; k < a + len; ++k) best[k] = std::max(best[k], m);
    };
    for (std::size_t len = 1; len <= NT; len = (mode == BoxMode::Dyadic ? 2 * len : len + 1))
        for (std::size_t a = 0; a + len <= NT; ++a) visit(a, len);
}

struct BallSlices {
    SpaceWeights sw;
    std::vector<double> slice;
};

inline BallSlices ball_slices(const ScalarField& f, const Point& c, double rho) {
    const auto& g = f.grid();
    BallSlices b{ball_weights(g, c, rho), std::vector<double>(g.time_nodes(), 0.0)};
    for (std::size_t k = 0; k < g.time_nodes(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < b.sw.nodes.size(); ++i) s += b.sw.w[i] * std::abs(f.at(k, b.sw.nodes[i]));
        b.slice[k] = s;
    }
    return b;
}

inline std::vector<double> time_cell_lengths(const SpaceTimeGrid& g) {
    std::vector<double> len(g.time_nodes());
    for (std::size_t k = 0; k < len.size(); ++k) len[k] = g.time_cell_length(k);
    return len;
}

}  // namespace detail

/// Factor by which a dyadic sup may under-estimate the sup over all boxes.
inline double box_correction(int n) { return std::exp2(double(n + 1)); }

inline ScalarField box_maximal(const ScalarField& f, BoxMode mode = BoxMode::Dyadic,
                               std::size_t threads = default_threads()) {
    const auto& g = f.grid();
    const auto radii = detail::box_radii(g, mode);
    const auto len = detail::time_cell_lengths(g);
    const std::size_t S = g.space_size(), NT = g.time_nodes();
    std::vector<double> M(g.size(), 0.0);
    const bool zero = std::all_of(f.values().begin(), f.values().end(), [](double v) { return v == 0.0; });
    if (zero) return ScalarField(g, std::move(M), true, "M*");
    // per-worker maxima merged by max afterwards, so the result is thread-count invariant
    const std::size_t chunks = std::max<std::size_t>(1, threads);
    std::vector<std::vector<double>> local(chunks);
    for (auto& l : local) l.assign(g.size(), 0.0);
    parallel_for(
        chunks,
        [&](std::size_t w) {
            auto& out = local[w];
            std::vector<double> best;
            for (std::size_t c = w; c < S; c += chunks) {
                const Point xc = g.point(c);
                for (double rho : radii) {
                    const auto b = detail::ball_slices(f, xc, rho);
                    if (b.sw.total <= 0.0) continue;
                    detail::best_windows(b.slice, len, b.sw.total, mode, best);
                    for (std::size_t j : b.sw.nodes) {
                        if (!(distance(g.point(j), xc, g.dim()) < rho)) continue;
                        for (std::size_t k = 0; k < NT; ++k) out[g.index(k, j)] = std::max(out[g.index(k, j)], best[k]);
                    }
                }
            }
        },
        chunks);
    for (const auto& l : local)
        for (std::size_t i = 0; i < M.size(); ++i) M[i] = std::max(M[i], l[i]);
    return ScalarField(g, std::move(M), true, "M*");
}

/// M*(f) at a single node, identical to the corresponding entry of box_maximal.
inline double box_maximal_at(const ScalarField& f, std::size_t index, BoxMode mode = BoxMode::Dyadic) {
    const auto& g = f.grid();
    const std::size_t k0 = index / g.space_size(), j0 = index % g.space_size();
    const Point x0 = g.point(j0);
    const auto radii = detail::box_radii(g, mode);
    const auto len = detail::time_cell_lengths(g);
    double out = 0.0;
    std::vector<double> best;
    for (std::size_t c = 0; c < g.space_size(); ++c) {
        const Point xc = g.point(c);
        const double d = distance(xc, x0, g.dim());
        for (double rho : radii) {
            if (!(d < rho)) continue;
            const auto b = detail::ball_slices(f, xc, rho);
            if (b.sw.total <= 0.0) continue;
            detail::best_windows(b.slice, len, b.sw.total, mode, best);
            out = std::max(out, best[k0]);
        }
    }
    return out;
}

}  // namespace fdelab
