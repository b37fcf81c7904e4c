#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "../grid/quadrature.hpp"

namespace fdelab {

/**
 * Integrals of |f| over time windows for single spatial nodes, from per-node
 * prefix sums over the time control volumes. A window costs O(1) per node.
 */
class WindowIntegrator {
public:
    WindowIntegrator() = default;

    explicit WindowIntegrator(const ScalarField& f) : field_(f) {
        const auto& g = f.grid();
        const std::size_t NT = g.time_nodes(), S = g.space_size();
        prefix_.assign(S * (NT + 1), 0.0);
        for (std::size_t j = 0; j < S; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < NT; ++k) {
                prefix_[j * (NT + 1) + k] = acc;
                acc += std::abs(f.at(k, j)) * g.time_cell_length(k);
            }
            prefix_[j * (NT + 1) + NT] = acc;
        }
    }

    const ScalarField& field() const { return field_; }
    const SpaceTimeGrid& grid() const { return field_.grid(); }

    double window_measure(double a, double b) const {
        const auto& g = grid();
        return std::max(0.0, std::min(b, g.t_end()) - std::max(a, g.t_start()));
    }

    /// sum_k |f(k,j)| |CV_k intersected with (a,b)|
    double node_window(std::size_t j, double a, double b) const {
        const auto& g = grid();
        if (b <= g.t_start() || a >= g.t_end() || b <= a) return 0.0;
        const std::size_t NT = g.time_nodes();
        const std::size_t ka = g.nearest_time(a), kb = g.nearest_time(b);
        auto part = [&](std::size_t k) {
            const auto [c0, c1] = g.time_cell(k);
            return std::abs(field_.at(k, j)) * geom::interval_overlap(c0, c1, a, b);
        };
        if (ka == kb) return part(ka);
        const double* P = prefix_.data() + j * (NT + 1);
        return part(ka) + part(kb) + (P[kb] - P[ka + 1]);
    }

    double cylinder_integral(const Cylinder& q) const {
        const SpaceWeights sw = ball_weights(grid(), q.x, q.rho);
        double s = 0.0;
        for (std::size_t b = 0; b < sw.nodes.size(); ++b) s += sw.w[b] * node_window(sw.nodes[b], q.t_lo(), q.t_hi());
        return s;
    }

    double cylinder_mean(const Cylinder& q) const {
        const SpaceWeights sw = ball_weights(grid(), q.x, q.rho);
        const double meas = sw.total * window_measure(q.t_lo(), q.t_hi());
        require(meas > 0.0, ErrorCode::EmptyIntersection, "cylinder misses the grid domain");
        double s = 0.0;
        for (std::size_t b = 0; b < sw.nodes.size(); ++b) s += sw.w[b] * node_window(sw.nodes[b], q.t_lo(), q.t_hi());
        return s / meas;
    }

private:
    ScalarField field_{};
    std::vector<double> prefix_{};
};

/**
 * Spatial nodes around a center sorted by the far distance of their control
 * volume, so that the ball integral at radius rho only needs exact overlap
 * areas for the O(rho/h) cells cut by the sphere.
 */
class BallAccumulator {
public:
    BallAccumulator(const SpaceTimeGrid& g, const Point& c, double R_max) : grid_(&g), c_(c) {
        const int n = g.dim();
        const SpaceWeights cover = ball_weights(g, c, R_max);
        struct Item {
            std::size_t j;
            double near, far, vol;
            Point lo, hi;
        };
        std::vector<Item> items;
        items.reserve(cover.nodes.size());
        for (std::size_t j : cover.nodes) {
            const auto idx = g.space_multi(j);
            Item it{j, 0.0, 0.0, 1.0, {0, 0, 0}, {0, 0, 0}};
            double n2 = 0.0, f2 = 0.0;
            for (int a = 0; a < n; ++a) {
                std::tie(it.lo[a], it.hi[a]) = g.cell(a, idx[a]);
                const double dn = std::max({it.lo[a] - c[a], 0.0, c[a] - it.hi[a]});
                const double df = std::max(std::abs(it.lo[a] - c[a]), std::abs(it.hi[a] - c[a]));
                n2 += dn * dn;
                f2 += df * df;
                it.vol *= it.hi[a] - it.lo[a];
            }
            it.near = std::sqrt(n2);
            it.far = std::sqrt(f2);
            items.push_back(it);
        }
        std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.far < b.far; });
        for (const auto& it : items) {
            nodes_.push_back(it.j);
            near_.push_back(it.near);
            far_.push_back(it.far);
            vol_.push_back(it.vol);
            lo_.push_back(it.lo);
            hi_.push_back(it.hi);
        }
        diag_ = g.h() * std::sqrt(double(n));
        vol_prefix_.assign(nodes_.size() + 1, 0.0);
        for (std::size_t i = 0; i < nodes_.size(); ++i) vol_prefix_[i + 1] = vol_prefix_[i] + vol_[i];
    }

    const std::vector<std::size_t>& nodes() const { return nodes_; }

    /// Prefix sums of w[i] * vol[i] in sorted order; w aligned with nodes().
    void load(const std::vector<double>& w) {
        w_ = &w;
        prefix_.assign(nodes_.size() + 1, 0.0);
        for (std::size_t i = 0; i < nodes_.size(); ++i) prefix_[i + 1] = prefix_[i] + w[i] * vol_[i];
    }

    /// sum_i w_i |CV_i intersected with B_rho(c)|
    double integral(double rho) const { return accumulate(rho, true); }
    /// |B_rho(c) intersected with the box|
    double measure(double rho) const { return accumulate(rho, false); }

private:
    double accumulate(double rho, bool weighted) const {
        const std::size_t pos = static_cast<std::size_t>(std::upper_bound(far_.begin(), far_.end(), rho) - far_.begin());
        double s = weighted ? prefix_[pos] : vol_prefix_[pos];
        const int n = grid_->dim();
        for (std::size_t i = pos; i < far_.size() && far_[i] <= rho + diag_ * (1.0 + 1e-12); ++i) {
            if (near_[i] >= rho) continue;
            const double a = geom::ball_box_measure(n, c_, rho, lo_[i], hi_[i]);
            s += weighted ? (*w_)[i] * a : a;
        }
        return s;
    }

    const SpaceTimeGrid* grid_;
    Point c_;
    double diag_ = 0.0;
    std::vector<std::size_t> nodes_;
    std::vector<double> near_, far_, vol_;
    std::vector<Point> lo_, hi_;
    std::vector<double> prefix_, vol_prefix_;
    const std::vector<double>* w_ = nullptr;
};

}  // namespace fdelab
