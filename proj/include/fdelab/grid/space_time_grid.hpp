#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "params.hpp"

namespace fdelab {

struct GridSpec {
    int n = 2;
    Point lo{0, 0, 0};
    Point hi{1, 1, 1};
    std::array<std::size_t, 3> nodes{2, 2, 1};
    double t_start = 0.0;
    double t_end = 1.0;
    std::size_t time_nodes = 2;
    std::size_t budget = 40'000'000;
};

/**
 * Uniform nodal grid on box x [t_start, t_end]. Node i on an axis sits at
 * lo + (hi - lo) i / (N - 1); its control volume is [x_i - h/2, x_i + h/2]
 * clipped to the box, so boundary nodes own half cells and the control
 * volumes tile the box exactly. Same for time.
 *
 * Linear index: (k * N0 + i0) * N1 + i1 (time slowest, last axis fastest).
 */
class SpaceTimeGrid {
public:
    SpaceTimeGrid() = default;

    explicit SpaceTimeGrid(const GridSpec& spec) : spec_(spec) {
        require(spec.n >= 1 && spec.n <= 3, ErrorCode::InvalidArgument, "grid dimension must be 1, 2 or 3");
        for (int a = 0; a < 3; ++a) {
            if (a >= spec.n) {
                spec_.nodes[a] = 1;
                spec_.lo[a] = spec_.hi[a] = 0.0;
                continue;
            }
            require(spec.nodes[a] >= 2, ErrorCode::InvalidArgument, "need at least 2 nodes per axis");
            require(spec.hi[a] > spec.lo[a], ErrorCode::InvalidArgument, "empty spatial box");
        }
        require(spec.time_nodes >= 2, ErrorCode::InvalidArgument, "need at least 2 time nodes");
        require(spec.t_end > spec.t_start, ErrorCode::InvalidArgument, "empty time range");
        h_ = (spec_.hi[0] - spec_.lo[0]) / double(spec_.nodes[0] - 1);
        for (int a = 1; a < spec.n; ++a) {
            const double ha = (spec_.hi[a] - spec_.lo[a]) / double(spec_.nodes[a] - 1);
            require(std::abs(ha - h_) <= 1e-12 * h_, ErrorCode::InvalidArgument, "spatial step must be uniform across axes");
        }
        dt_ = (spec.t_end - spec.t_start) / double(spec.time_nodes - 1);
        space_size_ = spec_.nodes[0] * spec_.nodes[1] * spec_.nodes[2];
        require(space_size_ * spec.time_nodes <= spec.budget, ErrorCode::InvalidArgument,
                "grid exceeds the node budget of " + std::to_string(spec.budget));
    }

    /// Cube [lo, hi]^n with the same node count on every axis.
    static SpaceTimeGrid cube(int n, double lo, double hi, std::size_t nodes, double t_start, double t_end,
                              std::size_t time_nodes) {
        GridSpec s;
        s.n = n;
        for (int a = 0; a < n; ++a) {
            s.lo[a] = lo;
            s.hi[a] = hi;
            s.nodes[a] = nodes;
        }
        s.t_start = t_start;
        s.t_end = t_end;
        s.time_nodes = time_nodes;
        return SpaceTimeGrid(s);
    }

    const GridSpec& spec() const { return spec_; }
    int dim() const { return spec_.n; }
    std::size_t nodes(int axis) const { return spec_.nodes[axis]; }
    std::size_t time_nodes() const { return spec_.time_nodes; }
    std::size_t space_size() const { return space_size_; }
    std::size_t size() const { return space_size_ * spec_.time_nodes; }
    double h() const { return h_; }
    double dt() const { return dt_; }
    double lo(int axis) const { return spec_.lo[axis]; }
    double hi(int axis) const { return spec_.hi[axis]; }
    double t_start() const { return spec_.t_start; }
    double t_end() const { return spec_.t_end; }

    double coord(int axis, std::size_t i) const {
        const std::size_t last = spec_.nodes[axis] - 1;
        if (i == last) return spec_.hi[axis];
        return spec_.lo[axis] + (spec_.hi[axis] - spec_.lo[axis]) * double(i) / double(last);
    }
    double time(std::size_t k) const {
        const std::size_t last = spec_.time_nodes - 1;
        if (k == last) return spec_.t_end;
        return spec_.t_start + (spec_.t_end - spec_.t_start) * double(k) / double(last);
    }

    std::array<std::size_t, 3> space_multi(std::size_t j) const {
        std::array<std::size_t, 3> idx{0, 0, 0};
        idx[2] = j % spec_.nodes[2];
        j /= spec_.nodes[2];
        idx[1] = j % spec_.nodes[1];
        idx[0] = j / spec_.nodes[1];
        return idx;
    }
    std::size_t space_index(const std::array<std::size_t, 3>& idx) const {
        return (idx[0] * spec_.nodes[1] + idx[1]) * spec_.nodes[2] + idx[2];
    }
    std::size_t stride(int axis) const {
        std::size_t s = 1;
        for (int a = 2; a > axis; --a) s *= spec_.nodes[a];
        return s;
    }
    std::size_t index(std::size_t k, std::size_t j) const { return k * space_size_ + j; }

    Point point(std::size_t j) const {
        const auto idx = space_multi(j);
        Point x{0, 0, 0};
        for (int a = 0; a < spec_.n; ++a) x[a] = coord(a, idx[a]);
        return x;
    }

    bool on_boundary(std::size_t j) const {
        const auto idx = space_multi(j);
        for (int a = 0; a < spec_.n; ++a)
            if (idx[a] == 0 || idx[a] + 1 == spec_.nodes[a]) return true;
        return false;
    }

    std::pair<double, double> cell(int axis, std::size_t i) const {
        const double x = coord(axis, i);
        return {std::max(spec_.lo[axis], x - 0.5 * h_), std::min(spec_.hi[axis], x + 0.5 * h_)};
    }
    std::pair<double, double> time_cell(std::size_t k) const {
        const double t = time(k);
        return {std::max(spec_.t_start, t - 0.5 * dt_), std::min(spec_.t_end, t + 0.5 * dt_)};
    }
    double cell_volume(std::size_t j) const {
        const auto idx = space_multi(j);
        double v = 1.0;
        for (int a = 0; a < spec_.n; ++a) {
            const auto [c0, c1] = cell(a, idx[a]);
            v *= c1 - c0;
        }
        return v;
    }
    double time_cell_length(std::size_t k) const {
        const auto [a, b] = time_cell(k);
        return b - a;
    }

    /// Index of the time node nearest to t (clamped to the range).
    std::size_t nearest_time(double t) const {
        const double u = (t - spec_.t_start) / dt_;
        if (u <= 0) return 0;
        const auto k = static_cast<std::size_t>(std::llround(u));
        return std::min(k, spec_.time_nodes - 1);
    }

    bool operator==(const SpaceTimeGrid& o) const {
        if (spec_.n != o.spec_.n || spec_.time_nodes != o.spec_.time_nodes) return false;
        if (spec_.t_start != o.spec_.t_start || spec_.t_end != o.spec_.t_end) return false;
        for (int a = 0; a < spec_.n; ++a)
            if (spec_.nodes[a] != o.spec_.nodes[a] || spec_.lo[a] != o.spec_.lo[a] || spec_.hi[a] != o.spec_.hi[a])
                return false;
        return true;
    }

private:
    GridSpec spec_{};
    double h_ = 0.0;
    double dt_ = 0.0;
    std::size_t space_size_ = 0;
};

}  // namespace fdelab
