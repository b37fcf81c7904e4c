#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "scalar_field.hpp"

namespace fdelab {

/// n components per space-time node, stored node-major.
class VectorField {
public:
    VectorField(SpaceTimeGrid grid, std::vector<double> comps) : grid_(std::move(grid)), comps_(std::move(comps)) {
        require(comps_.size() == grid_.size() * std::size_t(grid_.dim()), ErrorCode::InvalidArgument,
                "vector field size mismatch");
    }
    const SpaceTimeGrid& grid() const { return grid_; }
    double component(std::size_t idx, int axis) const { return comps_[idx * grid_.dim() + axis]; }
    double norm2(std::size_t idx) const {
        double s = 0.0;
        for (int a = 0; a < grid_.dim(); ++a) s += comps_[idx * grid_.dim() + a] * comps_[idx * grid_.dim() + a];
        return s;
    }
    std::span<const double> values() const { return comps_; }

private:
    SpaceTimeGrid grid_;
    std::vector<double> comps_;
};

/**
 * d/dx_axis of one time slice at spatial node j: central differences inside,
 * second-order one-sided differences at the box faces (first order if the
 * axis has only two nodes).
 */
inline double slice_derivative(const SpaceTimeGrid& g, std::span<const double> v, std::size_t j, int axis) {
    const std::size_t N = g.nodes(axis);
    const std::size_t st = g.stride(axis);
    const std::size_t i = g.space_multi(j)[axis];
    const double h = g.h();
    if (i > 0 && i + 1 < N) return (v[j + st] - v[j - st]) / (2.0 * h);
    if (N == 2) return i == 0 ? (v[j + st] - v[j]) / h : (v[j] - v[j - st]) / h;
    if (i == 0) return (-3.0 * v[j] + 4.0 * v[j + st] - v[j + 2 * st]) / (2.0 * h);
    return (3.0 * v[j] - 4.0 * v[j - st] + v[j - 2 * st]) / (2.0 * h);
}

inline VectorField discrete_gradient(const ScalarField& v) {
    const auto& g = v.grid();
    const int n = g.dim();
    std::vector<double> out(g.size() * n);
    for (std::size_t k = 0; k < g.time_nodes(); ++k) {
        const auto s = v.slice(k);
        for (std::size_t j = 0; j < g.space_size(); ++j)
            for (int a = 0; a < n; ++a) out[g.index(k, j) * n + a] = slice_derivative(g, s, j, a);
    }
    return VectorField(g, std::move(out));
}

/// Gradient of u^m with 0^m = 0.
inline VectorField discrete_gradient_of_power(const ScalarField& u, double m) {
    require(u.nonnegative() || u.min_value() >= 0.0, ErrorCode::NegativeBase, "u must be nonnegative");
    return discrete_gradient(u.power(m));
}

/// F = |D u^m|^2 nodewise.
inline ScalarField grad_energy_field(const ScalarField& u, double m) {
    const VectorField d = discrete_gradient_of_power(u, m);
    std::vector<double> F(u.grid().size());
    for (std::size_t i = 0; i < F.size(); ++i) F[i] = d.norm2(i);
    return ScalarField(u.grid(), std::move(F), true, "F");
}

/// |D v| nodewise for an arbitrary field.
inline ScalarField gradient_norm(const ScalarField& v) {
    const VectorField d = discrete_gradient(v);
    std::vector<double> F(v.grid().size());
    for (std::size_t i = 0; i < F.size(); ++i) F[i] = std::sqrt(d.norm2(i));
    return ScalarField(v.grid(), std::move(F), true, "|Dv|");
}

}  // namespace fdelab
