#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "space_time_grid.hpp"

namespace fdelab {

/// One real value per space-time node. Immutable once constructed.
class ScalarField {
public:
    ScalarField() = default;

    ScalarField(SpaceTimeGrid grid, std::vector<double> values, bool nonnegative = false, std::string name = "")
        : grid_(std::move(grid)), values_(std::move(values)), nonnegative_(nonnegative), name_(std::move(name)) {
        require(values_.size() == grid_.size(), ErrorCode::InvalidArgument,
                "field has " + std::to_string(values_.size()) + " values for " + std::to_string(grid_.size()) + " nodes");
        if (nonnegative_)
            for (double v : values_)
                require(v >= 0.0, ErrorCode::NegativeBase, "field '" + name_ + "' flagged nonnegative has a negative value");
    }

    /// Samples fn(x, t) at every node.
    template <class Fn>
    static ScalarField sample(const SpaceTimeGrid& grid, Fn&& fn, bool nonnegative = false, std::string name = "") {
        std::vector<double> v(grid.size());
        std::vector<Point> pts(grid.space_size());
        for (std::size_t j = 0; j < pts.size(); ++j) pts[j] = grid.point(j);
        for (std::size_t k = 0; k < grid.time_nodes(); ++k) {
            const double t = grid.time(k);
            for (std::size_t j = 0; j < pts.size(); ++j) v[grid.index(k, j)] = fn(pts[j], t);
        }
        return ScalarField(grid, std::move(v), nonnegative, std::move(name));
    }

    static ScalarField constant(const SpaceTimeGrid& grid, double c, std::string name = "") {
        return ScalarField(grid, std::vector<double>(grid.size(), c), c >= 0.0, std::move(name));
    }

    const SpaceTimeGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<const double> slice(std::size_t k) const {
        return std::span<const double>(values_).subspan(k * grid_.space_size(), grid_.space_size());
    }
    double operator[](std::size_t idx) const { return values_[idx]; }
    double at(std::size_t k, std::size_t j) const { return values_[grid_.index(k, j)]; }
    bool nonnegative() const { return nonnegative_; }
    const std::string& name() const { return name_; }

    /// Nodewise g(value); the result keeps the grid.
    template <class Fn>
    ScalarField map(Fn&& g, bool nonnegative, std::string name) const {
        std::vector<double> v(values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = g(values_[i]);
        return ScalarField(grid_, std::move(v), nonnegative, std::move(name));
    }

    /// |u|^e with 0^e = 0.
    ScalarField power(double e, std::string name = "") const {
        return map([e](double x) { return x == 0.0 ? 0.0 : std::pow(std::abs(x), e); }, true, std::move(name));
    }

    double max_value() const {
        double m = -INFINITY;
        for (double v : values_) m = std::max(m, v);
        return m;
    }
    double min_value() const {
        double m = INFINITY;
        for (double v : values_) m = std::min(m, v);
        return m;
    }

private:
    SpaceTimeGrid grid_{};
    std::vector<double> values_{};
    bool nonnegative_ = false;
    std::string name_{};
};

}  // namespace fdelab
