#pragma once

#include <functional>
#include <vector>

#include "../grid/params.hpp"

namespace fdelab {

enum class StructureKind { ModelIdentity, DiagonalAnisotropic };

/// A(x,t,u,xi) = diag(d_1(x,t), ..., d_n(x,t)) xi; the identity for the model equation.
class StructureField {
public:
    using Coefficient = std::function<double(const Point&, double)>;

    static StructureField identity() { return StructureField{}; }

    static StructureField diagonal(std::vector<Coefficient> d, double nu, double L) {
        require(nu > 0.0 && nu <= L, ErrorCode::InvalidArgument, "need 0 < nu <= L");
        require(!d.empty(), ErrorCode::InvalidArgument, "need one coefficient per axis");
        StructureField s;
        s.kind_ = StructureKind::DiagonalAnisotropic;
        s.d_ = std::move(d);
        s.nu_ = nu;
        s.L_ = L;
        return s;
    }

    StructureKind kind() const { return kind_; }
    double nu() const { return nu_; }
    double L() const { return L_; }

    double coefficient(int axis, const Point& x, double t) const {
        if (kind_ == StructureKind::ModelIdentity) return 1.0;
        return d_[static_cast<std::size_t>(axis) % d_.size()](x, t);
    }

    void apply(const Point& x, double t, const double* xi, double* out, int n) const {
        for (int a = 0; a < n; ++a) out[a] = coefficient(a, x, t) * xi[a];
    }

private:
    StructureKind kind_ = StructureKind::ModelIdentity;
    std::vector<Coefficient> d_{};
    double nu_ = 1.0;
    double L_ = 1.0;
};

}  // namespace fdelab
