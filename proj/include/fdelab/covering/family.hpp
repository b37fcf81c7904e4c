#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "../geometry/profile.hpp"
#include "../parallel.hpp"

namespace fdelab {

/// Calls fn(linear index) for every grid node inside the open cylinder q.
template <class Fn>
void for_each_node_inside(const SpaceTimeGrid& g, const Cylinder& q, Fn&& fn) {
    const int n = g.dim();
    auto range = [](double a, double b, double lo, double step, std::size_t count) {
        const double u0 = std::floor((a - lo) / step), u1 = std::ceil((b - lo) / step);
        const std::size_t i0 = u0 <= 0.0 ? 0 : std::min(count, static_cast<std::size_t>(u0));
        const std::size_t i1 = u1 < 0.0 ? 0 : std::min(count - 1, static_cast<std::size_t>(u1));
        return std::pair<std::size_t, std::size_t>{i0, i1};
    };
    const auto [k0, k1] = range(q.t_lo(), q.t_hi(), g.t_start(), g.dt(), g.time_nodes());
    std::array<std::pair<std::size_t, std::size_t>, 3> r{};
    for (int a = 0; a < 3; ++a) r[a] = {0, 0};
    for (int a = 0; a < n; ++a) {
        r[a] = range(q.x[a] - q.rho, q.x[a] + q.rho, g.lo(a), g.h(), g.nodes(a));
        if (r[a].first > r[a].second) return;
    }
    std::vector<std::size_t> ball;
    for (std::size_t i0 = r[0].first; i0 <= r[0].second; ++i0)
        for (std::size_t i1 = r[1].first; i1 <= r[1].second; ++i1)
            for (std::size_t i2 = r[2].first; i2 <= r[2].second; ++i2) {
                const std::size_t j = g.space_index({i0, i1, i2});
                if (distance(g.point(j), q.x, n) < q.rho) ball.push_back(j);
            }
    for (std::size_t k = k0; k <= k1 && k < g.time_nodes(); ++k) {
        if (!(std::abs(g.time(k) - q.t) < q.half)) continue;
        for (std::size_t j : ball) fn(g.index(k, j));
    }
}

struct BasePoint {
    Point x{0, 0, 0};
    double t = 0.0;
    std::size_t node = 0;  ///< linear grid index of the base point
};

/**
 * Grid nodes inside the open centered cylinder Q_{a,a} = (-a, a) x B_a, taking
 * every stride-th node per axis counted from the node nearest the origin.
 */
inline std::vector<BasePoint> lattice_bases(const SpaceTimeGrid& g, std::size_t stride, double a = 1.0) {
    require(stride >= 1, ErrorCode::InvalidArgument, "lattice stride must be at least 1");
    const int n = g.dim();
    std::array<std::size_t, 3> origin{0, 0, 0};
    for (int ax = 0; ax < n; ++ax)
        origin[ax] = static_cast<std::size_t>(std::llround((0.0 - g.lo(ax)) / g.h()));
    const std::size_t k_origin = g.nearest_time(0.0);
    auto on_lattice = [&](std::size_t i, std::size_t o) { return (i > o ? i - o : o - i) % stride == 0; };
    std::vector<BasePoint> out;
    for (std::size_t k = 0; k < g.time_nodes(); ++k) {
        if (!on_lattice(k, k_origin) || !(std::abs(g.time(k)) < a)) continue;
        for (std::size_t j = 0; j < g.space_size(); ++j) {
            const auto idx = g.space_multi(j);
            bool keep = true;
            for (int ax = 0; ax < n && keep; ++ax) keep = on_lattice(idx[ax], origin[ax]);
            const Point x = g.point(j);
            if (!keep || !(distance(x, Point{0, 0, 0}, n) < a)) continue;
            out.push_back({x, g.time(k), g.index(k, j)});
        }
    }
    return out;
}

struct FamilyMember {
    std::size_t base = 0;
    std::size_t level = 0;
    Cylinder q;
    double mean = 0.0;  ///< mean of |F| over q
};

/**
 * The discretized intrinsic family {Q(s, y)}: one scaling profile per base
 * point (built from the profile field, typically u^(m+1)) and the mean of F on
 * each of its cylinders. Members are stored base-major.
 */
class CylinderFamily {
public:
    CylinderFamily(const ScalarField& F, const ProfileBuilder& builder, std::vector<BasePoint> bases,
                   std::size_t threads = default_threads())
        : F_(F), bases_(std::move(bases)), consts_(builder.consts()), L_(builder.sgrid().levels_per_octave) {
        require(F.grid() == builder.integrator().grid(), ErrorCode::InvalidArgument,
                "F and the profile field must share a grid");
        const std::size_t N = builder.s_values().size();
        levels_ = N;
        profiles_.resize(bases_.size());
        members_.resize(bases_.size() * N);
        parallel_for(
            bases_.size(),
            [&](std::size_t b) {
                profiles_[b] = builder.build(bases_[b].x, bases_[b].t);
                const auto& P = profiles_[b];
                BallAccumulator acc(F_.grid(), P.x, P.r.back());
                std::vector<double> w(acc.nodes().size());
                for (std::size_t j = 0; j < N; ++j) {
                    const Cylinder q = P.cylinder(j);
                    for (std::size_t i = 0; i < w.size(); ++i) w[i] = F_.node_window(acc.nodes()[i], q.t_lo(), q.t_hi());
                    acc.load(w);
                    const double meas = acc.measure(q.rho) * F_.window_measure(q.t_lo(), q.t_hi());
                    members_[b * N + j] = {b, j, q, meas > 0.0 ? acc.integral(q.rho) / meas : 0.0};
                }
            },
            threads);
    }

    const WindowIntegrator& F() const { return F_; }
    const SpaceTimeGrid& grid() const { return F_.grid(); }
    const std::vector<BasePoint>& bases() const { return bases_; }
    const std::vector<ScalingProfile>& profiles() const { return profiles_; }
    const std::vector<FamilyMember>& members() const { return members_; }
    const GeometryConstants& consts() const { return consts_; }
    int levels_per_octave() const { return L_; }
    std::size_t levels() const { return levels_; }
    std::size_t index(std::size_t base, std::size_t level) const { return base * levels_ + level; }
    const FamilyMember& member(std::size_t base, std::size_t level) const { return members_[index(base, level)]; }

    /// Member order used by stopping-time scans: larger s, larger measure, then smaller base (t, x lexicographic).
    std::vector<std::size_t> scan_order() const {
        std::vector<std::size_t> order(members_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        const int n = consts_.n;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& A = members_[a];
            const auto& B = members_[b];
            if (A.level != B.level) return A.level > B.level;
            if (A.q.rho != B.q.rho) return A.q.rho > B.q.rho;
            const auto& ya = bases_[A.base];
            const auto& yb = bases_[B.base];
            if (ya.t != yb.t) return ya.t < yb.t;
            for (int ax = 0; ax < n; ++ax)
                if (ya.x[ax] != yb.x[ax]) return ya.x[ax] < yb.x[ax];
            return a < b;
        });
        return order;
    }

private:
    WindowIntegrator F_;
    std::vector<BasePoint> bases_;
    GeometryConstants consts_;
    int L_ = 8;
    std::size_t levels_ = 0;
    std::vector<ScalingProfile> profiles_;
    std::vector<FamilyMember> members_;
};

/// M(F)(z) = max over family cylinders containing z of their mean; 0 where no member contains z.
inline ScalarField intrinsic_maximal(const CylinderFamily& fam) {
    const auto& g = fam.grid();
    std::vector<double> M(g.size(), 0.0);
    for (const auto& mem : fam.members())
        for_each_node_inside(g, mem.q, [&](std::size_t i) { M[i] = std::max(M[i], mem.mean); });
    return ScalarField(g, std::move(M), true, "M(F)");
}

}  // namespace fdelab
