#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "../grid/quadrature.hpp"
#include "../parallel.hpp"
#include "structure.hpp"

namespace fdelab {

enum class Scheme { Explicit, SemiImplicit };
enum class BoundaryMode { ExactTrace, FixedData };

struct SolverConfig {
    Scheme scheme = Scheme::SemiImplicit;
    /// Absolute floor; unset means 1e-6 * max(u0).
    std::optional<double> u_floor{};
    double cfl_safety = 0.9;
    double lin_tol = 1e-10;
    int lin_max_iter = 20000;
    BoundaryMode boundary = BoundaryMode::FixedData;
    std::function<double(const Point&, double)> trace{};

    void validate() const {
        require(!u_floor || *u_floor > 0.0, ErrorCode::InvalidArgument, "u_floor must be positive");
        require(cfl_safety > 0.0 && cfl_safety < 1.0, ErrorCode::InvalidArgument, "cfl_safety must lie in (0,1)");
        require(lin_tol > 0.0 && lin_max_iter > 0, ErrorCode::InvalidArgument, "bad linear solver settings");
        require(boundary != BoundaryMode::ExactTrace || bool(trace), ErrorCode::InvalidArgument,
                "exact-trace boundary needs a trace function");
    }
};

struct StepStats {
    double t = 0.0;  ///< time reached by the step
    std::size_t clamped = 0;
    double u_min = 0.0;
    double u_max = 0.0;
    double cfl_margin = 0.0;  ///< admissible dt / dt (explicit only)
    int lin_iterations = 0;
    double lin_error = 0.0;
};

struct Trajectory {
    ScalarField u;
    std::vector<StepStats> steps;
    std::size_t clamped = 0;
    double u_floor = 0.0;
};

namespace detail {

inline double power_floor(double u, double m) { return u <= 0.0 ? 0.0 : std::pow(u, m); }

inline Point face_point(const Point& x, int axis, double offset) {
    Point y = x;
    y[axis] += offset;
    return y;
}

// Secant diffusivity of v = max(u,floor)^m between two nodes.
inline double secant_diffusivity(double ui, double uj, double m, double floor) {
    const double a = std::max(ui, floor), b = std::max(uj, floor);
    if (std::abs(b - a) <= 1e-12 * std::max(a, b)) return m * std::pow(0.5 * (a + b), m - 1.0);
    return (std::pow(b, m) - std::pow(a, m)) / (b - a);
}

}  // namespace detail

/**
 * One step from t to t + dt on grid g. Boundary nodes take the Dirichlet data
 * at t + dt; f_slice is the source at t (explicit) or t + dt (semi-implicit).
 */
inline std::vector<double> step(const SpaceTimeGrid& g, double t, std::span<const double> u_now,
                                std::span<const double> f_slice, const StructureField& A, const ModelParams& params,
                                const SolverConfig& cfg, double dt, double u_floor, StepStats* stats = nullptr) {
    cfg.validate();
    require(u_floor > 0.0, ErrorCode::InvalidArgument, "u_floor must be positive");
    const std::size_t S = g.space_size();
    require(u_now.size() == S, ErrorCode::InvalidArgument, "slice size mismatch");
    require(f_slice.empty() || f_slice.size() == S, ErrorCode::InvalidArgument, "source slice size mismatch");
    const int n = g.dim();
    const double h = g.h(), h2 = h * h, m = params.m;
    const double t_next = t + dt;
    auto source = [&](std::size_t j) { return f_slice.empty() ? 0.0 : f_slice[j]; };
    auto boundary_value = [&](std::size_t j) {
        if (cfg.boundary == BoundaryMode::ExactTrace) return cfg.trace(g.point(j), t_next);
        return u_now[j];
    };
    double u_min = INFINITY;
    for (double v : u_now) {
        require(v >= 0.0, ErrorCode::NegativeBase, "u_now must be nonnegative");
        u_min = std::min(u_min, v);
    }
    std::vector<double> next(S, 0.0);
    StepStats st;
    st.t = t_next;

    if (cfg.scheme == Scheme::Explicit) {
        const double Lmax = A.kind() == StructureKind::ModelIdentity ? 1.0 : A.L();
        const double dmax = m == 1.0 ? Lmax : Lmax * m * std::pow(std::max(u_floor, u_min), m - 1.0);
        const double dt_max = cfg.cfl_safety * h2 / (2.0 * n * dmax);
        st.cfl_margin = dt_max / dt;
        require(dt <= dt_max, ErrorCode::CflViolation,
                "dt=" + std::to_string(dt) + " exceeds the stability limit " + std::to_string(dt_max));
        std::vector<double> v(S);
        for (std::size_t j = 0; j < S; ++j) v[j] = detail::power_floor(u_now[j], m);
        parallel_for(S, [&](std::size_t j) {
            if (g.on_boundary(j)) {
                next[j] = boundary_value(j);
                return;
            }
            const Point x = g.point(j);
            double div = 0.0;
            for (int a = 0; a < n; ++a) {
                const std::size_t s = g.stride(a);
                const double dp = A.coefficient(a, detail::face_point(x, a, 0.5 * h), t);
                const double dm = A.coefficient(a, detail::face_point(x, a, -0.5 * h), t);
                div += (dp * (v[j + s] - v[j]) - dm * (v[j] - v[j - s])) / h2;
            }
            next[j] = u_now[j] + dt * (div + source(j));
        });
    } else {
        // Unknowns are the interior nodes; boundary values enter the right-hand side.
        std::vector<long> unknown(S, -1);
        long count = 0;
        for (std::size_t j = 0; j < S; ++j)
            if (!g.on_boundary(j)) unknown[j] = count++;
        std::vector<double> bval(S, 0.0);
        for (std::size_t j = 0; j < S; ++j)
            if (unknown[j] < 0) bval[j] = boundary_value(j);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(count) * (2 * n + 1));
        Eigen::VectorXd rhs(count);
        for (std::size_t j = 0; j < S; ++j) {
            const long r = unknown[j];
            if (r < 0) continue;
            const Point x = g.point(j);
            double diag = 1.0 / dt;
            double b = u_now[j] / dt + source(j);
            for (int a = 0; a < n; ++a) {
                const std::size_t s = g.stride(a);
                for (int side : {-1, 1}) {
                    const std::size_t nb = side > 0 ? j + s : j - s;
                    const double coef =
                        A.coefficient(a, detail::face_point(x, a, 0.5 * side * h), t_next) *
                        (m == 1.0 ? 1.0 : detail::secant_diffusivity(u_now[j], u_now[nb], m, u_floor)) / h2;
                    diag += coef;
                    if (unknown[nb] >= 0)
                        trip.emplace_back(r, unknown[nb], -coef);
                    else
                        b += coef * bval[nb];
                }
            }
            trip.emplace_back(r, r, diag);
            rhs[r] = b;
        }
        Eigen::SparseMatrix<double> M(count, count);
        M.setFromTriplets(trip.begin(), trip.end());
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(cfg.lin_tol);
        cg.setMaxIterations(cfg.lin_max_iter);
        cg.compute(M);
        Eigen::VectorXd guess(count);
        for (std::size_t j = 0; j < S; ++j)
            if (unknown[j] >= 0) guess[unknown[j]] = u_now[j];
        const Eigen::VectorXd sol = cg.solveWithGuess(rhs, guess);
        st.lin_iterations = static_cast<int>(cg.iterations());
        st.lin_error = cg.error();
        require(cg.info() == Eigen::Success && sol.allFinite(), ErrorCode::LinearSolveDiverged,
                "conjugate gradients stopped at relative residual " + std::to_string(cg.error()) + " after " +
                    std::to_string(cg.iterations()) + " iterations");
        for (std::size_t j = 0; j < S; ++j) next[j] = unknown[j] >= 0 ? sol[unknown[j]] : bval[j];
    }

    st.u_min = INFINITY;
    st.u_max = -INFINITY;
    for (double& v : next) {
        if (v < 0.0) {
            v = 0.0;
            ++st.clamped;
        }
        st.u_min = std::min(st.u_min, v);
        st.u_max = std::max(st.u_max, v);
    }
    if (stats) *stats = st;
    return next;
}

/// Marches u0 (values at t_start) across every time node of g.
inline Trajectory solve(const SpaceTimeGrid& g, std::span<const double> u0, const ScalarField* f,
                        const StructureField& A, const ModelParams& params, const SolverConfig& cfg) {
    cfg.validate();
    const std::size_t S = g.space_size();
    require(u0.size() == S, ErrorCode::InvalidArgument, "initial data size mismatch");
    require(!f || f->grid() == g, ErrorCode::InvalidArgument, "source lives on a different grid");
    double umax = 0.0;
    for (double v : u0) {
        require(v >= 0.0, ErrorCode::NegativeBase, "initial data must be nonnegative");
        umax = std::max(umax, v);
    }
    Trajectory out;
    out.u_floor = cfg.u_floor ? *cfg.u_floor : (umax > 0.0 ? 1e-6 * umax : 1e-12);
    std::vector<double> values(g.size());
    std::copy(u0.begin(), u0.end(), values.begin());
    std::vector<double> cur(u0.begin(), u0.end());
    for (std::size_t k = 0; k + 1 < g.time_nodes(); ++k) {
        std::span<const double> fs{};
        if (f) fs = f->slice(cfg.scheme == Scheme::Explicit ? k : k + 1);
        StepStats st;
        const double dt = g.time(k + 1) - g.time(k);
        cur = step(g, g.time(k), cur, fs, A, params, cfg, dt, out.u_floor, &st);
        out.clamped += st.clamped;
        out.steps.push_back(st);
        std::copy(cur.begin(), cur.end(), values.begin() + static_cast<std::ptrdiff_t>((k + 1) * S));
    }
    out.u = ScalarField(g, std::move(values), true, "u");
    return out;
}

/// Samples u0 from a function of x at t_start.
template <class Fn>
std::vector<double> initial_slice(const SpaceTimeGrid& g, Fn&& fn) {
    std::vector<double> u0(g.space_size());
    for (std::size_t j = 0; j < u0.size(); ++j) u0[j] = fn(g.point(j), g.t_start());
    return u0;
}

}  // namespace fdelab
