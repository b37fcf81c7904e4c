#pragma once

#include <cmath>
#include <numbers>

#include "../estimates/fields.hpp"
#include "../fde_solver.hpp"
#include "manifest.hpp"

namespace fdelab {

/// Exact value of the manifest's reference solution.
inline double exact_value(const RunManifest& M, const Point& x, double t) {
    if (M.problem.kind == ProblemKind::HeatKernel) {
        const int n = M.model.n;
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
        const double nu = M.model.nu;
        return std::exp(-r2 / (4.0 * nu * t)) / std::pow(4.0 * std::numbers::pi * nu * t, 0.5 * n);
    }
    static thread_local Barenblatt B;
    if (B.m != M.model.m || B.n != M.model.n || B.C != M.problem.C || B.alpha == 0.0) B = Barenblatt::make(M.model, M.problem.C);
    return B(x, t);
}

inline SpaceTimeGrid problem_grid(const RunManifest& M, std::size_t N) {
    const auto& p = M.problem;
    return SpaceTimeGrid::cube(M.model.n, -p.half_width, p.half_width, N, p.t_start, p.t_end, M.time_nodes_for(N));
}

struct ProblemRun {
    ScalarField u;
    double l1_rel_error = 0.0;  ///< at t_end against the exact solution; 0 for sampled data
    std::size_t clamped = 0;
};

/// The reference solution at N nodes per axis, sampled or solved with its exact trace on the boundary.
inline ProblemRun make_problem(const RunManifest& M, std::size_t N) {
    const auto g = problem_grid(M, N);
    auto exact = [&M](const Point& x, double t) { return exact_value(M, x, t); };
    ProblemRun run;
    if (M.problem.source == SourceKind::Exact) {
        run.u = ScalarField::sample(g, exact, true, "u");
        return run;
    }
    SolverConfig cfg;
    cfg.boundary = BoundaryMode::ExactTrace;
    cfg.trace = exact;
    auto tr = solve(g, initial_slice(g, exact), nullptr, StructureField::identity(), M.model, cfg);
    run.clamped = tr.clamped;
    const std::size_t k = g.time_nodes() - 1;
    double err = 0.0, norm = 0.0;
    for (std::size_t j = 0; j < g.space_size(); ++j) {
        const double ex = exact(g.point(j), g.t_end());
        err += g.cell_volume(j) * std::abs(tr.u.at(k, j) - ex);
        norm += g.cell_volume(j) * ex;
    }
    run.l1_rel_error = norm > 0.0 ? err / norm : 0.0;
    run.u = std::move(tr.u);
    return run;
}

}  // namespace fdelab
