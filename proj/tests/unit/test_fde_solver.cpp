/// Solver, exact profile and weak residual checks.
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fdelab/fde_solver.hpp"

using namespace fdelab;

namespace {

const ModelParams P = ModelParams::make(2, 0.5);

double l1_rel_error(const ScalarField& u, const Barenblatt& B) {
    const auto& g = u.grid();
    const std::size_t k = g.time_nodes() - 1;
    double err = 0.0, norm = 0.0;
    for (std::size_t j = 0; j < g.space_size(); ++j) {
        const double ex = B(g.point(j), g.t_end());
        err += g.cell_volume(j) * std::abs(u.at(k, j) - ex);
        norm += g.cell_volume(j) * ex;
    }
    return err / norm;
}

Trajectory barenblatt_run(const Barenblatt& B, std::size_t N, std::size_t nt, double t_end, double half = 3.0) {
    const auto g = SpaceTimeGrid::cube(2, -half, half, N, 1.0, t_end, nt);
    SolverConfig cfg;
    cfg.boundary = BoundaryMode::ExactTrace;
    cfg.trace = [B](const Point& x, double t) { return B(x, t); };
    return solve(g, initial_slice(g, B), nullptr, StructureField::identity(), P, cfg);
}

}  // namespace

TEST(Barenblatt, ExponentsForTwoDimensionsHalf) {
    const auto B = Barenblatt::make(P, 1.0);
    EXPECT_DOUBLE_EQ(B.alpha, 2.0);
    EXPECT_DOUBLE_EQ(B.beta, 1.0);
    EXPECT_DOUBLE_EQ(B.k, 0.5);
    for (double t : {0.5, 1.0, 3.0}) EXPECT_NEAR(B({0, 0, 0}, t), std::pow(t, -2.0), 1e-15);
    const auto B2 = Barenblatt::make(P, 2.0);
    EXPECT_NEAR(B2({0, 0, 0}, 1.7), std::pow(1.7, -2.0) * std::pow(2.0, -2.0), 1e-15);
}

TEST(Barenblatt, RejectsNonPositiveScalingDenominator) {
    const auto p3 = ModelParams::make(3, 0.3);  // 3(0.3 - 1) + 2 = -0.1
    try {
        Barenblatt::make(p3, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidExponent);
    }
}

TEST(Barenblatt, SolvesTheEquationPointwise) {
    // Fourth-order central differences for u_t and the Laplacian of u^m.
    for (double m : {0.5, 0.8}) {
        const auto p = ModelParams::make(2, m);
        const auto B = Barenblatt::make(p, 1.0);
        const double d = 1e-3;
        auto d1 = [&](auto fn, double x) { return (-fn(x + 2 * d) + 8 * fn(x + d) - 8 * fn(x - d) + fn(x - 2 * d)) / (12 * d); };
        auto d2 = [&](auto fn, double x) {
            return (-fn(x + 2 * d) + 16 * fn(x + d) - 30 * fn(x) + 16 * fn(x - d) - fn(x - 2 * d)) / (12 * d * d);
        };
        for (const Point& x : {Point{0.3, -0.2, 0}, Point{1.1, 0.7, 0}, Point{-2.0, 0.5, 0}}) {
            for (double t : {0.8, 1.5}) {
                const double ut = d1([&](double s) { return B(x, s); }, t);
                double lap = 0.0;
                for (int a = 0; a < 2; ++a)
                    lap += d2(
                        [&](double s) {
                            Point y = x;
                            y[a] = s;
                            return std::pow(B(y, t), m);
                        },
                        x[a]);
                EXPECT_LT(std::abs(ut - lap), 1e-6) << m << " " << t;
            }
        }
    }
}

TEST(Barenblatt, GradientOfPowerMatchesFiniteDifferences) {
    const auto B = Barenblatt::make(P, 1.0);
    const Point x{0.4, -1.3, 0};
    const auto gr = B.grad_power(x, 1.2);
    for (int a = 0; a < 2; ++a) {
        Point xp = x, xm = x;
        xp[a] += 1e-5;
        xm[a] -= 1e-5;
        EXPECT_NEAR(gr[a], (std::sqrt(B(xp, 1.2)) - std::sqrt(B(xm, 1.2))) / 2e-5, 1e-8);
    }
}

TEST(Barenblatt, MassIsConserved) {
    // m = 0.8 decays like |x|^-10, so a box of half-width 40 holds the mass to 1e-10.
    auto mass = [](const ModelParams& p, int n, double t) {
        const auto B = Barenblatt::make(p, 1.0);
        const auto g = n == 1 ? SpaceTimeGrid::cube(1, -4000.0, 4000.0, 800001, 0.0, 1.0, 2)
                              : SpaceTimeGrid::cube(2, -40.0, 40.0, 1601, 0.0, 1.0, 2);
        double s = 0.0;
        for (std::size_t j = 0; j < g.space_size(); ++j) s += g.cell_volume(j) * B(g.point(j), t);
        return s;
    };
    const auto p2 = ModelParams::make(2, 0.8);
    EXPECT_NEAR(mass(p2, 2, 1.0) / mass(p2, 2, 2.0), 1.0, 1e-3);
    const auto p1 = ModelParams::make(1, 0.5);
    EXPECT_NEAR(mass(p1, 1, 1.0) / mass(p1, 1, 2.0), 1.0, 1e-3);
}

TEST(Step, ConstantsArePreserved) {
    const auto g = SpaceTimeGrid::cube(2, 0.0, 1.0, 11, 0.0, 1.0, 11);
    const std::vector<double> u(g.space_size(), 0.7);
    const auto A = StructureField::diagonal({[](const Point& x, double) { return 1.0 + x[0]; },
                                             [](const Point& x, double t) { return 2.0 - x[1] * t; }},
                                            0.5, 2.0);
    for (auto scheme : {Scheme::Explicit, Scheme::SemiImplicit}) {
        SolverConfig cfg;
        cfg.scheme = scheme;
        const auto next = step(g, 0.0, u, {}, A, P, cfg, 1e-4, 1e-6);
        for (double v : next) EXPECT_NEAR(v, 0.7, 1e-12);
    }
}

TEST(Step, PureSourceExplicit) {
    const auto g = SpaceTimeGrid::cube(2, 0.0, 1.0, 9, 0.0, 1.0, 11);
    const std::vector<double> u(g.space_size(), 0.0), f(g.space_size(), 1.0);
    SolverConfig cfg;
    cfg.scheme = Scheme::Explicit;
    cfg.u_floor = 1.0;
    const double dt = 1e-3;
    const auto next = step(g, 0.0, u, f, StructureField::identity(), P, cfg, dt, 1.0);
    for (std::size_t j = 0; j < g.space_size(); ++j) {
        if (!g.on_boundary(j)) {
            EXPECT_DOUBLE_EQ(next[j], dt);
        }
    }
}

TEST(Step, ExplicitCflViolationIsReported) {
    const auto g = SpaceTimeGrid::cube(2, 0.0, 1.0, 21, 0.0, 1.0, 11);
    const std::vector<double> u(g.space_size(), 1.0);
    SolverConfig cfg;
    cfg.scheme = Scheme::Explicit;
    StepStats st;
    EXPECT_NO_THROW(step(g, 0.0, u, {}, StructureField::identity(), P, cfg, 1e-4, 1e-6, &st));
    EXPECT_GT(st.cfl_margin, 1.0);
    try {
        step(g, 0.0, u, {}, StructureField::identity(), P, cfg, 1e-2, 1e-6);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CflViolation);
    }
}

TEST(Step, LinearSolveDivergenceIsReported) {
    const auto g = SpaceTimeGrid::cube(2, 0.0, 1.0, 21, 0.0, 1.0, 11);
    std::vector<double> u(g.space_size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = 1.0 + std::sin(37.0 * double(j));
    SolverConfig cfg;
    cfg.lin_max_iter = 1;
    cfg.lin_tol = 1e-14;
    try {
        step(g, 0.0, u, {}, StructureField::identity(), P, cfg, 0.1, 1e-6);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LinearSolveDiverged);
    }
}

TEST(Solve, ZeroAndSpatiallyConstantData) {
    const auto g = SpaceTimeGrid::cube(2, 0.0, 1.0, 11, 0.0, 0.1, 6);
    const std::vector<double> zero(g.space_size(), 0.0);
    const auto tr = solve(g, zero, nullptr, StructureField::identity(), P, SolverConfig{});
    EXPECT_EQ(tr.u.max_value(), 0.0);
    const std::vector<double> c(g.space_size(), 2.5);
    SolverConfig cfg;
    cfg.scheme = Scheme::Explicit;
    const auto g2 = SpaceTimeGrid::cube(2, 0.0, 1.0, 11, 0.0, 1e-3, 6);
    for (const auto& grid : {g, g2}) {
        cfg.scheme = grid == g ? Scheme::SemiImplicit : Scheme::Explicit;
        const auto t2 = solve(grid, c, nullptr, StructureField::identity(), P, cfg);
        for (double v : t2.u.values()) EXPECT_NEAR(v, 2.5, 1e-14);
    }
}

TEST(Solve, BarenblattReferenceRun) {
    const auto B = Barenblatt::make(P, 1.0);
    const auto tr = barenblatt_run(B, 65, 129, 2.0);
    EXPECT_LT(l1_rel_error(tr.u, B), 0.02);
    EXPECT_EQ(tr.clamped, 0u);
    EXPECT_GE(tr.u.min_value(), 0.0);
    ASSERT_EQ(tr.steps.size(), 128u);
    EXPECT_GT(tr.steps.back().lin_iterations, 0);
}

TEST(Solve, BarenblattConvergesUnderRefinement) {
    const auto B = Barenblatt::make(P, 1.0);
    const double e1 = l1_rel_error(barenblatt_run(B, 17, 33, 2.0).u, B);
    const double e2 = l1_rel_error(barenblatt_run(B, 33, 65, 2.0).u, B);
    const double e3 = l1_rel_error(barenblatt_run(B, 65, 129, 2.0).u, B);
    EXPECT_GE(std::log2(e1 / e2), 0.9);
    EXPECT_GE(std::log2(e2 / e3), 0.9);
}

TEST(Solve, ExplicitAndSemiImplicitAgree) {
    const auto B = Barenblatt::make(P, 1.0);
    const auto g = SpaceTimeGrid::cube(2, -3.0, 3.0, 25, 1.0, 1.1, 401);
    SolverConfig cfg;
    cfg.boundary = BoundaryMode::ExactTrace;
    cfg.trace = [B](const Point& x, double t) { return B(x, t); };
    const auto a = solve(g, initial_slice(g, B), nullptr, StructureField::identity(), P, cfg);
    cfg.scheme = Scheme::Explicit;
    const auto b = solve(g, initial_slice(g, B), nullptr, StructureField::identity(), P, cfg);
    double diff = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) diff = std::max(diff, std::abs(a.u[i] - b.u[i]));
    EXPECT_LT(diff, 2e-3);
    EXPECT_LT(l1_rel_error(b.u, B), 0.01);
}

TEST(Solve, DoublingTheSourceNeverDecreasesTheSolution) {
    const auto g = SpaceTimeGrid::cube(2, 0.0, 1.0, 17, 0.0, 0.02, 201);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> fv(g.size());
    for (auto& x : fv) x = U(rng);
    const ScalarField f(g, fv, true), f2 = f.map([](double x) { return 2 * x; }, true, "2f");
    const auto u0 = initial_slice(g, [](const Point& x, double) { return 0.5 + 0.4 * x[0] * x[1]; });
    SolverConfig cfg;
    cfg.scheme = Scheme::Explicit;
    const auto a = solve(g, u0, &f, StructureField::identity(), P, cfg);
    const auto b = solve(g, u0, &f2, StructureField::identity(), P, cfg);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LE(a.u[i], b.u[i]);
}

TEST(Structure, DiagonalBoundsHoldAtRandomSamples) {
    const double nu = 0.4, L = 2.5;
    const auto A = StructureField::diagonal({[](const Point& x, double t) { return 1.45 + 1.05 * std::sin(3 * x[0] + t); },
                                             [](const Point& x, double) { return 0.4 + 2.1 * x[1] * x[1]; }},
                                            nu, L);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const Point x{U(rng), U(rng), 0};
        const double t = U(rng);
        const double xi[2] = {5 * U(rng), 5 * U(rng)};
        double out[2];
        A.apply(x, t, xi, out, 2);
        const double dot = out[0] * xi[0] + out[1] * xi[1];
        const double xn = std::hypot(xi[0], xi[1]);
        EXPECT_GE(dot, nu * xn * xn - 1e-12);
        EXPECT_LE(std::hypot(out[0], out[1]), L * xn + 1e-12);
    }
    const auto I = StructureField::identity();
    EXPECT_EQ(I.nu(), 1.0);
    EXPECT_EQ(I.L(), 1.0);
}

TEST(WeakResidual, ConstantSolutionHasZeroResidual) {
    const auto g = SpaceTimeGrid::cube(2, -1.0, 1.0, 21, 0.0, 1.0, 21);
    const auto u = ScalarField::constant(g, 1.3);
    EXPECT_LT(weak_residual(u, nullptr, StructureField::identity(), 0.5, default_battery(g)), 1e-12);
}

TEST(WeakResidual, SampledProfileConvergesAtFirstOrderOrBetter) {
    const auto B = Barenblatt::make(P, 1.0);
    auto res = [&](std::size_t N, std::size_t nt) {
        const auto g = SpaceTimeGrid::cube(2, -3.0, 3.0, N, 1.0, 2.0, nt);
        return weak_residual(ScalarField::sample(g, B, true), nullptr, StructureField::identity(), 0.5,
                             default_battery(g));
    };
    const double r1 = res(17, 33), r2 = res(33, 65), r3 = res(65, 129);
    EXPECT_GE(std::log2(r1 / r2), 1.0);
    EXPECT_GE(std::log2(r2 / r3), 1.0);
}

TEST(WeakResidual, SolverOutputIsConsistentWithSampledProfile) {
    const auto B = Barenblatt::make(P, 1.0);
    for (auto [N, nt, t_end] : {std::tuple{65u, 129u, 1.5}, std::tuple{33u, 65u, 2.0}}) {
        const auto tr = barenblatt_run(B, N, nt, t_end);
        const auto& g = tr.u.grid();
        const auto bat = default_battery(g);
        const double rs = weak_residual(tr.u, nullptr, StructureField::identity(), 0.5, bat);
        const double re = weak_residual(ScalarField::sample(g, B, true), nullptr, StructureField::identity(), 0.5, bat);
        EXPECT_LT(rs, 3.0 * re) << N;
    }
}
