/// Grid, field, cylinder, quadrature and gradient checks.
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fdelab/grid_core.hpp"

using namespace fdelab;

namespace {

SpaceTimeGrid unit_grid(int n, std::size_t N, std::size_t nt) { return SpaceTimeGrid::cube(n, -1.0, 1.0, N, 0.0, 2.0, nt); }

// Independent disk-rectangle area: Simpson rule on the vertical chord length.
double chord_area_oracle(double cx, double cy, double r, double x0, double x1, double y0, double y1) {
    const int M = 200000;
    const double a = std::max(x0, cx - r), b = std::min(x1, cx + r);
    if (b <= a) return 0.0;
    const double hx = (b - a) / M;
    auto len = [&](double x) {
        const double c = std::sqrt(std::max(0.0, r * r - (x - cx) * (x - cx)));
        return std::max(0.0, std::min(y1, cy + c) - std::max(y0, cy - c));
    };
    double s = len(a) + len(b);
    for (int i = 1; i < M; ++i) s += (i % 2 ? 4.0 : 2.0) * len(a + i * hx);
    return s * hx / 3.0;
}

}  // namespace

TEST(ModelParams, RejectsOutOfRangeExponents) {
    EXPECT_NO_THROW(ModelParams::make(2, 0.5));
    EXPECT_THROW(ModelParams::make(2, 1.0), Error);
    EXPECT_THROW(ModelParams::make(3, 0.2), Error);  // (n-2)/(n+2) = 0.2 is excluded
    EXPECT_NO_THROW(ModelParams::make(3, 0.21));
    EXPECT_THROW(ModelParams::make(1, 0.0), Error);
    EXPECT_THROW(ModelParams::make(2, 0.5, 2.0, 1.0), Error);
    const auto p = ModelParams::make(2, 0.5);
    EXPECT_DOUBLE_EQ(p.p(), 1.5);
    EXPECT_GT(p.p(), 2.0 * p.n / (p.n + 2.0));
}

TEST(SpaceTimeGrid, CornersAndControlVolumesTileTheBox) {
    GridSpec s;
    s.n = 2;
    s.lo = {-0.3, 1.1, 0};
    s.hi = {0.9, 2.3, 0};
    s.nodes = {13, 13, 1};
    s.t_start = 0.25;
    s.t_end = 1.75;
    s.time_nodes = 7;
    SpaceTimeGrid g(s);
    EXPECT_EQ(g.coord(0, 0), -0.3);
    EXPECT_EQ(g.coord(0, 12), 0.9);
    EXPECT_EQ(g.coord(1, 12), 2.3);
    EXPECT_EQ(g.time(6), 1.75);
    double vol = 0.0, len = 0.0;
    for (std::size_t j = 0; j < g.space_size(); ++j) vol += g.cell_volume(j);
    for (std::size_t k = 0; k < g.time_nodes(); ++k) len += g.time_cell_length(k);
    EXPECT_NEAR(vol, 1.2 * 1.2, 1e-12);
    EXPECT_NEAR(len, 1.5, 1e-12);
    EXPECT_EQ(g.space_index(g.space_multi(37)), 37u);
}

TEST(SpaceTimeGrid, EnforcesBudgetAndUniformStep) {
    GridSpec s;
    s.n = 2;
    s.nodes = {1000, 1000, 1};
    s.time_nodes = 1000;
    s.budget = 1'000'000;
    EXPECT_THROW(SpaceTimeGrid{s}, Error);
    GridSpec u;
    u.n = 2;
    u.hi = {1.0, 2.0, 0};
    u.nodes = {11, 11, 1};
    EXPECT_THROW(SpaceTimeGrid{u}, Error);
}

TEST(Overlap, DiskRectangleMatchesChordIntegration) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const double cx = U(rng), cy = U(rng), r = 0.05 + std::abs(U(rng));
        double x0 = U(rng), x1 = U(rng), y0 = U(rng), y1 = U(rng);
        if (x1 < x0) std::swap(x0, x1);
        if (y1 < y0) std::swap(y0, y1);
        const double exact = geom::disk_rect_area(cx, cy, r, x0, x1, y0, y1);
        // Simpson converges slowly at the square-root endpoints of the chord.
        EXPECT_NEAR(exact, chord_area_oracle(cx, cy, r, x0, x1, y0, y1), 1e-8) << trial;
    }
    EXPECT_NEAR(geom::disk_rect_area(0, 0, 1, -2, 2, -2, 2), std::numbers::pi, 1e-14);
    EXPECT_NEAR(geom::disk_rect_area(0, 0, 1, 0, 2, 0, 2), std::numbers::pi / 4, 1e-14);
}

TEST(Quadrature, BallWeightsSumToBallMeasure) {
    const auto g = unit_grid(2, 41, 5);
    const auto w = ball_weights(g, {0.113, -0.271, 0}, 0.4567);
    EXPECT_NEAR(w.total, std::numbers::pi * 0.4567 * 0.4567, 1e-12);
    // Clipped by the box: quarter disk at a corner.
    const auto c = ball_weights(g, {-1.0, -1.0, 0}, 0.5);
    EXPECT_NEAR(c.total, std::numbers::pi * 0.25 / 4.0, 1e-12);
    const auto g1 = unit_grid(1, 21, 5);
    EXPECT_NEAR(ball_weights(g1, {0.9, 0, 0}, 0.3).total, 0.4, 1e-12);
}

TEST(CylinderMean, ConstantFields) {
    const auto g = unit_grid(2, 17, 9);
    const auto three = ScalarField::constant(g, 3.0);
    const auto two = ScalarField::constant(g, 2.0);
    const auto Q = Cylinder::centered({0.1, 0.2, 0}, 1.0, 0.3, 0.55);
    EXPECT_NEAR(cylinder_mean(three, Q, 1.0), 3.0, 1e-14);
    EXPECT_NEAR(cylinder_mean(two, Q, 1.5), 2.8284271247461903, 1e-13);
}

TEST(CylinderMean, LinearInTimeIsMidpointExact) {
    // Time nodes at multiples of 0.05; window (0.5, 1.5) is symmetric about t0 = 1.
    const auto g = unit_grid(2, 9, 41);
    const auto f = ScalarField::sample(g, [](const Point&, double t) { return t; });
    const auto Q = Cylinder::centered({0, 0, 0}, 1.0, 0.5, 0.5);
    EXPECT_NEAR(cylinder_mean(f, Q, 1.0), 1.0, 1e-14);
    // Unaligned window: compare with the exact integral of t over it, error O(dt^2).
    const auto Q2 = Cylinder::centered({0, 0, 0}, 0.913, 0.377, 0.5);
    EXPECT_NEAR(cylinder_mean(f, Q2, 1.0), 0.913, 0.05 * 0.05);
}

TEST(CylinderMean, AgreesWithDenseBruteForce) {
    // Brute force: average of the nodal piecewise-constant field over a dense sample of Q.
    const auto g = unit_grid(2, 11, 11);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> v(g.size());
    for (auto& x : v) x = U(rng);
    const ScalarField f(g, v, true);
    const auto Q = Cylinder::construction({0.13, -0.2, 0}, 0.9, 0.8, 0.61);
    double num = 0.0, den = 0.0;
    const int M = 600, T = 400;
    for (int a = 0; a < T; ++a) {
        const double t = Q.t_lo() + (a + 0.5) * Q.length() / T;
        const std::size_t k = g.nearest_time(t);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) {
                const double x = Q.x[0] - Q.rho + (i + 0.5) * 2 * Q.rho / M;
                const double y = Q.x[1] - Q.rho + (j + 0.5) * 2 * Q.rho / M;
                if ((x - Q.x[0]) * (x - Q.x[0]) + (y - Q.x[1]) * (y - Q.x[1]) >= Q.rho * Q.rho) continue;
                const auto ix = static_cast<std::size_t>(std::lround((x + 1.0) / g.h()));
                const auto iy = static_cast<std::size_t>(std::lround((y + 1.0) / g.h()));
                num += f.at(k, g.space_index({ix, iy, 0}));
                den += 1.0;
            }
    }
    EXPECT_NEAR(cylinder_mean(f, Q, 1.0), num / den, 2e-3);
}

TEST(CylinderMean, Errors) {
    const auto g = unit_grid(2, 9, 9);
    const auto f = ScalarField::sample(g, [](const Point& x, double) { return x[0]; });
    const auto Q = Cylinder::centered({0, 0, 0}, 1.0, 0.5, 0.5);
    EXPECT_NO_THROW(cylinder_mean(f, Q, 2.0));
    try {
        cylinder_mean(f, Q, 1.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NegativeBase);
    }
    try {
        cylinder_mean(f, Cylinder::centered({5, 5, 0}, 1.0, 0.5, 0.5), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyIntersection);
    }
    EXPECT_TRUE(quadrature(g, Cylinder::centered({0.9, 0, 0}, 1.0, 0.5, 0.5)).clipped);
    EXPECT_FALSE(quadrature(g, Q).clipped);
}

TEST(CylinderMean, MonotoneUnderDomination) {
    const auto g = unit_grid(2, 13, 9);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(g.size()), b(g.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = U(rng);
            b[i] = a[i] + U(rng) * (U(rng) < 0.3);
        }
        const ScalarField fa(g, a, true), fb(g, b, true);
        const auto Q = Cylinder::centered({U(rng) - 0.5, U(rng) - 0.5, 0}, 0.5 + U(rng), 0.1 + 0.4 * U(rng), 0.1 + 0.5 * U(rng));
        for (double e : {0.5, 1.0, 1.5, 2.0}) EXPECT_LE(cylinder_mean(fa, Q, e), cylinder_mean(fb, Q, e));
    }
}

TEST(Cylinder, ConventionsAndContainment) {
    const auto A = Cylinder::centered({0, 0, 0}, 1.0, 1.0, 1.0);
    const auto B = Cylinder::construction({0, 0, 0}, 1.0, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(A.length(), 2.0);
    EXPECT_DOUBLE_EQ(B.length(), 1.0);
    EXPECT_TRUE(A.contains(B, 2));
    EXPECT_FALSE(B.contains(A, 2));
    EXPECT_TRUE(B.contains({0.5, 0.5, 0}, 1.2, 2));
    EXPECT_FALSE(B.contains({0.5, 0.5, 0}, 1.5, 2));  // open in time
    EXPECT_NEAR(A.measure(2), 2 * std::numbers::pi, 1e-14);
    const auto C = Cylinder::construction({2.0, 0, 0}, 1.0, 1.0, 1.0);
    EXPECT_FALSE(B.intersects(C, 2));  // tangent balls do not meet
}

TEST(WeightedSliceMean, UniformWeightAndConstants) {
    const auto g = unit_grid(2, 21, 5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> v(g.size());
    for (auto& x : v) x = U(rng);
    const ScalarField f(g, v, true);
    const Point c{0.1, -0.05, 0};
    const double uw = weighted_slice_mean(f, 1.0, c, 0.6, [](const Point&) { return 1.0; });
    const auto sw = ball_weights(g, c, 0.6);
    double num = 0.0;
    for (std::size_t b = 0; b < sw.nodes.size(); ++b) num += sw.w[b] * f.at(g.nearest_time(1.0), sw.nodes[b]);
    EXPECT_NEAR(uw, num / sw.total, 1e-14);
    const auto c7 = ScalarField::constant(g, 7.0);
    EXPECT_NEAR(weighted_slice_mean(c7, 0.3, c, 0.6, [](const Point& x) { return 1.0 + x[0] * x[0]; }), 7.0, 1e-13);
    EXPECT_THROW(weighted_slice_mean(c7, 0.3, c, 0.6, [](const Point&) { return 0.0; }), Error);
}

TEST(WeightedSliceMean, OddFieldEvenWeightCancels) {
    const auto g = unit_grid(2, 21, 5);
    const auto f = ScalarField::sample(g, [](const Point& x, double) { return x[0]; });
    auto eta = [](const Point& x) { return std::exp(-3.0 * x[0] * x[0]) * (1.0 + x[1]); };
    EXPECT_NEAR(weighted_slice_mean(f, 1.0, {0, 0, 0}, 0.8, eta), 0.0, 1e-14);
    // Brute force: symmetric node sum.
    double s = 0.0;
    for (std::size_t j = 0; j < g.space_size(); ++j) {
        const auto x = g.point(j);
        if (x[0] * x[0] + x[1] * x[1] < 0.64) s += x[0] * eta(x);
    }
    EXPECT_NEAR(s, 0.0, 1e-12);
}

namespace {
struct WeightedSample {
    std::vector<double> g, eta, w;
};
double wmean(const std::vector<double>& g, const std::vector<double>& w) {
    double a = 0, b = 0;
    for (std::size_t i = 0; i < g.size(); ++i) a += g[i] * w[i], b += w[i];
    return a / b;
}
double wosc(const std::vector<double>& g, const std::vector<double>& w, double c, double q) {
    double a = 0, b = 0;
    for (std::size_t i = 0; i < g.size(); ++i) a += std::pow(std::abs(g[i] - c), q) * w[i], b += w[i];
    return std::pow(a / b, 1.0 / q);
}
}  // namespace

TEST(MeanProperties, BestConstantAndMeanChange) {
    const auto grid = unit_grid(2, 25, 3);
    const auto sw = ball_weights(grid, {0.05, 0.02, 0}, 0.85);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t N = sw.nodes.size();
        std::vector<double> g(N), eta(N), weta(N);
        for (std::size_t i = 0; i < N; ++i) {
            g[i] = 4.0 * U(rng) - 1.0;
            eta[i] = U(rng) < 0.2 ? 0.0 : U(rng);
            weta[i] = sw.w[i] * eta[i];
        }
        const double gm_eta = wmean(g, weta), gm = wmean(g, sw.w);
        double eta_norm = 0.0;
        for (double x : weta) eta_norm += x;
        for (double q : {1.0, 2.0}) {
            const double lhs = wosc(g, weta, gm_eta, q);
            for (int c = 0; c < 50; ++c) EXPECT_LE(lhs, 2.0 * wosc(g, weta, 6.0 * U(rng) - 3.0, q) + 1e-12);
            double unweighted = 0.0;
            for (std::size_t i = 0; i < N; ++i) unweighted += std::pow(std::abs(g[i] - gm), q) * sw.w[i];
            const double rhs = 2.0 * std::pow(unweighted / eta_norm, 1.0 / q);
            EXPECT_LE(lhs, rhs + 1e-12);
            EXPECT_LE(std::abs(gm_eta - gm), wosc(g, weta, gm, q) + 1e-12);
            EXPECT_LE(std::abs(gm_eta - gm), rhs + 1e-12);
        }
    }
}

TEST(Gradient, ConstantAndSquareOfLinear) {
    const auto g = unit_grid(2, 17, 3);
    const auto c = ScalarField::constant(g, 2.5);
    const auto F = grad_energy_field(c, 0.5);
    EXPECT_LE(F.max_value(), 1e-28);
    const auto u = ScalarField::sample(g, [](const Point& x, double) { return (2.0 + x[0]) * (2.0 + x[0]); }, true);
    const auto d = discrete_gradient_of_power(u, 0.5);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(d.component(i, 0), 1.0, 1e-12);
        EXPECT_NEAR(d.component(i, 1), 0.0, 1e-12);
    }
    const auto zero = ScalarField::constant(g, 0.0);
    EXPECT_EQ(grad_energy_field(zero, 0.5).max_value(), 0.0);
}

TEST(Gradient, HeatLimitLinearGivesSlopeSquared) {
    const auto g = unit_grid(2, 9, 3);
    const auto u = ScalarField::sample(g, [](const Point& x, double) { return 3.0 + 0.7 * x[0]; }, true);
    const auto F = grad_energy_field(u, 1.0);
    for (double v : F.values()) EXPECT_NEAR(v, 0.49, 1e-12);
}

TEST(Gradient, SecondOrderInterior) {
    auto err = [](std::size_t N) {
        const auto g = SpaceTimeGrid::cube(2, 0.0, std::numbers::pi, N, 0.0, 1.0, 2);
        const auto u = ScalarField::sample(
            g, [](const Point& x, double) { return std::pow(2.0 + std::sin(x[0]) * std::sin(x[1]), 2.0); }, true);
        const auto d = discrete_gradient_of_power(u, 0.5);
        double e = 0.0;
        for (std::size_t j = 0; j < g.space_size(); ++j) {
            if (g.on_boundary(j)) continue;
            const auto x = g.point(j);
            e = std::max(e, std::abs(d.component(j, 0) - std::cos(x[0]) * std::sin(x[1])));
            e = std::max(e, std::abs(d.component(j, 1) - std::sin(x[0]) * std::cos(x[1])));
        }
        return e;
    };
    const double e1 = err(33), e2 = err(65);
    EXPECT_GE(std::log2(e1 / e2), 1.8);
}

namespace {
// Closed-form source-type solution for n=2, m=0.5: alpha=2, beta=1, k=1/2.
double baren(const Point& x, double t) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return std::pow(t, -2.0) * std::pow(1.0 + 0.5 * r2 / (t * t), -2.0);
}
double baren_grad_m_sq(const Point& x, double t) {
    // u^m = t^-1 (1 + r^2/(2 t^2))^-1, d/dr = -t^-1 (1 + r^2/(2t^2))^-2 r / t^2
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const double q = 1.0 + 0.5 * r2 / (t * t);
    const double d = std::sqrt(r2) / (t * t * t * q * q);
    return d * d;
}
}  // namespace

TEST(Gradient, BarenblattEnergyMatchesDenseOracle) {
    // Oracle: integral of the analytic |D u^m|^2 over [-3,3]^2 x [1,1.5] by a dense midpoint rule.
    double oracle = 0.0;
    {
        const int M = 1200, T = 100;
        const double hx = 6.0 / M, ht = 0.5 / T;
        for (int a = 0; a < T; ++a)
            for (int i = 0; i < M; ++i)
                for (int j = 0; j < M; ++j)
                    oracle += baren_grad_m_sq({-3 + (i + 0.5) * hx, -3 + (j + 0.5) * hx, 0}, 1.0 + (a + 0.5) * ht);
        oracle *= hx * hx * ht;
    }
    for (std::size_t N : {65u, 129u}) {
        const auto g = SpaceTimeGrid::cube(2, -3.0, 3.0, N, 1.0, 1.5, 33);
        const auto u = ScalarField::sample(g, baren, true);
        const auto F = grad_energy_field(u, 0.5);
        const auto Q = Cylinder::centered({0, 0, 0}, 1.25, 0.25, 10.0);
        const auto q = quadrature(g, Q);
        const double I = integrate(g, q, [&](std::size_t i) { return F[i]; });
        EXPECT_NEAR(I / oracle, 1.0, 0.01) << N;
        // L^2 norm of the gradient itself.
        EXPECT_NEAR(std::sqrt(I / oracle), 1.0, 0.01) << N;
    }
}

TEST(Snapshot, BinaryRoundTripAndCsv) {
    const auto g = unit_grid(2, 5, 3);
    const auto f = ScalarField::sample(g, [](const Point& x, double t) { return x[0] + 2 * x[1] + t; }, false, "probe");
    std::stringstream ss;
    snapshot::write_binary(ss, f);
    const auto back = snapshot::read_binary(ss);
    EXPECT_TRUE(back.grid() == g);
    EXPECT_EQ(back.name(), "probe");
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back[i], f[i]);
    std::stringstream csv;
    snapshot::write_csv(csv, f);
    std::string line;
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty() && line[0] != '#') ++rows;
    EXPECT_EQ(rows, 3);
    std::stringstream bad("NOTASNAP");
    EXPECT_THROW(snapshot::read_binary(bad), Error);
}

TEST(Parallel, PairwiseSumAndThreadInvariance) {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / double(i + 1);
    double s = 0.0;
    for (double x : v) s += x;
    EXPECT_NEAR(pairwise_sum(v), s, 1e-12);
    std::vector<double> a(257), b(257);
    parallel_for(a.size(), [&](std::size_t i) { a[i] = std::sin(double(i)); }, 1);
    parallel_for(b.size(), [&](std::size_t i) { b[i] = std::sin(double(i)); }, 8);
    EXPECT_EQ(a, b);
}
