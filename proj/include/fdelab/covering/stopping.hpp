#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "../estimates/regime.hpp"
#include "../geometry/engulf.hpp"
#include "box_maximal.hpp"
#include "family.hpp"
#include "vitali.hpp"

namespace fdelab {

/**
 * Constants of the level-set covering. c_o solves gamma_1 (2/c_o)^e = delta_tilde
 * with e = ((m+1)/(1-m)) beta - 1, and c_2 = 2 c_1 3~ c_o with 3~ = 3^(1/b_hat).
 * Dilations act on the s-grid, so every factor is also kept as a grid offset.
 */
struct CoveringConfig {
    double epsilon = 0.1;      ///< regime threshold
    double delta_tilde = 0.25;
    double gamma_1 = 1.0;      ///< measured sub-intrinsic energy constant (K = 1)
    double c_1 = 3.0;          ///< engulfing constant
    double vartheta = 0.75;    ///< reverse Hoelder exponent q
    double mu_constant = 1.0;  ///< c in C(f~, delta~)

    double e = 0.0, c_o = 0.0, c_2 = 0.0, tilde3 = 0.0;
    int L = 8;
    int off_co = 0;   ///< largest grid offset i with 2^(i/L) <= c_o
    int off_3 = 0;    ///< smallest offset with 2^(i/L) >= 3~
    int off_2c1 = 0;  ///< smallest offset with 2^(i/L) >= 2 c_1
    int off_4c1 = 0;  ///< smallest offset with 2^(i/L) >= 4 c_1
    int off_c2 = 0;   ///< off_co + off_3 + off_2c1, dominates every dilation used

    static CoveringConfig make(const GeometryConstants& g, int levels_per_octave, double epsilon, double delta_tilde,
                               double gamma_1, double c_1, double vartheta = 0.75, double mu_constant = 1.0) {
        g.require_covering();
        require(delta_tilde > 0.0 && delta_tilde < 0.5, ErrorCode::ConfigError, "delta_tilde must lie in (0, 1/2)");
        require(gamma_1 > delta_tilde, ErrorCode::ConfigError,
                "gamma_1 must exceed delta_tilde so that c_o > 2 (gamma_1=" + std::to_string(gamma_1) + ")");
        require(c_1 >= 1.0 && std::isfinite(c_1), ErrorCode::ConfigError, "c_1 must be finite and at least 1");
        require(vartheta > 0.0 && vartheta < 1.0, ErrorCode::ConfigError, "vartheta must lie in (0, 1)");
        require(epsilon > 0.0 && mu_constant >= 0.0, ErrorCode::ConfigError, "need epsilon > 0, mu_constant >= 0");
        CoveringConfig c;
        const double m = g.m();
        c.epsilon = epsilon;
        c.delta_tilde = delta_tilde;
        c.gamma_1 = gamma_1;
        c.c_1 = c_1;
        c.vartheta = vartheta;
        c.mu_constant = mu_constant;
        c.e = (m + 1.0) / (1.0 - m) * g.beta - 1.0;
        c.c_o = 2.0 * std::pow(gamma_1 / delta_tilde, 1.0 / c.e);
        c.tilde3 = std::pow(3.0, 1.0 / g.b_hat);
        c.c_2 = 2.0 * c_1 * c.tilde3 * c.c_o;
        c.L = levels_per_octave;
        const double L = levels_per_octave;
        auto up = [&](double f) { return int(std::ceil(L * std::log2(f) - 1e-9)); };
        c.off_co = int(std::floor(L * std::log2(c.c_o) + 1e-9));
        c.off_3 = up(c.tilde3);
        c.off_2c1 = up(2.0 * c_1);
        c.off_4c1 = up(4.0 * c_1);
        c.off_c2 = c.off_co + c.off_3 + c.off_2c1;
        return c;
    }
};

/// tau = max(a_hat, 1) n + 1/b_hat
inline double mu_exponent(const GeometryConstants& g) { return std::max(g.a_hat, 1.0) * g.n + 1.0 / g.b_hat; }

/// C(f~, delta~) / c = mean f~^2 + (mean u~^(m+1))^(2m/(m+1)) over Q_{2,2}
inline double mu_base(const ScalarField& u, const ScalarField& f, double m) {
    const Cylinder Q22 = Cylinder::centered({0, 0, 0}, 0.0, 2.0, 2.0);
    const double fm = cylinder_mean(f, Q22, 2.0);
    const double um = cylinder_mean(u, Q22, m + 1.0);
    return fm + std::pow(um, 2.0 * m / (m + 1.0));
}

inline double mu_threshold(double a, double b, const ScalarField& u, const ScalarField& f, const GeometryConstants& g,
                           const CoveringConfig& cfg) {
    require(0.5 <= a && a < b && b <= 1.0, ErrorCode::BadRange, "need 1/2 <= a < b <= 1");
    return cfg.mu_constant * (mu_base(u, f, g.m()) / std::pow(b - a, mu_exponent(g)));
}

inline Cylinder unit_cylinder(double a) { return Cylinder::centered({0, 0, 0}, 0.0, a, a); }

/// v > level up to quadrature rounding; used for level sets, witnesses and ancestors alike.
inline bool exceeds(double v, double level) { return v > level * (1.0 + 1e-12); }

enum class CaseLabel { Case1DegIntrinsic, Case2NondegIntrinsic, Case3NeverIntrinsic };

inline const char* to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::Case1DegIntrinsic: return "CASE1_DEG_INTRINSIC";
        case CaseLabel::Case2NondegIntrinsic: return "CASE2_NONDEG_INTRINSIC";
        case CaseLabel::Case3NeverIntrinsic: return "CASE3_NEVER_INTRINSIC";
    }
    return "?";
}

/// Levels of Q_z, Q*, Q** for a member; dstar >= N means the dilation leaves the s-grid.
struct CaseGeometry {
    CaseLabel label = CaseLabel::Case3NeverIntrinsic;
    std::size_t sigma = 0, star = 0, dstar = 0;
    bool half_core = true;  ///< Q_z is Q(sigma) halved in time and radius
    Regime regime;
};

/// First intrinsic level in [j + L, j + off_co], if any.
inline std::optional<std::size_t> first_intrinsic(const ScalingProfile& P, std::size_t j, const CoveringConfig& cfg) {
    const std::size_t L = std::size_t(cfg.L);
    for (std::size_t l = j + L; l <= j + std::size_t(cfg.off_co) && l < P.size(); ++l)
        if (P.intrinsic[l]) return l;
    return std::nullopt;
}

/**
 * Case table. Degenerate intrinsic sigma: Q_z = Q(sigma), Q* = Q(3~ sigma), Q** = Q(2 c_1 3~ sigma).
 * Non-degenerate: Q_z = half of Q(sigma), Q* = Q(sigma), Q** = Q(2 c_1 sigma).
 * No intrinsic sigma: Q_z = half of Q(2 s), Q* = Q(2 s), Q** = Q(4 c_1 s).
 */
inline CaseGeometry case_geometry(const ScalingProfile& P, std::size_t j, const CoveringConfig& cfg,
                                  const ScalarField& u) {
    CaseGeometry c;
    const auto sigma = first_intrinsic(P, j, cfg);
    if (!sigma) {
        c.sigma = c.star = j + std::size_t(cfg.L);
        c.dstar = j + std::size_t(cfg.off_4c1);
        return c;
    }
    c.sigma = *sigma;
    c.regime = regime_classify(u, P.cylinder(*sigma), cfg.epsilon, P.consts.m());
    if (c.regime.label == RegimeLabel::Degenerate) {
        c.label = CaseLabel::Case1DegIntrinsic;
        c.star = *sigma + std::size_t(cfg.off_3);
        c.half_core = false;
    } else {
        c.label = CaseLabel::Case2NondegIntrinsic;
        c.star = *sigma;
    }
    c.dstar = c.star + std::size_t(cfg.off_2c1);
    return c;
}

/// True when level l is off the s-grid or Q(s_l, y) leaves Q_{b,b}.
inline bool level_escapes(const ScalingProfile& P, std::size_t l, double b) {
    return l >= P.size() || !unit_cylinder(b).contains(P.cylinder(l), P.consts.n);
}

/**
 * Whether the Q** of the case table escapes Q_{b,b}. The regime is only
 * evaluated when the degenerate and non-degenerate dilations disagree.
 */
inline bool member_escapes(const ScalingProfile& P, std::size_t j, const CoveringConfig& cfg, const ScalarField& u,
                           double b) {
    const auto sigma = first_intrinsic(P, j, cfg);
    if (!sigma) return level_escapes(P, j + std::size_t(cfg.off_4c1), b);
    const std::size_t c2 = *sigma + std::size_t(cfg.off_2c1);
    const std::size_t c1 = c2 + std::size_t(cfg.off_3);
    const bool e1 = level_escapes(P, c1, b), e2 = level_escapes(P, c2, b);
    if (e1 == e2) return e1;
    return case_geometry(P, j, cfg, u).label == CaseLabel::Case1DegIntrinsic ? e1 : e2;
}

struct MuCalibration {
    double constant = 0.0;  ///< smallest c that makes the guard hold on the family
    double mu = 0.0;        ///< largest mean of an escaping member based in Q_{a,a}
    double base = 0.0;      ///< C(f~, delta~) / c
    std::size_t escaping = 0;
};

/**
 * The guard behind the size bound on stopping cylinders: a member based in
 * Q_{a,a} whose case-table dilation Q** escapes Q_{b,b} has mean at most
 * mu_{a,b}. Returns the smallest constant c for which this holds.
 */
inline MuCalibration calibrate_mu_constant(const CylinderFamily& fam, double a, double b, const ScalarField& u,
                                           const ScalarField& f, const CoveringConfig& cfg,
                                           std::size_t threads = default_threads()) {
    require(0.5 <= a && a < b && b <= 1.0, ErrorCode::BadRange, "need 1/2 <= a < b <= 1");
    const auto& g = fam.consts();
    MuCalibration c;
    c.base = mu_base(u, f, g.m());
    const Cylinder Qa = unit_cylinder(a);
    const std::size_t B = fam.bases().size(), N = fam.levels();
    std::vector<double> worst(B, 0.0);
    std::vector<std::size_t> count(B, 0);
    parallel_for(
        B,
        [&](std::size_t k) {
            const auto& P = fam.profiles()[k];
            if (!Qa.contains(P.x, P.t, g.n)) return;
            for (std::size_t j = 0; j < N; ++j) {
                const auto& mem = fam.member(k, j);
                if (!member_escapes(P, j, cfg, u, b)) continue;
                ++count[k];
                worst[k] = std::max(worst[k], mem.mean);
            }
        },
        threads);
    for (std::size_t k = 0; k < B; ++k) {
        c.escaping += count[k];
        c.mu = std::max(c.mu, worst[k]);
    }
    const double scale = c.base / std::pow(b - a, mu_exponent(g));
    c.constant = scale > 0.0 ? c.mu / scale : 0.0;
    while (c.constant * scale < c.mu) c.constant = std::nextafter(c.constant, INFINITY);
    return c;
}

struct EngulfCalibration {
    double c_1 = 1.0;
    std::size_t pairs = 0;       ///< intersecting same-level pairs examined
    std::size_t unresolved = 0;  ///< pairs with no engulfing level on the grid
};

/**
 * Largest minimal engulfing ratio over intersecting pairs of family cylinders at
 * levels <= max_level. Pairs farther apart than the largest such cylinder are skipped.
 */
inline EngulfCalibration calibrate_engulfing(const CylinderFamily& fam, std::size_t max_level,
                                             std::size_t threads = default_threads()) {
    const auto& P = fam.profiles();
    const int n = fam.consts().n;
    const std::size_t top = std::min(max_level + 1, fam.levels());
    double s_max = 0.0, r_max = 0.0;
    for (const auto& p : P)
        for (std::size_t j = 0; j < top; ++j) {
            s_max = std::max(s_max, p.s[j]);
            r_max = std::max(r_max, p.r[j]);
        }
    std::vector<std::size_t> order(P.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return P[a].t < P[b].t; });
    std::vector<EngulfCalibration> part(P.size());
    parallel_for(
        order.size(),
        [&](std::size_t ia) {
            auto& c = part[ia];
            const auto& A = P[order[ia]];
            for (std::size_t ib = ia + 1; ib < order.size(); ++ib) {
                const auto& B = P[order[ib]];
                if (B.t - A.t >= s_max) break;
                if (distance(A.x, B.x, n) >= 2.0 * r_max) continue;
                for (std::size_t j = 0; j < top; ++j) {
                    if (!A.cylinder(j).intersects(B.cylinder(j), n)) continue;
                    ++c.pairs;
                    const auto e = two_point_engulfing(A, B, j);
                    if (std::isfinite(e.c1))
                        c.c_1 = std::max(c.c_1, e.c1);
                    else
                        ++c.unresolved;
                }
            }
        },
        threads);
    EngulfCalibration c;
    for (const auto& p : part) {
        c.pairs += p.pairs;
        c.unresolved += p.unresolved;
        c.c_1 = std::max(c.c_1, p.c_1);
    }
    return c;
}

struct StoppingCylinder {
    std::size_t member = 0;  ///< family index of the witness Q(s_z, y_z)
    std::size_t base = 0, level = 0;
    double s_z = 0.0, mean = 0.0;
    std::size_t ancestor_violations = 0;  ///< members containing the witness with mean > 2 lambda

    // filled by classify_and_dilate
    CaseLabel label = CaseLabel::Case3NeverIntrinsic;
    std::size_t sigma_level = 0, star_level = 0, dstar_level = 0;
    Cylinder Qz, Qs, Qss;
    Regime regime;
    bool within_c2 = false;
    double size_ratio = 0.0;  ///< |Q**| / |Q_z|
    double mean_Qz = 0.0, mean_Qss = 0.0, mean_q_star = 0.0;
    double lambda_low = 0.0;  ///< lambda / mean over Q_z
    double rh_constant = 0.0; ///< lambda / ((mean F^q over Q*)^(1/q) + M*(f~^2)(y_z))
    double case3_lhs = 0.0, case3_rhs = 0.0;
    bool case3_ok = true;
    bool escaped = false;  ///< Q** left Q_{b,b} or the s-grid (guard violation)
};

/**
 * Stopping-time witness for z: the first member in scan order (larger s first)
 * that contains z, has mean > lambda, and no containing member with mean > 2 lambda.
 * heavy is the scan order filtered to members with mean > lambda. When fits is
 * given, admissible members it rejects are skipped; if every admissible member
 * is rejected the largest one is returned with escaped set.
 */
template <class Fits>
std::optional<StoppingCylinder> stopping_cylinder(const CylinderFamily& fam, const std::vector<std::size_t>& heavy,
                                                  const Point& z, double tz, double lambda, Fits&& fits) {
    const int n = fam.consts().n;
    auto ancestors_over = [&](std::size_t idx) {
        const auto& q = fam.members()[idx].q;
        std::size_t count = 0;
        for (std::size_t other : heavy) {
            const auto& o = fam.members()[other];
            if (o.level <= fam.members()[idx].level) break;  // heavy is sorted by level descending
            if (exceeds(o.mean, 2.0 * lambda) && o.q.contains(q, n)) ++count;
        }
        return count;
    };
    auto make = [&](std::size_t idx) {
        const auto& mem = fam.members()[idx];
        StoppingCylinder s;
        s.member = idx;
        s.base = mem.base;
        s.level = mem.level;
        s.s_z = mem.q.s();
        s.mean = mem.mean;
        s.ancestor_violations = ancestors_over(idx);
        return s;
    };
    std::optional<std::size_t> fallback;
    for (std::size_t idx : heavy) {
        const auto& mem = fam.members()[idx];
        if (!exceeds(mem.mean, lambda) || !mem.q.contains(z, tz, n)) continue;
        if (!fallback) fallback = idx;
        if (ancestors_over(idx) != 0) continue;
        if (!fits(idx)) continue;
        return make(idx);
    }
    if (!fallback) return std::nullopt;
    auto s = make(*fallback);
    s.escaped = true;
    return s;
}

inline std::optional<StoppingCylinder> stopping_cylinder(const CylinderFamily& fam, const std::vector<std::size_t>& heavy,
                                                         const Point& z, double tz, double lambda) {
    return stopping_cylinder(fam, heavy, z, tz, lambda, [](std::size_t) { return true; });
}

/// Members with mean > lambda in scan order.
inline std::vector<std::size_t> heavy_members(const CylinderFamily& fam, double lambda) {
    std::vector<std::size_t> heavy;
    for (std::size_t i : fam.scan_order())
        if (exceeds(fam.members()[i].mean, lambda)) heavy.push_back(i);
    return heavy;
}

/// Convenience overload scanning the whole family.
inline std::optional<StoppingCylinder> stopping_cylinder(const CylinderFamily& fam, const Point& z, double tz,
                                                         double lambda) {
    return stopping_cylinder(fam, heavy_members(fam, lambda), z, tz, lambda);
}

struct ClassifyInputs {
    const ScalarField* u = nullptr;      ///< rescaled solution (regime classification)
    const WindowIntegrator* Fq = nullptr;  ///< F^q for the reverse Hoelder constant
    double f2_maximal_at_witness = 0.0;    ///< M*(f~^2)(y_z)
    double b = 1.0;                        ///< Q** must stay in Q_{b,b}
};

/// Completes a witness with its case, Q_z, Q*, Q** and the recorded constants.
inline void classify_and_dilate(StoppingCylinder& st, const CylinderFamily& fam, const CoveringConfig& cfg,
                                const ClassifyInputs& in, double lambda) {
    require(in.u && in.Fq, ErrorCode::InvalidArgument, "classification needs u and F^q");
    const auto& P = fam.profiles()[st.base];
    const auto& g = fam.consts();
    const int n = g.n;
    const double m = g.m();
    const auto c = case_geometry(P, st.level, cfg, *in.u);
    if (c.dstar >= P.size())
        fail(ErrorCode::DilationEscapesDomain,
             "dilation beyond the s-grid at witness level " + std::to_string(st.level) + ": lambda below mu_{a,b}?");
    st.label = c.label;
    st.regime = c.regime;
    st.sigma_level = c.sigma;
    st.star_level = c.star;
    st.dstar_level = c.dstar;
    st.Qz = c.half_core ? P.cylinder(c.sigma).scaled(0.5, 0.5) : P.cylinder(c.sigma);
    st.Qs = P.cylinder(c.star);
    st.Qss = P.cylinder(c.dstar);
    st.within_c2 = c.dstar <= st.level + std::size_t(cfg.off_c2);
    require(unit_cylinder(in.b).contains(st.Qss, n), ErrorCode::DilationEscapesDomain,
            "Q** leaves Q_{b,b}: " + st.Qss.describe(n));
    st.size_ratio = st.Qss.measure(n) / st.Qz.measure(n);
    st.mean_Qz = fam.F().cylinder_mean(st.Qz);
    st.mean_Qss = fam.F().cylinder_mean(st.Qss);
    st.mean_q_star = in.Fq->cylinder_mean(st.Qs);
    st.lambda_low = st.mean_Qz > 0.0 ? lambda / st.mean_Qz : std::numeric_limits<double>::infinity();
    const double rhs = std::pow(st.mean_q_star, 1.0 / cfg.vartheta) + in.f2_maximal_at_witness;
    st.rh_constant = rhs > 0.0 ? lambda / rhs : std::numeric_limits<double>::infinity();
    if (st.label == CaseLabel::Case3NeverIntrinsic) {
        const double th = P.theta[st.sigma_level];
        st.case3_lhs = cfg.gamma_1 * std::pow(th, (m + 1.0) / (1.0 - m)) / P.s[st.sigma_level];
        st.case3_rhs = 0.5 * lambda + in.f2_maximal_at_witness;
        st.case3_ok = st.case3_lhs <= st.case3_rhs;
    }
}

struct CoveringResult {
    double lambda = 0.0;
    std::vector<StoppingCylinder> cylinders;  ///< one per distinct witness
    std::vector<std::size_t> selected;        ///< indices into cylinders
    std::size_t level_set_nodes = 0;          ///< nodes of O_lambda in Q_{a,a}
    double level_set_measure = 0.0;
    double selected_measure = 0.0;            ///< sum of |Q_i| (i.e. |Q_z|) over selected
    double covering_constant = 0.0;           ///< level_set_measure / selected_measure
    bool cores_disjoint = true;
    std::size_t uncovered_nodes = 0;
    std::size_t mean_bound_violations = 0;    ///< mean over Q** > 2 lambda
    std::size_t ancestor_violations = 0;
    std::size_t case3_violations = 0;
    std::size_t nesting_violations = 0;       ///< Q_z in Q* in Q** fails
    std::size_t guard_violations = 0;         ///< witnesses whose Q** escapes; left out of the selection
    std::size_t case_count[3] = {0, 0, 0};
    double max_size_ratio = 0.0, max_lambda_low = 0.0, max_rh_constant = 0.0;
};

/**
 * Covers O_lambda intersected with Q_{a,a}: stopping witnesses for every level-set node,
 * case completion, then Vitali selection on the Q* cores with Q** dilations.
 * Mf2 is M*(f~^2) on the family grid.
 */
inline CoveringResult cover_level_set(const CylinderFamily& fam, const ScalarField& MF, const ClassifyInputs& in,
                                      const ScalarField& Mf2, double lambda, double a, const CoveringConfig& cfg,
                                      std::size_t threads = default_threads()) {
    require(0.5 <= a && a < in.b && in.b <= 1.0, ErrorCode::BadRange, "need 1/2 <= a < b <= 1");
    const auto& g = fam.grid();
    const int n = g.dim();
    CoveringResult res;
    res.lambda = lambda;
    const auto heavy = heavy_members(fam, lambda);
    const Cylinder Qa = unit_cylinder(a);
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t k = i / g.space_size(), j = i % g.space_size();
        if (exceeds(MF[i], lambda) && Qa.contains(g.point(j), g.time(k), n)) nodes.push_back(i);
    }
    res.level_set_nodes = nodes.size();
    std::vector<std::size_t> witness(nodes.size(), std::numeric_limits<std::size_t>::max());
    std::vector<StoppingCylinder> found(nodes.size());
    parallel_for(
        nodes.size(),
        [&](std::size_t q) {
            const std::size_t i = nodes[q];
            auto fits = [&](std::size_t idx) {
                const auto& mem = fam.members()[idx];
                return !member_escapes(fam.profiles()[mem.base], mem.level, cfg, *in.u, in.b);
            };
            const auto st =
                stopping_cylinder(fam, heavy, g.point(i % g.space_size()), g.time(i / g.space_size()), lambda, fits);
            if (st) {
                witness[q] = st->member;
                found[q] = *st;
            }
        },
        threads);
    std::vector<std::size_t> distinct;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        const std::size_t i = nodes[q];
        res.level_set_measure += g.cell_volume(i % g.space_size()) * g.time_cell_length(i / g.space_size());
        if (witness[q] != std::numeric_limits<std::size_t>::max()) distinct.push_back(witness[q]);
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    res.cylinders.resize(distinct.size());
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        if (witness[q] == std::numeric_limits<std::size_t>::max()) continue;
        const auto pos = std::size_t(std::lower_bound(distinct.begin(), distinct.end(), witness[q]) - distinct.begin());
        res.cylinders[pos] = found[q];
    }
    parallel_for(
        res.cylinders.size(),
        [&](std::size_t c) {
            if (res.cylinders[c].escaped) return;
            ClassifyInputs local = in;
            const auto& st = res.cylinders[c];
            local.f2_maximal_at_witness = Mf2[fam.bases()[st.base].node];
            try {
                classify_and_dilate(res.cylinders[c], fam, cfg, local, lambda);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DilationEscapesDomain) throw;
                res.cylinders[c].escaped = true;
            }
        },
        threads);
    std::vector<VitaliItem> items;
    std::vector<std::size_t> item_of;
    for (std::size_t c = 0; c < res.cylinders.size(); ++c) {
        const auto& st = res.cylinders[c];
        if (st.escaped) {
            ++res.guard_violations;
            continue;
        }
        items.push_back({st.Qs, st.Qss, st.Qs.s()});
        item_of.push_back(c);
        res.case_count[int(st.label)]++;
        if (exceeds(st.mean_Qss, 2.0 * lambda)) ++res.mean_bound_violations;
        if (st.ancestor_violations) ++res.ancestor_violations;
        if (!st.case3_ok) ++res.case3_violations;
        if (!st.Qs.contains(st.Qz, n) || !st.Qss.contains(st.Qs, n)) ++res.nesting_violations;
        res.max_size_ratio = std::max(res.max_size_ratio, st.size_ratio);
        res.max_lambda_low = std::max(res.max_lambda_low, st.lambda_low);
        res.max_rh_constant = std::max(res.max_rh_constant, st.rh_constant);
    }
    const auto kept = vitali_select(items, n);
    for (std::size_t k : kept) res.selected.push_back(item_of[k]);
    for (std::size_t a1 = 0; a1 < kept.size(); ++a1)
        for (std::size_t b1 = a1 + 1; b1 < kept.size(); ++b1)
            if (items[kept[a1]].core.intersects(items[kept[b1]].core, n)) res.cores_disjoint = false;
    std::vector<char> covered(g.size(), 0);
    for (std::size_t k : kept) {
        for_each_node_inside(g, items[k].dilated, [&](std::size_t i) { covered[i] = 1; });
        res.selected_measure += res.cylinders[item_of[k]].Qz.measure(n);
    }
    for (std::size_t i : nodes)
        if (!covered[i]) ++res.uncovered_nodes;
    res.covering_constant = res.selected_measure > 0.0 ? res.level_set_measure / res.selected_measure : 0.0;
    return res;
}

}  // namespace fdelab
