#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "../estimates.hpp"
#include "../parallel.hpp"
#include "manifest.hpp"
#include "problem.hpp"

namespace fdelab {

using ojson = nlohmann::ordered_json;

/**
 * One evaluated item of a suite. key identifies the item across refinement
 * levels; value is the number compared between levels (the empirical constant
 * for reports). Hypothesis failures are skips, anything else thrown is an error.
 */
struct Entry {
    std::string suite, key;
    std::optional<InequalityReport> report;
    ojson extra = ojson::object();
    double value = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    bool skipped = false;
    std::string error;
};

inline bool is_hypothesis_error(ErrorCode c) {
    return c == ErrorCode::NotSubIntrinsic || c == ErrorCode::NotIntrinsic || c == ErrorCode::FSmallnessFails ||
           c == ErrorCode::HypothesisUnmet || c == ErrorCode::DilationEscapesDomain || c == ErrorCode::ZeroSolution;
}

inline std::string fmt_key(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

namespace detail {

inline Entry report_entry(const std::string& suite, const std::string& key, InequalityReport r, const RunManifest& M) {
    if (auto tol = M.tolerance_for(r.name)) {
        r.tolerance = *tol;
        r.finish();
    }
    Entry e;
    e.suite = suite;
    e.key = key;
    e.value = r.degenerate() ? std::numeric_limits<double>::quiet_NaN() : r.constant;
    e.failed = !r.passed();
    e.report = std::move(r);
    return e;
}

/// Runs fn(i) for each item in parallel; each call returns its entries, which are concatenated in item order.
inline std::vector<Entry> run_items(const std::string& suite, std::size_t count,
                                    const std::function<std::vector<Entry>(std::size_t)>& fn,
                                    const std::function<std::string(std::size_t)>& key_of) {
    std::vector<std::vector<Entry>> slots(count);
    parallel_for(count, [&](std::size_t i) {
        try {
            slots[i] = fn(i);
        } catch (const Error& err) {
            Entry e;
            e.suite = suite;
            e.key = key_of(i);
            e.error = err.what();
            e.skipped = is_hypothesis_error(err.code());
            e.failed = !e.skipped;
            slots[i] = {std::move(e)};
        }
    });
    std::vector<Entry> out;
    for (auto& s : slots)
        for (auto& e : s) out.push_back(std::move(e));
    return out;
}

inline std::uint64_t suite_seed(std::uint64_t seed, const std::string& suite) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : suite) h = (h ^ std::uint8_t(c)) * 1099511628211ull;
    return seed ^ h;
}

inline Point on_axis(double x1) { return {x1, 0.0, 0.0}; }
inline Point pt(const std::array<double, 2>& x) { return {x[0], x[1], 0.0}; }

inline GeometryConstants geometry_of(const RunManifest& M) {
    return GeometryConstants::make(M.model, M.geometry.b_hat, M.geometry.S, M.geometry.R, M.geometry.K);
}

inline SGridSpec sgrid_of(const RunManifest& M) { return SGridSpec{M.geometry.levels_per_octave, M.geometry.octaves}; }

}  // namespace detail

inline std::vector<Entry> suite_algebra(const EstimateFields& F, const RunManifest& M) {
    const std::string S = "algebra";
    std::mt19937_64 rng(detail::suite_seed(M.seed, S));
    std::uniform_real_distribution<double> U(0.0, 5.0), Mx(0.05, 0.95), V(0.0, 1.0);
    std::vector<Entry> out;
    const double tight = 1.0 + 1e-12;
    for (std::size_t i = 0; i < M.verify.algebra.samples; ++i) {
        const double u = U(rng), a = U(rng), m = Mx(rng);
        const auto r = aux_integral_bounds(u, a, m);
        const std::string k = fmt_key("#%.0f", double(i));
        out.push_back(detail::report_entry(S, "aux_lower" + k, InequalityReport::make("aux_integral_lower", r.lower, {{"integral", r.integral}}, tight), M));
        out.push_back(detail::report_entry(S, "aux_upper" + k, InequalityReport::make("aux_integral_upper", r.integral, {{"upper", r.upper}}, tight), M));
        const double pa = U(rng), pb = U(rng);
        out.push_back(detail::report_entry(
            S, "power" + k,
            InequalityReport::make("power_inequality", std::abs(std::pow(pa, m) - std::pow(pb, m)), {{"power_of_difference", std::pow(std::abs(pa - pb), m)}},
                                   tight),
            M));
    }
    const double m = F.m() < 1.0 ? F.m() : 0.5;
    for (double q : {0.6, 0.75, 1.0})
        for (int i = 0; i < 20; ++i) {
            WeightedSample s;
            std::vector<double> eta;
            for (int j = 0; j < 100; ++j) {
                s.g.push_back(V(rng) < 0.1 ? 0.0 : 3.0 * V(rng));
                s.w.push_back(0.1 + V(rng));
                eta.push_back(V(rng));
            }
            const auto reps = mean_change_checks(s, eta, {q, 1.0 / m, m, std::nullopt});
            for (const auto& r : reps)
                out.push_back(detail::report_entry(S, r.name + fmt_key("@q=%.2f#%.0f", q, double(i)), r, M));
        }
    // mean-zero part of u around each center, for the small-mean chain
    const auto& g = F.grid();
    for (double c : M.verify.centers) {
        const Cylinder Q = Cylinder::centered(detail::on_axis(c), M.verify.t0, 0.3, 1.0);
        const std::string key = fmt_key("small_mean_chain@x=%.2f", c);
        try {
            const double mu = cylinder_mean(F.u, Q, 1.0);
            const auto v = F.u.values();
            std::vector<double> w(v.begin(), v.end());
            for (auto& x : w) x -= mu;
            const auto ch = small_mean_chain(ScalarField(g, std::move(w), false, "u-mean"), Q.scaled(0.5, 0.5), Q, 2.0, 0.5);
            auto e = detail::report_entry(S, key, ch.report, M);
            e.extra["hypothesis"] = ch.hypothesis;
            e.extra["mean_Q1"] = ch.mean_Q1;
            out.push_back(std::move(e));
        } catch (const Error& err) {
            Entry e;
            e.suite = S;
            e.key = key;
            e.error = err.what();
            e.skipped = is_hypothesis_error(err.code());
            e.failed = !e.skipped;
            out.push_back(std::move(e));
        }
    }
    return out;
}

inline std::vector<Entry> suite_energy(const EstimateFields& F, const RunManifest& M) {
    const std::string S = "energy";
    const auto& V = M.verify;
    const auto& E = V.energy;
    const auto& cs = V.centers;
    const std::size_t nc = cs.size(), nl = E.c_levels.size();
    // items: energy (center x level), truncation (center), sub-intrinsic sweep (center)
    const std::size_t n_energy = nc * nl, count = n_energy + 2 * nc;
    auto key_of = [&](std::size_t i) {
        if (i < n_energy) return fmt_key("energy@x=%.2f,c=%.3f", cs[i / nl], E.c_levels[i % nl]);
        if (i < n_energy + nc) return fmt_key("truncation@x=%.2f", cs[i - n_energy]);
        return fmt_key("subintrinsic@x=%.2f", cs[i - n_energy - nc]);
    };
    ProfileBuilder PB(F.u.power(F.m() + 1.0), detail::geometry_of(M), detail::sgrid_of(M));
    return detail::run_items(
        S, count,
        [&](std::size_t i) {
            std::vector<Entry> out;
            if (i < n_energy) {
                const double c = cs[i / nl], lev = E.c_levels[i % nl];
                for (auto v : {EnergyVariant::Full, EnergyVariant::Modified}) {
                    auto r = energy_estimate(F, detail::on_axis(c), V.t0, E.rho, E.theta, lev, v);
                    out.push_back(detail::report_entry(S, r.name + fmt_key("@x=%.2f,c=%.3f", c, lev), r, M));
                }
            } else if (i < n_energy + nc) {
                const double c = cs[i - n_energy];
                const double T = 4.0 * E.trunc_theta * E.trunc_rho * E.trunc_rho;
                auto s = cylinder_sample(F.u, Cylinder::window(detail::on_axis(c), E.trunc_t - T, E.trunc_t, 2.0 * E.trunc_rho)).g;
                std::nth_element(s.begin(), s.begin() + std::ptrdiff_t(s.size() / 2), s.end());
                const double k = s[s.size() / 2];
                auto r = truncation_energy(F, detail::on_axis(c), E.trunc_t, E.trunc_rho, E.trunc_theta, k);
                auto e = detail::report_entry(S, fmt_key("truncation_energy@x=%.2f", c), r, M);
                e.extra["k"] = k;
                out.push_back(std::move(e));
            } else {
                const double c = cs[i - n_energy - nc];
                const auto prof = PB.build(detail::on_axis(c), V.t0);
                const std::size_t top = prof.size();
                for (std::size_t j = top - std::min(top, E.profile_levels); j < top; ++j) {
                    const std::string key = fmt_key("subintrinsic_energy@x=%.2f,j=%.0f", c, double(top - 1 - j));
                    try {
                        auto e = detail::report_entry(S, key, subintrinsic_energy(F, prof.cylinder(j), M.geometry.K), M);
                        e.extra["s"] = prof.s[j];
                        e.extra["intrinsic"] = bool(prof.intrinsic[j]);
                        out.push_back(std::move(e));
                    } catch (const Error& err) {
                        if (!is_hypothesis_error(err.code())) throw;
                        Entry e;
                        e.suite = S;
                        e.key = key;
                        e.skipped = true;
                        e.error = err.what();
                        out.push_back(std::move(e));
                    }
                }
            }
            return out;
        },
        key_of);
}

inline std::vector<Entry> suite_bounds(const EstimateFields& F, const RunManifest& M) {
    const std::string S = "bounds";
    const auto& V = M.verify;
    const auto& ts = V.bounds.vertex_t;
    const std::size_t nc = V.centers.size(), nt = ts.size();
    const double m = F.m();
    ProfileBuilder PB(F.u.power(m + 1.0), detail::geometry_of(M), detail::sgrid_of(M));
    std::vector<ScalingProfile> profs(nc);
    parallel_for(nc, [&](std::size_t c) { profs[c] = PB.build(detail::on_axis(V.centers[c]), V.t0); });
    auto key_of = [&](std::size_t i) {
        return i < nc * nt ? fmt_key("vertex@x=%.2f,t=%.3f", V.centers[i / nt], ts[i % nt])
                           : fmt_key("consistency@x=%.2f", V.centers[i - nc * nt]);
    };
    return detail::run_items(
        S, nc * nt + nc,
        [&](std::size_t i) {
            std::vector<Entry> out;
            if (i >= nc * nt) {
                const std::size_t c = i - nc * nt;
                const auto& P = profs[c];
                std::size_t j = P.index_at_least(0.25 * P.s.back());
                while (j < P.size() && !P.intrinsic[j]) ++j;
                require(j < P.size(), ErrorCode::NotIntrinsic, "no intrinsic level above S/4");
                const auto cons = intrinsic_consistency(F.u, PB, P, j, {1.25, 1.5, 2.0});
                const double a[3] = {1.25, 1.5, 2.0};
                for (int q = 0; q < 3; ++q) {
                    auto r = InequalityReport::make("intrinsic_consistency", cons[q], {{"one", 1.0}}, P.consts.K);
                    out.push_back(detail::report_entry(S, fmt_key("intrinsic_consistency@x=%.2f,a=%.2f", V.centers[c], a[q]), r, M));
                }
                return out;
            }
            const double c = V.centers[i / nt], t = ts[i % nt];
            const auto Vg = vertex_geometry(PB, profs[i / nt], t);
            const std::string at = fmt_key("@x=%.2f,t=%.3f", c, t);
            for (double p : {m, 1.0, m + 1.0}) {
                auto sb = sup_bound(F, Vg, p);
                auto e = detail::report_entry(S, sb.report.name + at, sb.report, M);
                e.extra["intrinsic_ratio"] = sb.intrinsic_ratio;
                e.extra["fitted_q"] = sb.fitted_q;
                e.extra["sigma_ratio"] = sb.sigma_ratio;
                out.push_back(std::move(e));
            }
            auto rh = reverse_holder_u(F, Vg);
            out.push_back(detail::report_entry(S, "reverse_holder_u" + at, rh.report, M));
            for (const auto& [tag, Q] : {std::pair{"small", Vg.Q3half()}, std::pair{"large", Vg.Q2t()}}) {
                const double lo = std::pow(cylinder_mean(F.u, Q, m), 1.0 / m);
                const double hi = std::pow(cylinder_mean(F.u, Q, m + 1.0), 1.0 / (m + 1.0));
                auto r = InequalityReport::make("jensen_order", lo, {{"power_mean_m_plus_1", hi}}, 1.0 + 1e-12, Q.describe(F.grid().dim()));
                out.push_back(detail::report_entry(S, std::string("jensen_order_") + tag + at, r, M));
            }
            return out;
        },
        key_of);
}

inline std::vector<Entry> suite_regime(const EstimateFields& F, const RunManifest& M) {
    const std::string S = "regime";
    const auto& R = M.verify.regime;
    const double m = F.m();
    std::vector<Entry> out;
    for (const auto& [name, tr, expect] : {std::tuple{"early", R.early, RegimeLabel::Degenerate},
                                          std::tuple{"late", R.late, RegimeLabel::NonDegenerate}}) {
        Entry e;
        e.suite = S;
        e.key = std::string("regime_") + name;
        try {
            const Cylinder Q = intrinsic_cylinder(F.u, detail::on_axis(0.0), tr[0], tr[1], m);
            const auto reg = regime_classify(F.u, Q, R.epsilon, m);
            e.value = reg.oscillation_ratio;
            e.extra["label"] = to_string(reg.label);
            e.extra["expected"] = to_string(expect);
            e.extra["epsilon"] = R.epsilon;
            e.extra["oscillation_ratio"] = reg.oscillation_ratio;
            e.extra["geometry"] = Q.describe(F.grid().dim());
            e.failed = reg.label != expect;
        } catch (const Error& err) {
            e.error = err.what();
            e.failed = true;
        }
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<Entry> suite_grad(const EstimateFields& F, const RunManifest& M) {
    const std::string S = "grad";
    const auto& G = M.verify.grad;
    const std::size_t nr = G.radii.size();
    const double m = F.m();
    auto key_of = [&](std::size_t i) { return fmt_key("grad_reverse_holder@x=%.2f,r=%.2f", G.centers[i / nr], G.radii[i % nr]); };
    return detail::run_items(
        S, G.centers.size() * nr,
        [&](std::size_t i) {
            const double c = G.centers[i / nr], r = G.radii[i % nr];
            const Cylinder Q = m < 1.0 ? intrinsic_cylinder(F.u, detail::on_axis(c), M.verify.t0, r, m)
                                       : Cylinder::construction(detail::on_axis(c), M.verify.t0, r * r, r);
            const auto reg = regime_classify(F.u, Q, G.epsilon, m);
            const auto gr = grad_reverse_holder(F, Q, reg.label, G.epsilon, G.vartheta, M.geometry.K);
            auto e = detail::report_entry(S, key_of(i), gr.report, M);
            e.extra["regime"] = to_string(reg.label);
            e.extra["oscillation_ratio"] = reg.oscillation_ratio;
            e.extra["epsilon"] = G.epsilon;
            e.extra["intrinsic_ratio"] = gr.intrinsic_ratio;
            return std::vector<Entry>{std::move(e)};
        },
        key_of);
}

/**
 * Slice means snap to the nearest time node, so the pairs are drawn from the time
 * lattice of the coarsest refinement level. Finer levels are nested in it and see
 * the same two times.
 */
inline std::vector<Entry> suite_time_switch(const EstimateFields& F, const RunManifest& M) {
    const std::string S = "time_switch";
    const auto& T = M.verify.time_switch;
    const double t0 = M.verify.t0;
    const std::size_t coarse = *std::min_element(M.levels.begin(), M.levels.end());
    const double dt = (M.problem.t_end - M.problem.t_start) / double(M.time_nodes_for(coarse) - 1);
    const auto k_lo = std::size_t(std::ceil((t0 - 2.0 * T.s - M.problem.t_start) / dt - 1e-9));
    const auto k_hi = std::size_t(std::floor((t0 + 2.0 * T.s - M.problem.t_start) / dt + 1e-9));
    require(k_hi > k_lo, ErrorCode::ConfigError, "time-switch window holds fewer than two coarse time nodes");
    std::mt19937_64 rng(detail::suite_seed(M.seed, S));
    std::uniform_int_distribution<std::size_t> U(k_lo, k_hi);
    std::vector<std::pair<double, double>> pairs;
    while (pairs.size() < T.pairs) {
        std::size_t a = U(rng), b = U(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        pairs.push_back({M.problem.t_start + double(a) * dt, M.problem.t_start + double(b) * dt});
    }
    auto key_of = [&](std::size_t i) { return fmt_key("time_mean_switch#%.0f", double(i)); };
    auto out = detail::run_items(
        S, pairs.size(),
        [&](std::size_t i) {
            auto [a, b] = time_mean_switch(F, detail::pt(T.x), t0, T.s, T.r, pairs[i].first, pairs[i].second);
            auto ea = detail::report_entry(S, key_of(i), a, M);
            auto eb = detail::report_entry(S, key_of(i) + "_linear", b, M);
            ea.extra["sigma"] = eb.extra["sigma"] = pairs[i].first;
            ea.extra["tau"] = eb.extra["tau"] = pairs[i].second;
            return std::vector<Entry>{std::move(ea), std::move(eb)};
        },
        key_of);
    // the run-wide empirical constant: largest ratio over all pairs
    for (const char* name : {"time_mean_switch", "time_mean_switch_linear"}) {
        Entry e;
        e.suite = S;
        e.key = std::string(name) + ":max";
        e.value = 0.0;
        for (const auto& x : out)
            if (x.report && x.report->name == name && std::isfinite(x.value)) e.value = std::max(e.value, x.value);
        e.extra["pairs"] = pairs.size();
        out.push_back(std::move(e));
    }
    return out;
}

inline HigherIntegrabilityProbe probe_of(const RunManifest& M, ProbeForm form) {
    const auto& P = M.verify.probe;
    HigherIntegrabilityProbe pr;
    pr.p_list = P.p;
    pr.x = detail::pt(P.x);
    pr.t0 = M.verify.t0;
    pr.form = form;
    pr.S = P.S;
    pr.theta = P.theta;
    pr.C = P.C;
    pr.R = P.R;
    pr.bounded_tol = M.verify.probe_stability;
    return pr;
}

inline std::vector<Entry> suite_probe(const EstimateFields& F, const RunManifest& M) {
    const std::string S = "probe";
    std::vector<ProbeForm> forms{ProbeForm::Intrinsic};
    if (M.verify.probe.R > 0.0 && F.m() < 1.0) forms.push_back(ProbeForm::Parabolic);
    const auto& ps = M.verify.probe.p;
    auto key_of = [&](std::size_t i) {
        return fmt_key(forms[i / ps.size()] == ProbeForm::Intrinsic ? "probe_intrinsic@p=%.2f" : "probe_parabolic@p=%.2f", ps[i % ps.size()]);
    };
    return detail::run_items(
        S, forms.size() * ps.size(),
        [&](std::size_t i) {
            const auto pr = probe_of(M, forms[i / ps.size()]);
            pr.validate();
            return std::vector<Entry>{detail::report_entry(S, key_of(i), higher_integrability_report(F, pr, ps[i % ps.size()]), M)};
        },
        key_of);
}

inline std::vector<Entry> run_suite(const std::string& name, const EstimateFields& F, const RunManifest& M) {
    if (name == "algebra") return suite_algebra(F, M);
    if (name == "energy") return suite_energy(F, M);
    if (name == "bounds") return suite_bounds(F, M);
    if (name == "regime") return suite_regime(F, M);
    if (name == "grad") return suite_grad(F, M);
    if (name == "time_switch") return suite_time_switch(F, M);
    if (name == "probe") return suite_probe(F, M);
    fail(ErrorCode::ConfigError, "unknown suite '" + name + "'");
}

}  // namespace fdelab
