#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "../covering.hpp"
#include "suites.hpp"

namespace fdelab {

/// Where a command writes, and where it tells the user what failed.
struct CommandContext {
    std::filesystem::path out;
    std::ostream* log = &std::cerr;
};

namespace detail {

inline std::ofstream open_out(const CommandContext& ctx, const std::string& name) {
    std::filesystem::create_directories(ctx.out);
    std::ofstream os(ctx.out / name, std::ios::binary);
    require(bool(os), ErrorCode::FormatError, "cannot write " + (ctx.out / name).string());
    return os;
}

inline ojson terms_json(const std::vector<std::pair<std::string, double>>& terms) {
    ojson j = ojson::object();
    for (const auto& [k, v] : terms) j[k] = v;
    return j;
}

/// Doubles as the shortest text that round-trips; nan/inf spelled out.
inline std::string csv_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return ojson(v).dump();
}

inline std::string status_of(const Entry& e) {
    if (e.skipped) return "skipped";
    if (!e.error.empty()) return "error";
    return e.failed ? "fail" : "pass";
}

/// Run description written first in every report file; excludes the thread count so reports are thread-invariant.
inline ojson run_header(const RunManifest& M, const std::string& command) {
    ojson j;
    j["schema"] = kManifestSchema;
    j["command"] = command;
    j["manifest"] = M.source_name;
    j["seed"] = M.seed;
    j["model"] = {{"n", M.model.n}, {"m", M.model.m}, {"nu", M.model.nu}, {"L", M.model.L}};
    j["problem"] = {{"kind", M.problem.kind == ProblemKind::Barenblatt ? "barenblatt" : "heat_kernel"},
                    {"source", M.problem.source == SourceKind::Exact ? "exact" : "solver"},
                    {"C", M.problem.C},
                    {"half_width", M.problem.half_width},
                    {"t_start", M.problem.t_start},
                    {"t_end", M.problem.t_end}};
    return j;
}

}  // namespace detail

inline ojson entry_json(const Entry& e, std::size_t level) {
    ojson j;
    j["level"] = level;
    j["suite"] = e.suite;
    j["key"] = e.key;
    j["status"] = detail::status_of(e);
    if (e.report) {
        const auto& r = *e.report;
        j["operation"] = r.name;
        j["lhs"] = r.lhs;
        if (!r.lhs_terms.empty()) j["lhs_terms"] = detail::terms_json(r.lhs_terms);
        j["rhs_terms"] = detail::terms_json(r.rhs_terms);
        j["constant"] = r.constant;
        j["tolerance"] = r.tolerance;
        j["outcome"] = to_string(r.outcome);
        j["geometry"] = r.geometry;
    } else {
        j["value"] = e.value;
    }
    if (!e.extra.empty()) j["extra"] = e.extra;
    if (!e.error.empty()) j["error"] = e.error;
    return j;
}

/// All selected suites on the reference problem at N nodes per axis.
struct LevelRun {
    std::size_t N = 0;
    double l1_rel_error = 0.0;
    std::vector<Entry> entries;
};

inline LevelRun run_level(const RunManifest& M, std::size_t N) {
    LevelRun L;
    L.N = N;
    if (M.verify.suites.empty()) return L;
    const auto pr = make_problem(M, N);
    L.l1_rel_error = pr.l1_rel_error;
    const auto F = EstimateFields::make(pr.u, nullptr, M.model);
    for (const auto& s : M.verify.suites) {
        auto es = run_suite(s, F, M);
        for (auto& e : es) L.entries.push_back(std::move(e));
    }
    return L;
}

inline void write_reports(std::ostream& os, const RunManifest& M, const std::string& command, const LevelRun& L) {
    auto h = detail::run_header(M, command);
    h["level"] = L.N;
    h["time_nodes"] = M.time_nodes_for(L.N);
    if (M.problem.source == SourceKind::Solver) h["l1_rel_error"] = L.l1_rel_error;
    os << ojson{{"run", h}}.dump() << '\n';
    for (const auto& e : L.entries) os << entry_json(e, L.N).dump() << '\n';
}

inline void write_summary(std::ostream& os, const std::vector<Entry>& entries) {
    std::vector<InequalityReport> reps;
    std::map<std::string, std::size_t> skipped;
    for (const auto& e : entries) {
        if (e.report) reps.push_back(*e.report);
        if (e.skipped) ++skipped[e.suite];
    }
    os << "operation,count,degenerate,failed,min,median,max\n";
    for (const auto& s : summarize(reps))
        os << s.name << ',' << s.count << ',' << s.degenerate << ',' << s.failed << ',' << detail::csv_num(s.min) << ','
           << detail::csv_num(s.median) << ',' << detail::csv_num(s.max) << '\n';
    for (const auto& [suite, n] : skipped) os << "skipped:" << suite << ',' << n << ",0,0,nan,nan,nan\n";
}

/// Returns the number of failing entries and names each on the log.
inline std::size_t report_failures(const CommandContext& ctx, const std::vector<Entry>& entries, std::size_t level) {
    std::size_t n = 0;
    for (const auto& e : entries) {
        if (!e.failed) continue;
        ++n;
        *ctx.log << "FAIL [N=" << level << "] " << e.suite << ' ' << e.key;
        if (e.report) *ctx.log << " constant=" << e.report->constant << " tolerance=" << e.report->tolerance;
        if (!e.error.empty()) *ctx.log << " error: " << e.error;
        *ctx.log << '\n';
    }
    return n;
}

inline int cmd_verify(const RunManifest& M, const CommandContext& ctx) {
    const std::size_t N = M.problem.nodes;
    const auto L = run_level(M, N);
    auto os = detail::open_out(ctx, "reports.jsonl");
    write_reports(os, M, "verify", L);
    auto cs = detail::open_out(ctx, "summary.csv");
    write_summary(cs, L.entries);
    return report_failures(ctx, L.entries, N) ? 1 : 0;
}

/// Relative change of one key between the two finest levels.
struct StabilityRow {
    std::string suite, key;
    std::vector<double> values;  ///< one per level, NaN where absent
    std::vector<std::string> labels;  ///< classification labels per level, empty otherwise
    double change = std::numeric_limits<double>::quiet_NaN();
    double limit = 0.0;
    std::string status;  ///< stable, unstable, or n/a
};

inline std::vector<StabilityRow> stability_table(const RunManifest& M, const std::vector<LevelRun>& runs) {
    std::vector<StabilityRow> rows;
    std::map<std::string, std::size_t> index;
    for (std::size_t l = 0; l < runs.size(); ++l)
        for (const auto& e : runs[l].entries) {
            const std::string id = e.suite + '\n' + e.key;
            auto [it, fresh] = index.try_emplace(id, rows.size());
            if (fresh) {
                StabilityRow r;
                r.suite = e.suite;
                r.key = e.key;
                r.values.assign(runs.size(), std::numeric_limits<double>::quiet_NaN());
                r.limit = e.suite == "probe" ? M.verify.probe_stability : M.verify.stability;
                rows.push_back(std::move(r));
            }
            auto& r = rows[it->second];
            r.values[l] = e.skipped ? std::numeric_limits<double>::quiet_NaN() : e.value;
            if (e.extra.contains("label")) {
                r.labels.resize(runs.size());
                r.labels[l] = e.extra["label"].get<std::string>();
            }
        }
    for (auto& r : rows) {
        const std::size_t k = r.values.size();
        const double a = k >= 2 ? r.values[k - 2] : std::numeric_limits<double>::quiet_NaN();
        const double b = k >= 1 ? r.values[k - 1] : std::numeric_limits<double>::quiet_NaN();
        bool labels_agree = true;
        for (const auto& s : r.labels) labels_agree = labels_agree && s == r.labels.front();
        if (std::isfinite(a) && std::isfinite(b) && b != 0.0) r.change = std::abs(b - a) / std::abs(b);
        else if (std::isfinite(a) && std::isfinite(b) && a == b) r.change = 0.0;
        if (!r.labels.empty())  // a classification is stable when its label is; the ratio is informational
            r.status = labels_agree ? "stable" : "unstable";
        else if (std::isfinite(r.change))
            r.status = r.change < r.limit ? "stable" : "unstable";
        else
            r.status = "n/a";
    }
    return rows;
}

inline void write_stability(std::ostream& os, const std::vector<LevelRun>& runs, const std::vector<StabilityRow>& rows) {
    os << "suite,key";
    for (const auto& r : runs) os << ",N" << r.N;
    os << ",change,limit,status,labels\n";
    for (const auto& r : rows) {
        os << r.suite << ",\"" << r.key << '"';
        for (double v : r.values) os << ',' << detail::csv_num(v);
        os << ',' << detail::csv_num(r.change) << ',' << detail::csv_num(r.limit) << ',' << r.status << ',';
        for (std::size_t i = 0; i < r.labels.size(); ++i) os << (i ? "|" : "") << r.labels[i];
        os << '\n';
    }
}

/// Levels actually used: the finest `count` entries of the manifest list (all when count is 0).
inline std::vector<std::size_t> select_levels(const RunManifest& M, std::size_t count) {
    const auto& v = M.levels;
    if (count == 0 || count >= v.size()) return v;
    return {v.end() - std::ptrdiff_t(count), v.end()};
}

inline int cmd_refine(const RunManifest& M, const CommandContext& ctx, std::size_t level_count = 0) {
    const auto levels = select_levels(M, level_count);
    require(levels.size() >= 2 && levels.size() <= 4, ErrorCode::ConfigError, "refine needs 2 to 4 levels");
    std::vector<LevelRun> runs;
    std::size_t failures = 0;
    for (std::size_t N : levels) {
        runs.push_back(run_level(M, N));
        auto os = detail::open_out(ctx, "reports_N" + std::to_string(N) + ".jsonl");
        write_reports(os, M, "refine", runs.back());
        failures += report_failures(ctx, runs.back().entries, N);
    }
    auto cs = detail::open_out(ctx, "summary.csv");
    write_summary(cs, runs.back().entries);
    const auto rows = stability_table(M, runs);
    auto ss = detail::open_out(ctx, "stability.csv");
    write_stability(ss, runs, rows);
    for (const auto& r : rows)
        if (r.status == "unstable") {
            ++failures;
            *ctx.log << "UNSTABLE " << r.suite << ' ' << r.key << " change=" << r.change << " limit=" << r.limit << '\n';
        }
    return failures ? 1 : 0;
}

struct ConvergenceRow {
    std::size_t N = 0, time_nodes = 0;
    double h = 0.0, dt = 0.0, error = 0.0;
    double order = std::numeric_limits<double>::quiet_NaN();  ///< against the previous row, in dt
    std::size_t clamped = 0;
};

inline int cmd_solve(RunManifest M, const CommandContext& ctx, std::size_t level_count = 0) {
    M.problem.source = SourceKind::Solver;
    const auto levels = select_levels(M, level_count);
    require(levels.size() >= 2, ErrorCode::ConfigError, "solve needs at least 2 levels");
    std::vector<ConvergenceRow> rows;
    for (std::size_t N : levels) {
        const auto g = problem_grid(M, N);
        const auto run = make_problem(M, N);
        ConvergenceRow r;
        r.N = N;
        r.time_nodes = g.time_nodes();
        r.h = 2.0 * M.problem.half_width / double(N - 1);
        r.dt = (g.t_end() - g.t_start()) / double(g.time_nodes() - 1);
        r.error = run.l1_rel_error;
        r.clamped = run.clamped;
        if (!rows.empty()) r.order = std::log(rows.back().error / r.error) / std::log(rows.back().dt / r.dt);
        rows.push_back(r);
        if (N == levels.back()) {
            auto os = detail::open_out(ctx, "snapshots.csv");
            os << "t";
            for (int i = 0; i < M.model.n; ++i) os << ",x" << i + 1;
            os << ",u,exact\n";
            const std::size_t K = g.time_nodes() - 1;
            for (std::size_t q = 0; q <= 4; ++q) {
                const std::size_t k = K * q / 4;
                for (std::size_t j = 0; j < g.space_size(); ++j) {
                    const auto x = g.point(j);
                    os << detail::csv_num(g.time(k));
                    for (int i = 0; i < M.model.n; ++i) os << ',' << detail::csv_num(x[i]);
                    os << ',' << detail::csv_num(run.u.at(k, j)) << ',' << detail::csv_num(exact_value(M, x, g.time(k))) << '\n';
                }
            }
        }
    }
    auto os = detail::open_out(ctx, "convergence.csv");
    os << "N,time_nodes,h,dt,l1_rel_error,order,clamped\n";
    for (const auto& r : rows)
        os << r.N << ',' << r.time_nodes << ',' << detail::csv_num(r.h) << ',' << detail::csv_num(r.dt) << ','
           << detail::csv_num(r.error) << ',' << detail::csv_num(r.order) << ',' << r.clamped << '\n';
    int rc = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].order >= M.solve.min_order)) {
            *ctx.log << "FAIL convergence order " << rows[i].order << " at N=" << rows[i].N << " (need >= " << M.solve.min_order << ")\n";
            rc = 1;
        }
    if (!(rows.back().error < M.solve.max_error)) {
        *ctx.log << "FAIL final relative error " << rows.back().error << " (need < " << M.solve.max_error << ")\n";
        rc = 1;
    }
    return rc;
}

inline int cmd_profile(const RunManifest& M, const CommandContext& ctx) {
    const auto pr = make_problem(M, M.problem.nodes);
    ProfileBuilder PB(pr.u.power(M.model.m + 1.0), detail::geometry_of(M), detail::sgrid_of(M));
    auto js = detail::open_out(ctx, "profile_checks.jsonl");
    js << ojson{{"run", detail::run_header(M, "profile")}}.dump() << '\n';
    int rc = 0;
    for (std::size_t i = 0; i < M.profile_points.size(); ++i) {
        const auto x = detail::pt(M.profile_points[i]);
        const auto P = PB.build(x, M.verify.t0);
        auto os = detail::open_out(ctx, "profile_" + std::to_string(i) + ".csv");
        write_profile_csv(os, P);
        const auto rep = verify_profile(P);
        for (const auto& c : rep.checks) {
            ojson j;
            j["point"] = i;
            j["x"] = M.profile_points[i];
            j["t"] = M.verify.t0;
            j["property"] = c.name;
            j["status"] = c.passed ? "pass" : "fail";
            j["constant"] = c.constant;
            j["checked"] = c.checked;
            j["failed"] = c.failed;
            js << j.dump() << '\n';
            if (!c.passed) {
                *ctx.log << "FAIL profile " << i << ' ' << c.name << " (" << c.failed << " of " << c.checked << ")\n";
                rc = 1;
            }
        }
    }
    return rc;
}

/// Covering of the rescaled Barenblatt solution over a geometric lambda sweep above mu_{a,b}.
struct CoverRun {
    double lambda_o = 0.0, ambient_ratio = 0.0, c_1 = 0.0, mu = 0.0, mu_constant = 0.0, max_M = 0.0;
    std::size_t members = 0, engulf_pairs = 0;
    std::vector<CoveringResult> levels;
};

inline bool exact_properties_hold(const CoveringResult& r) {
    return r.cores_disjoint && r.uncovered_nodes == 0 && r.mean_bound_violations == 0 && r.case3_violations == 0 &&
           r.nesting_violations == 0 && r.ancestor_violations == 0 && r.guard_violations == 0;
}

inline CoverRun run_cover(const RunManifest& M) {
    const auto& C = M.cover;
    const ModelParams& P = M.model;
    require(P.m < 1.0, ErrorCode::InvalidExponent, "cover needs m < 1");
    require(M.problem.kind == ProblemKind::Barenblatt, ErrorCode::ConfigError, "cover runs on the Barenblatt solution");
    const auto bb = Barenblatt::make(P, M.problem.C);
    auto exact = [&](const Point& x, double t) { return bb(x, t); };
    // support radius at t = 1 sets the length scale; the cylinder sits well inside the support
    const double q = 1.0 / (1.0 - P.m);
    const double t_o = 1.0;
    const double r_star = std::sqrt(bb.C / (bb.k * (2.0 * q - 1.0))) * std::pow(t_o, bb.beta);
    const double R = C.R_factor * r_star;
    const double theta = C.time_width * t_o / (2.0 * R * R);
    const auto g = SpaceTimeGrid::cube(P.n, -2.2 * R, 2.2 * R, 81, t_o * (1.0 - 1.1 * C.time_width), t_o * (1.0 + 1.1 * C.time_width), 41);
    const auto u = ScalarField::sample(g, exact, true, "u");
    const RescaleSpec rs{{0, 0, 0}, t_o, R, theta, 1e6, C.nodes, C.nodes};
    const auto sp = rescale_to_unit(u, nullptr, P.m, rs, exact);
    const auto F = grad_energy_field(sp.u, P.m);
    const WindowIntegrator Fq(F.power(0.75));
    const auto gc = GeometryConstants::make(P, C.b_hat, 1.0, 1.0);
    ProfileBuilder B(sp.u.power(P.m + 1.0), gc, SGridSpec{C.levels_per_octave, C.octaves});
    CylinderFamily fam(F, B, lattice_bases(sp.u.grid(), C.stride, 1.0));
    const auto MF = intrinsic_maximal(fam);
    CoverRun out;
    out.lambda_o = sp.lambda_o;
    out.ambient_ratio = sp.ambient_ratio;
    out.members = fam.members().size();
    const auto ec = calibrate_engulfing(fam, fam.levels() - 1 - 4 * std::size_t(C.levels_per_octave));
    out.c_1 = ec.c_1;
    out.engulf_pairs = ec.pairs;
    auto cfg = CoveringConfig::make(gc, C.levels_per_octave, C.epsilon, C.delta_tilde, C.gamma_1, ec.c_1);
    const auto mc = calibrate_mu_constant(fam, C.a, C.b, sp.u, sp.f, cfg);
    cfg.mu_constant = mc.constant;
    out.mu_constant = mc.constant;
    out.mu = mu_threshold(C.a, C.b, sp.u, sp.f, gc, cfg);
    const auto Qa = unit_cylinder(C.a);
    const auto& mg = MF.grid();
    for (std::size_t i = 0; i < mg.size(); ++i)
        if (Qa.contains(mg.point(i % mg.space_size()), mg.time(i / mg.space_size()), P.n)) out.max_M = std::max(out.max_M, MF[i]);
    const auto Mf2 = ScalarField::constant(sp.u.grid(), 0.0);
    const ClassifyInputs in{&sp.u, &Fq, 0.0, C.b};
    if (out.max_M <= out.mu) return out;
    for (std::size_t k = 1; k <= C.lambda_levels; ++k) {
        const double lam = out.mu * std::pow(out.max_M / out.mu, double(k) / double(C.lambda_levels + 1));
        out.levels.push_back(cover_level_set(fam, MF, in, Mf2, lam, C.a, cfg));
    }
    return out;
}

inline ojson covering_json(const CoveringResult& r, std::size_t k) {
    ojson j;
    j["level"] = k;
    j["lambda"] = r.lambda;
    j["level_set_nodes"] = r.level_set_nodes;
    j["level_set_measure"] = r.level_set_measure;
    j["cylinders"] = r.cylinders.size();
    j["selected"] = r.selected.size();
    j["selected_measure"] = r.selected_measure;
    j["covering_constant"] = r.covering_constant;
    j["cores_disjoint"] = r.cores_disjoint;
    j["uncovered_nodes"] = r.uncovered_nodes;
    j["mean_bound_violations"] = r.mean_bound_violations;
    j["ancestor_violations"] = r.ancestor_violations;
    j["case3_violations"] = r.case3_violations;
    j["nesting_violations"] = r.nesting_violations;
    j["guard_violations"] = r.guard_violations;
    j["cases"] = {r.case_count[0], r.case_count[1], r.case_count[2]};
    j["max_size_ratio"] = r.max_size_ratio;
    j["max_lambda_low"] = r.max_lambda_low;
    j["max_rh_constant"] = r.max_rh_constant;
    j["status"] = exact_properties_hold(r) ? "pass" : "fail";
    return j;
}

inline int cmd_cover(const RunManifest& M, const CommandContext& ctx) {
    const auto run = run_cover(M);
    auto os = detail::open_out(ctx, "covering.jsonl");
    auto h = detail::run_header(M, "cover");
    h["lambda_o"] = run.lambda_o;
    h["ambient_ratio"] = run.ambient_ratio;
    h["members"] = run.members;
    h["c_1"] = run.c_1;
    h["engulf_pairs"] = run.engulf_pairs;
    h["mu"] = run.mu;
    h["mu_constant"] = run.mu_constant;
    h["max_maximal_function"] = run.max_M;
    os << ojson{{"run", h}}.dump() << '\n';
    int rc = run.levels.size() == M.cover.lambda_levels ? 0 : 1;
    if (rc) *ctx.log << "FAIL maximal function never exceeds mu; no lambda levels\n";
    for (std::size_t k = 0; k < run.levels.size(); ++k) {
        const auto& r = run.levels[k];
        os << covering_json(r, k + 1).dump() << '\n';
        if (!exact_properties_hold(r)) {
            *ctx.log << "FAIL covering level " << k + 1 << " lambda=" << r.lambda << " uncovered=" << r.uncovered_nodes
                     << " guard=" << r.guard_violations << " mean_bound=" << r.mean_bound_violations << " case3=" << r.case3_violations
                     << '\n';
            rc = 1;
        }
    }
    return rc;
}

}  // namespace fdelab
