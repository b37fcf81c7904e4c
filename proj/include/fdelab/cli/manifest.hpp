#pragma once

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../grid/params.hpp"

namespace fdelab {

inline constexpr const char* kManifestSchema = "fdelab-manifest/1";

enum class ProblemKind { Barenblatt, HeatKernel };
enum class SourceKind { Exact, Solver };

/// Exact solution sampled or solved on [-half_width, half_width]^n x [t_start, t_end].
struct ProblemSpec {
    ProblemKind kind = ProblemKind::Barenblatt;
    SourceKind source = SourceKind::Exact;
    double C = 1.0;
    double half_width = 4.5;
    double t_start = 0.25, t_end = 2.75;
    std::size_t nodes = 65;
    std::size_t time_nodes = 0;  ///< 0: same as nodes
};

struct GeometrySpec {
    double b_hat = 0.25, S = 0.8, R = 2.0, K = 4.0;
    int levels_per_octave = 4, octaves = 8;
};

struct EnergySuite {
    double rho = 0.5, theta = 0.4;
    std::vector<double> c_levels{0.0};
    double trunc_rho = 0.6, trunc_theta = 0.4, trunc_t = 1.8;
    std::size_t profile_levels = 10;  ///< top profile levels used for the sub-intrinsic sweep
};

struct BoundsSuite {
    std::vector<double> vertex_t{0.04, 0.08, 0.12, 0.16, 0.2, 0.24, 0.28, 0.32, 0.36, 0.4};
};

struct RegimeSuite {
    double epsilon = 0.1;
    std::array<double, 2> early{1.2, 1.6};  ///< (t0, r) of the steep cylinder at the origin
    std::array<double, 2> late{1.5, 0.5};   ///< (t0, r) of the flat one
};

struct GradSuite {
    double epsilon = 0.02;
    double vartheta = 0.75;
    std::vector<double> centers{0.0, 0.75, 1.5};
    std::vector<double> radii{0.5, 0.75, 1.0};
};

struct TimeSwitchSuite {
    std::array<double, 2> x{0.3, 0.0};
    double s = 0.2, r = 0.5;
    std::size_t pairs = 50;
};

struct ProbeSuite {
    std::vector<double> p{1.05, 1.1, 1.2};
    std::array<double, 2> x{0.3, 0.0};
    double S = 0.2, theta = 0.4, C = 2.0;
    double R = 0.45;  ///< parabolic form radius; 0 skips that form
};

struct AlgebraSuite {
    std::size_t samples = 200;
};

/// Centers and time shared by the cylinder sweeps.
struct VerifySpec {
    std::vector<std::string> suites{"algebra", "energy", "bounds", "regime", "grad", "time_switch", "probe"};  ///< empty runs nothing
    double t0 = 1.5;
    std::vector<double> centers{0.0, 0.7};  ///< x_1 coordinates; other coordinates are 0
    EnergySuite energy;
    BoundsSuite bounds;
    RegimeSuite regime;
    GradSuite grad;
    TimeSwitchSuite time_switch;
    ProbeSuite probe;
    AlgebraSuite algebra;
    std::vector<std::pair<std::string, double>> tolerances;  ///< report name -> largest admissible constant
    double stability = 0.25;                                 ///< refine: admissible relative change
    double probe_stability = 0.2;
};

struct CoverSpec {
    double R_factor = 4.0, time_width = 0.1;
    std::size_t nodes = 49, stride = 2;
    int levels_per_octave = 4, octaves = 12;
    double b_hat = 0.25, epsilon = 0.1, delta_tilde = 0.25, gamma_1 = 1.0;
    double a = 0.5, b = 1.0;
    std::size_t lambda_levels = 8;
};

/// Pass thresholds of the solver convergence study.
struct SolveSpec {
    double min_order = 0.9;
    double max_error = 0.02;
};

struct RunManifest {
    std::string source_name = "<manifest>";
    std::string command;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::size_t threads = 1;
    ModelParams model = ModelParams::make(2, 0.5);
    ProblemSpec problem;
    std::vector<std::size_t> levels{33, 65, 129};
    GeometrySpec geometry;
    VerifySpec verify;
    CoverSpec cover;
    SolveSpec solve;
    std::vector<std::array<double, 2>> profile_points{{0.0, 0.0}, {0.7, 0.0}};

    /// Time nodes for N space nodes; time_nodes scales with N when set, so dt stays proportional to h.
    std::size_t time_nodes_for(std::size_t N) const {
        if (!problem.time_nodes) return N;
        return (problem.time_nodes - 1) * (N - 1) / (problem.nodes - 1) + 1;
    }
    std::optional<double> tolerance_for(const std::string& name) const {
        for (const auto& [k, v] : verify.tolerances)
            if (k == name) return v;
        return std::nullopt;
    }
};

inline const std::vector<std::string>& known_suites() {
    static const std::vector<std::string> s{"algebra", "energy", "bounds", "regime", "grad", "time_switch", "probe"};
    return s;
}

namespace detail {

/// Map-node reader: typed lookups with file:line:column errors, and a check for unknown keys.
class YamlMap {
public:
    YamlMap(const YAML::Node& node, std::string file, std::string path) : node_(node), file_(std::move(file)), path_(std::move(path)) {
        if (!node_.IsMap()) error(node_, path_ + " must be a mapping");
    }

    [[noreturn]] void error(const YAML::Node& at, const std::string& msg) const {
        const auto mk = at.Mark();
        std::ostringstream os;
        os << file_;
        if (!mk.is_null()) os << ":" << mk.line + 1 << ":" << mk.column + 1;
        os << ": " << msg;
        fail(ErrorCode::ConfigError, os.str());
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return bool(at(key));
    }

    template <class T>
    void get(const std::string& key, T& out) {
        if (!has(key)) return;
        out = convert<T>(at(key), key);
    }

    template <class T>
    void get_list(const std::string& key, std::vector<T>& out) {
        if (!has(key)) return;
        const YAML::Node n = at(key);
        if (!n.IsSequence()) error(n, where(key) + " must be a list");
        out.clear();
        for (const auto& item : n) out.push_back(convert<T>(item, key));
    }

    void get_pair(const std::string& key, std::array<double, 2>& out) {
        if (!has(key)) return;
        const YAML::Node n = at(key);
        if (!n.IsSequence() || n.size() != 2) error(n, where(key) + " must be a list of two numbers");
        out = {convert<double>(n[0], key), convert<double>(n[1], key)};
    }

    std::optional<YamlMap> child(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return YamlMap(at(key), file_, where(key));
    }

    YAML::Node raw(const std::string& key) {
        seen_.insert(key);
        return at(key);
    }

    void finish() const {
        for (const auto& kv : node_) {
            const auto k = kv.first.as<std::string>();
            if (!seen_.count(k)) error(kv.first, "unknown key '" + where(k) + "'");
        }
    }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    const std::string& file() const { return file_; }

private:
    YAML::Node at(const std::string& key) const {
        const YAML::Node& c = node_;
        return c[key];
    }

    template <class T>
    T convert(const YAML::Node& n, const std::string& key) const {
        if (!n.IsScalar()) error(n, where(key) + " must be a scalar");
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            error(n, "cannot read '" + where(key) + "' from '" + n.Scalar() + "'");
        }
    }

    YAML::Node node_;
    std::string file_, path_;
    std::set<std::string> seen_;
};

template <class Check>
void check_value(YamlMap& m, const std::string& key, bool ok, Check&& msg) {
    if (!ok) m.error(m.raw(key), msg());
}

}  // namespace detail

/// Parses and validates a manifest. Every error names file:line:column.
inline RunManifest parse_manifest(const std::string& text, const std::string& file = "<manifest>") {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        fail(ErrorCode::ConfigError, file + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                                         ": " + e.msg);
    }
    RunManifest M;
    M.source_name = file;
    if (root.IsNull()) fail(ErrorCode::ConfigError, file + ": empty manifest");
    detail::YamlMap top(root, file, "");
    std::string schema;
    top.get("schema", schema);
    if (schema != kManifestSchema) {
        if (!top.has("schema")) fail(ErrorCode::ConfigError, file + ":1:1: missing 'schema: " + kManifestSchema + "'");
        top.error(top.raw("schema"), "unsupported schema '" + schema + "', expected " + kManifestSchema);
    }
    top.get("command", M.command);
    if (!M.command.empty() && M.command != "solve" && M.command != "profile" && M.command != "cover" && M.command != "verify" &&
        M.command != "refine")
        top.error(top.raw("command"), "unknown command '" + M.command + "'");
    top.get("seed", M.seed);
    top.get("output", M.out_dir);
    top.get("threads", M.threads);
    detail::check_value(top, "threads", M.threads >= 1, [] { return "threads must be at least 1"; });

    if (auto m = top.child("model")) {
        int n = M.model.n;
        double mm = M.model.m, nu = M.model.nu, L = M.model.L;
        m->get("n", n);
        m->get("m", mm);
        m->get("nu", nu);
        m->get("L", L);
        m->finish();
        try {
            M.model = mm == 1.0 ? ModelParams::heat_limit(n, nu, L) : ModelParams::make(n, mm, nu, L);
        } catch (const Error& e) { m->error(top.raw("model"), e.what()); }
    }
    if (auto p = top.child("problem")) {
        std::string kind = "barenblatt", source = "exact";
        p->get("kind", kind);
        p->get("source", source);
        if (kind == "barenblatt") M.problem.kind = ProblemKind::Barenblatt;
        else if (kind == "heat_kernel") M.problem.kind = ProblemKind::HeatKernel;
        else p->error(p->raw("kind"), "problem.kind must be barenblatt or heat_kernel");
        if (source == "exact") M.problem.source = SourceKind::Exact;
        else if (source == "solver") M.problem.source = SourceKind::Solver;
        else p->error(p->raw("source"), "problem.source must be exact or solver");
        p->get("C", M.problem.C);
        p->get("half_width", M.problem.half_width);
        p->get("t_start", M.problem.t_start);
        p->get("t_end", M.problem.t_end);
        p->get("nodes", M.problem.nodes);
        p->get("time_nodes", M.problem.time_nodes);
        detail::check_value(*p, "t_start", M.problem.t_start > 0.0 && M.problem.t_start < M.problem.t_end,
                            [] { return "need 0 < t_start < t_end"; });
        detail::check_value(*p, "nodes", M.problem.nodes >= 5, [] { return "need at least 5 nodes per axis"; });
        detail::check_value(*p, "half_width", M.problem.half_width > 0.0, [] { return "half_width must be positive"; });
        if (M.problem.kind == ProblemKind::HeatKernel && M.problem.source == SourceKind::Solver)
            p->error(p->raw("source"), "the heat kernel is only available as exact samples");
        p->finish();
    }
    if (M.problem.kind == ProblemKind::HeatKernel && !M.model.heat_limit_case())
        fail(ErrorCode::ConfigError, file + ": problem.kind heat_kernel needs model.m = 1");
    if (M.problem.kind == ProblemKind::Barenblatt && M.model.heat_limit_case())
        fail(ErrorCode::ConfigError, file + ": problem.kind barenblatt needs model.m < 1");
    if (top.has("levels")) {
        top.get_list("levels", M.levels);
        for (auto v : M.levels) detail::check_value(top, "levels", v >= 5, [] { return "every level needs at least 5 nodes"; });
        detail::check_value(top, "levels", std::is_sorted(M.levels.begin(), M.levels.end()),
                            [] { return "levels must be ascending"; });
    }
    if (auto g = top.child("geometry")) {
        g->get("b_hat", M.geometry.b_hat);
        g->get("S", M.geometry.S);
        g->get("R", M.geometry.R);
        g->get("K", M.geometry.K);
        g->get("levels_per_octave", M.geometry.levels_per_octave);
        g->get("octaves", M.geometry.octaves);
        g->finish();
    }
    if (top.has("profile_points")) {
        const YAML::Node n = top.raw("profile_points");
        if (!n.IsSequence()) top.error(n, "profile_points must be a list of [x1, x2] pairs");
        M.profile_points.clear();
        for (const auto& item : n) {
            if (!item.IsSequence() || item.size() != 2) top.error(item, "profile point must be [x1, x2]");
            try {
                M.profile_points.push_back({item[0].as<double>(), item[1].as<double>()});
            } catch (const YAML::Exception&) { top.error(item, "profile point must hold two numbers"); }
        }
    }
    if (auto v = top.child("verify")) {
        auto& V = M.verify;
        v->get_list("suites", V.suites);
        for (std::size_t i = 0; i < V.suites.size(); ++i)
            if (std::find(known_suites().begin(), known_suites().end(), V.suites[i]) == known_suites().end())
                v->error(v->raw("suites")[i], "unknown suite '" + V.suites[i] + "'");
        v->get("t0", V.t0);
        v->get_list("centers", V.centers);
        v->get("stability", V.stability);
        v->get("probe_stability", V.probe_stability);
        if (auto e = v->child("energy")) {
            e->get("rho", V.energy.rho);
            e->get("theta", V.energy.theta);
            e->get_list("c_levels", V.energy.c_levels);
            e->get("truncation_rho", V.energy.trunc_rho);
            e->get("truncation_theta", V.energy.trunc_theta);
            e->get("truncation_t", V.energy.trunc_t);
            e->get("profile_levels", V.energy.profile_levels);
            e->finish();
        }
        if (auto b = v->child("bounds")) {
            b->get_list("vertex_t", V.bounds.vertex_t);
            b->finish();
        }
        if (auto r = v->child("regime")) {
            r->get("epsilon", V.regime.epsilon);
            r->get_pair("early", V.regime.early);
            r->get_pair("late", V.regime.late);
            r->finish();
        }
        if (auto g = v->child("grad")) {
            g->get("epsilon", V.grad.epsilon);
            g->get("vartheta", V.grad.vartheta);
            g->get_list("centers", V.grad.centers);
            g->get_list("radii", V.grad.radii);
            detail::check_value(*g, "vartheta", V.grad.vartheta > 0.0 && V.grad.vartheta < 1.0,
                                [] { return "vartheta must lie in (0, 1)"; });
            g->finish();
        }
        if (auto t = v->child("time_switch")) {
            t->get_pair("x", V.time_switch.x);
            t->get("s", V.time_switch.s);
            t->get("r", V.time_switch.r);
            t->get("pairs", V.time_switch.pairs);
            t->finish();
        }
        if (auto p = v->child("probe")) {
            p->get_list("p", V.probe.p);
            p->get_pair("x", V.probe.x);
            p->get("S", V.probe.S);
            p->get("theta", V.probe.theta);
            p->get("C", V.probe.C);
            p->get("R", V.probe.R);
            for (double x : V.probe.p)
                detail::check_value(*p, "p", x > 1.0 && x <= 1.5, [] { return "probe exponents must lie in (1, 1.5]"; });
            p->finish();
        }
        if (auto a = v->child("algebra")) {
            a->get("samples", V.algebra.samples);
            a->finish();
        }
        if (v->has("tolerances")) {
            const YAML::Node n = v->raw("tolerances");
            if (!n.IsMap()) v->error(n, "verify.tolerances must map report names to numbers");
            for (const auto& kv : n) {
                try {
                    V.tolerances.emplace_back(kv.first.as<std::string>(), kv.second.as<double>());
                } catch (const YAML::Exception&) { v->error(kv.second, "tolerance must be a number"); }
                if (!(V.tolerances.back().second >= 0.0)) v->error(kv.second, "tolerance must be nonnegative");
            }
        }
        v->finish();
    }
    if (auto s = top.child("solve")) {
        s->get("min_order", M.solve.min_order);
        s->get("max_error", M.solve.max_error);
        s->finish();
    }
    if (auto c = top.child("cover")) {
        auto& C = M.cover;
        c->get("R_factor", C.R_factor);
        c->get("time_width", C.time_width);
        c->get("nodes", C.nodes);
        c->get("stride", C.stride);
        c->get("levels_per_octave", C.levels_per_octave);
        c->get("octaves", C.octaves);
        c->get("b_hat", C.b_hat);
        c->get("epsilon", C.epsilon);
        c->get("delta_tilde", C.delta_tilde);
        c->get("gamma_1", C.gamma_1);
        c->get("a", C.a);
        c->get("b", C.b);
        c->get("lambda_levels", C.lambda_levels);
        detail::check_value(*c, "a", 0.5 <= C.a && C.a < C.b && C.b <= 1.0, [] { return "need 1/2 <= a < b <= 1"; });
        c->finish();
    }
    top.finish();
    return M;
}

inline RunManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    require(bool(in), ErrorCode::ConfigError, "cannot open manifest " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path);
}

}  // namespace fdelab
