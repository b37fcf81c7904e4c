#pragma once

#include <CLI11.hpp>

#include <cstdlib>

#include "commands.hpp"

namespace fdelab {

/// Exit codes: 0 all checks pass, 1 some check failed, 2 bad usage or manifest, 3 runtime error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Numerical lab for the fast diffusion equation: solver, intrinsic geometry, coverings, estimates."};
    app.fallthrough();
    std::string manifest, out_dir, suites;
    std::uint64_t seed = 0;
    std::size_t levels = 0, threads = 0;
    app.add_option("--manifest", manifest, "run manifest (YAML)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default: manifest out_dir, then $FDELAB_OUT_DIR, then ./fdelab_out)");
    auto* seed_opt = app.add_option("--seed", seed, "random seed, overrides the manifest");
    auto* suite_opt = app.add_option("--suite", suites, "comma-separated suites for verify/refine; empty selects none");
    app.add_option("--levels", levels, "use the K finest refinement levels of the manifest")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "worker threads, overrides the manifest")->check(CLI::PositiveNumber);
    const char* names[] = {"solve", "profile", "cover", "verify", "refine"};
    const char* help[] = {"solver convergence study and snapshots", "scaling profiles and their property checks",
                          "stopping-time coverings over a lambda sweep", "estimate suites on one grid",
                          "estimate suites on 2-4 grids with a stability table"};
    for (int i = 0; i < 5; ++i) app.add_subcommand(names[i], help[i]);
    app.require_subcommand(0, 1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }
    RunManifest M;
    try {
        M = load_manifest(manifest);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    std::string command = M.command;
    if (!app.get_subcommands().empty()) command = app.get_subcommands().front()->get_name();
    if (command.empty()) {
        err << "error: no command given and the manifest names none\n";
        return 2;
    }
    if (*seed_opt) M.seed = seed;
    if (threads) M.threads = threads;
    if (*suite_opt) {
        M.verify.suites.clear();
        std::stringstream ss(suites);
        for (std::string s; std::getline(ss, s, ',');) {
            if (s.empty()) continue;
            if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end()) {
                err << "error: unknown suite '" << s << "'\n";
                return 2;
            }
            M.verify.suites.push_back(s);
        }
    }
    CommandContext ctx;
    ctx.log = &err;
    if (!out_dir.empty())
        ctx.out = out_dir;
    else if (!M.out_dir.empty())
        ctx.out = M.out_dir;
    else if (const char* env = std::getenv("FDELAB_OUT_DIR"); env && *env)
        ctx.out = env;
    else
        ctx.out = "fdelab_out";
    set_default_threads(M.threads);
    try {
        int rc = 0;
        if (command == "solve") rc = cmd_solve(M, ctx, levels);
        else if (command == "profile") rc = cmd_profile(M, ctx);
        else if (command == "cover") rc = cmd_cover(M, ctx);
        else if (command == "verify") rc = cmd_verify(M, ctx);
        else rc = cmd_refine(M, ctx, levels);
        out << command << ": " << (rc == 0 ? "PASS" : "FAIL") << " (reports in " << ctx.out.string() << ")\n";
        return rc;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::ConfigError ? 2 : 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace fdelab
