#include "config_io.hpp"
#include "output.hpp"
#include "verify_suite.hpp"

#include "ccwb/errors.hpp"
#include "ccwb/estimator.hpp"
#include "ccwb/harness.hpp"
#include "ccwb/model.hpp"
#include "ccwb/rng.hpp"
#include "ccwb/supremum.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#ifndef CCWB_VERSION
#define CCWB_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace ccwb;
using namespace ccwb::cli;

namespace {

/// Flag values; zeros and empty strings mean "not given, fall back to the
/// config file or the model-dependent default".
struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::string data_path;
    std::string sign_mode;
    std::string level = "fast";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int runs = 0;
    int h_max = 0;
    int threads = 0;
    double tol = 0.0;
    bool tol_given = false;
};

RunManifest start_manifest(const char* command, const std::vector<std::string>& argv) {
    RunManifest m;
    m.command = command;
    m.argv = argv;
    m.version = CCWB_VERSION;
    m.started_utc = utc_now();
    return m;
}

int resolve_h_max(const Options& o, const LoadedConfig& lc) {
    if (o.h_max > 0) return o.h_max;
    if (lc.sup.h_max > 0) return lc.sup.h_max;
    return default_h_max(lc.model);
}

SignMode resolve_sign_mode(const Options& o, const LoadedConfig& lc) {
    if (!o.sign_mode.empty()) return parse_sign_mode(o.sign_mode);
    if (lc.sup.sign_mode) return *lc.sup.sign_mode;
    return default_sign_mode(lc.model);
}

int run_bound(const Options& o, const std::vector<std::string>& argv) {
    LoadedConfig lc = load_config_file(o.config_path);
    if (lc.model.tau <= 1) {
        throw ConfigError("bound: no valid offsets (|h| <= tau-1 = 0); increase tau");
    }
    int h_max = resolve_h_max(o, lc);
    SignMode mode = resolve_sign_mode(o, lc);
    double tol = o.tol_given ? o.tol : lc.sup.tol;
    int threads = o.threads > 0 ? o.threads : lc.experiment.threads;

    RunManifest m = start_manifest("bound", argv);
    m.config = config_snapshot(lc);

    TightestBoundResult res = tightest_bound(lc.model, h_max, mode, lc.quad, tol, threads);
    m.finished_utc = utc_now();

    nlohmann::json dropped = nlohmann::json::array();
    for (const auto& h : res.dropped_h) dropped.push_back(h.h);
    m.extra = {{"h_max", h_max},
               {"sign_mode", sign_mode_name(mode)},
               {"tol", tol},
               {"threads", threads},
               {"offsets_solved", res.per_h.size()},
               {"offsets_dropped", dropped},
               {"kkt_gap", res.sup.kkt_gap},
               {"newton_iterations", res.sup.iterations},
               {"active_members", res.sup.active_members}};

    fs::create_directories(o.out_dir);
    fs::path csv = fs::path(o.out_dir) / "bound.csv";
    write_bound_csv(csv, "bound.manifest.json", res, lc.model.K);
    write_manifest(fs::path(o.out_dir) / "bound.manifest.json", m);

    const int K = lc.model.K;
    std::printf("offsets: %zu solved, %zu dropped; kkt gap %.3g\n", res.per_h.size(),
                res.dropped_h.size(), res.sup.kkt_gap);
    for (int j = 0; j < K + 1; ++j) {
        std::printf("bound rmse lambda%d: %.6g\n", j + 1,
                    std::sqrt(std::max(0.0, res.sup.B_star(j, j))));
    }
    for (int k = 0; k < K; ++k) {
        std::printf("bound rmse t%d: %.6g samples\n", k + 1,
                    std::sqrt(std::max(0.0, res.sup.B_star(K + 1 + k, K + 1 + k))));
    }
    std::printf("wrote %s\n", csv.string().c_str());
    return 0;
}

int run_sweep(const Options& o, const std::vector<std::string>& argv) {
    LoadedConfig lc = load_config_file(o.config_path);
    int runs = o.runs > 0 ? o.runs : lc.experiment.runs;
    std::uint64_t seed = o.seed_given ? o.seed : lc.experiment.seed;
    int threads = o.threads > 0 ? o.threads : lc.experiment.threads;
    std::vector<double> grid =
        lc.experiment.snr_grid_db.empty() ? default_snr_grid() : lc.experiment.snr_grid_db;

    SweepOptions so;
    so.h_max = o.h_max > 0 ? o.h_max : lc.sup.h_max;
    if (!o.sign_mode.empty()) {
        so.sign_mode = parse_sign_mode(o.sign_mode);
    } else if (lc.sup.sign_mode) {
        so.sign_mode = lc.sup.sign_mode;
    }
    so.sup_tol = o.tol_given ? o.tol : lc.sup.tol;
    so.threads = threads;

    RunManifest m = start_manifest("sweep", argv);
    m.seed = seed;
    m.config = config_snapshot(lc);

    std::vector<SweepPoint> points = snr_sweep(lc.model, grid, runs, seed, lc.quad, so);
    m.finished_utc = utc_now();

    std::size_t ok = 0;
    for (const auto& p : points) ok += p.ok ? 1 : 0;
    m.extra = {{"runs", runs},
               {"threads", threads},
               {"grid_points", points.size()},
               {"points_ok", ok}};

    fs::create_directories(o.out_dir);
    fs::path csv = fs::path(o.out_dir) / "sweep.csv";
    write_sweep_csv(csv, "sweep.manifest.json", points, lc.model.K);
    write_sweep_svg(fs::path(o.out_dir) / "sweep.svg", points);
    write_manifest(fs::path(o.out_dir) / "sweep.manifest.json", m);

    std::printf("%zu of %zu grid points ok; wrote %s\n", ok, points.size(), csv.string().c_str());
    if (ok == 0) {
        std::fprintf(stderr, "error: sweep: every grid point failed; first status: %s\n",
                     points.empty() ? "(empty grid)" : points.front().status.c_str());
        return 1;
    }
    return 0;
}

int run_simulate(const Options& o, const std::vector<std::string>& argv) {
    LoadedConfig lc = load_config_file(o.config_path);
    std::uint64_t seed = o.seed_given ? o.seed : lc.experiment.seed;

    RunManifest m = start_manifest("simulate", argv);
    m.seed = seed;
    m.config = config_snapshot(lc);

    auto engine = make_engine(seed, 0, 0);
    ParameterDraw truth = sample_prior(lc.model, engine);
    Dataset data = sample_observations(truth, lc.model, engine, seed);
    m.finished_utc = utc_now();
    m.extra = {{"truth", {{"lambdas", truth.lambdas}, {"locations", truth.locations}}}};

    fs::create_directories(o.out_dir);
    fs::path csv = fs::path(o.out_dir) / "dataset.csv";
    write_dataset_csv(csv, "dataset.manifest.json", data);
    write_manifest(fs::path(o.out_dir) / "dataset.manifest.json", m);

    std::printf("wrote %s (T=%d, K=%d, seed=%llu)\n", csv.string().c_str(), lc.model.T,
                lc.model.K, static_cast<unsigned long long>(seed));
    return 0;
}

int run_estimate(const Options& o, const std::vector<std::string>& argv) {
    LoadedConfig lc = load_config_file(o.config_path);
    Dataset data = read_dataset_csv(o.data_path, lc.model.T);

    RunManifest m = start_manifest("estimate", argv);
    m.config = config_snapshot(lc);

    MapEstimate est = map_changepoints(lc.model, data);
    m.finished_utc = utc_now();
    m.extra = {{"data", o.data_path}, {"candidates_evaluated", est.candidates_evaluated}};

    fs::create_directories(o.out_dir);
    fs::path csv = fs::path(o.out_dir) / "estimate.csv";
    write_estimate_csv(csv, "estimate.manifest.json", est);
    write_manifest(fs::path(o.out_dir) / "estimate.manifest.json", m);

    std::printf("t_hat =");
    for (int t : est.locations) std::printf(" %d", t);
    std::printf("\nlambda_hat =");
    for (double l : est.lambdas) std::printf(" %.6g", l);
    std::printf("\nlog_posterior = %.6g\nwrote %s\n", est.log_posterior, csv.string().c_str());
    return 0;
}

int run_verify_cmd(const Options& o) {
    auto checks = ccwb::cli::run_verify(o.level);
    bool all = print_verify_table(checks, std::cout);
    if (!all) {
        std::fprintf(stderr, "error: verify: at least one check failed\n");
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed Cramer-Rao/Weiss-Weinstein lower bound toolkit for Poisson count series "
                 "with multiple changepoints"};
    app.set_version_flag("--version", CCWB_VERSION);
    app.require_subcommand(1);

    Options o;
    std::vector<std::string> argv_copy(argv, argv + argc);

    auto add_common = [&o](CLI::App* cmd, bool with_search) {
        cmd->add_option("--config", o.config_path, "JSON configuration file")->required();
        cmd->add_option("--out", o.out_dir, "output directory (default: current)");
        cmd->add_option("--threads", o.threads, "worker thread cap");
        if (with_search) {
            cmd->add_option("--h-max", o.h_max, "search radius for test point offsets");
            cmd->add_option("--sign-mode", o.sign_mode, "offset signs: positive or all")
                ->check(CLI::IsMember({"positive", "all"}));
            cmd->add_option("--tol", o.tol, "ellipsoid solver tolerance")
                ->each([&o](const std::string&) { o.tol_given = true; });
        }
    };

    CLI::App* bound = app.add_subcommand("bound", "compute the supremum lower bound");
    add_common(bound, true);

    CLI::App* sweep = app.add_subcommand("sweep", "bound and Monte Carlo GRMSE over an SNR grid");
    add_common(sweep, true);
    sweep->add_option("--runs", o.runs, "Monte Carlo runs per grid point");
    sweep->add_option("--seed", o.seed, "master seed")
        ->each([&o](const std::string&) { o.seed_given = true; });

    CLI::App* simulate = app.add_subcommand("simulate", "draw one dataset from the prior");
    add_common(simulate, false);
    simulate->add_option("--seed", o.seed, "master seed")
        ->each([&o](const std::string&) { o.seed_given = true; });

    CLI::App* estimate = app.add_subcommand("estimate", "joint MAP estimate for a dataset");
    add_common(estimate, false);
    estimate->add_option("--data", o.data_path, "dataset CSV to segment")->required();

    CLI::App* verify = app.add_subcommand("verify", "run the oracle self-check suites");
    verify->add_option("--level", o.level, "fast or full")
        ->check(CLI::IsMember({"fast", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (bound->parsed()) return run_bound(o, argv_copy);
        if (sweep->parsed()) return run_sweep(o, argv_copy);
        if (simulate->parsed()) return run_simulate(o, argv_copy);
        if (estimate->parsed()) return run_estimate(o, argv_copy);
        if (verify->parsed()) return run_verify_cmd(o);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
