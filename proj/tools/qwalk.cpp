// Command-line front end: walk, optimize, batch, spread, tomo.
//
// Exit codes: 0 success, 1 numeric/runtime failure, 2 usage error.

#include "qwalk/basin_hopping.hpp"
#include "qwalk/entanglement.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/experiment.hpp"
#include "qwalk/io.hpp"
#include "qwalk/tomography.hpp"
#include "qwalk/walk.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

namespace fs = std::filesystem;
using namespace qwalk;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Globals {
    std::uint64_t seed = 0;
    fs::path out = "qwalk-out";
    std::string format = "csv";

    TableFormat table_format() const { return format == "json" ? TableFormat::Json : TableFormat::Csv; }
    json to_json() const { return {{"seed", seed}, {"out", out.string()}, {"format", format}}; }
};

struct InitialFlags {
    double theta = 0.0;
    double phi = 0.0;

    void add(CLI::App* app) {
        app->add_option("--theta", theta, "Initial Bloch polar angle (radians)")->capture_default_str();
        app->add_option("--phi", phi, "Initial Bloch azimuth (radians)")->capture_default_str();
    }
    BlochAngles angles() const { return {theta, phi}; }
};

struct OptimizerFlags {
    OptimizerConfig cfg;
    std::string bounds = "periodic-wrap";

    void add(CLI::App* app) {
        app->add_option("--hops", cfg.n_hops, "Basin-hopping cycles")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--step-size", cfg.step_size, "Perturbation half-width (radians)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--temperature", cfg.temperature, "Metropolis temperature")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        app->add_option("--local-iters", cfg.local_max_iters, "Local minimizer iteration cap")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--local-tol", cfg.local_tolerance, "Local minimizer cost-change tolerance")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--bounds", bounds, "Angle handling after perturbation")
            ->check(CLI::IsMember({"periodic-wrap", "unconstrained"}))
            ->capture_default_str();
    }

    OptimizerConfig resolve(std::uint64_t seed) const {
        OptimizerConfig c = cfg;
        c.rng_seed = seed;
        c.bounds_mode = bounds == "unconstrained" ? BoundsMode::Unconstrained : BoundsMode::PeriodicWrap;
        return c;
    }
};

void write_manifest(const Globals& g, const std::string& command, json config) {
    config["global"] = g.to_json();
    write_json_file(g.out / "manifest.json", make_manifest(command, config));
}

void write_state_file(const fs::path& path, const WalkState& s) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    write_state_csv(os, s);
}

void write_walk_outputs(const Globals& g, const WalkRecord& rec) {
    fs::create_directories(g.out);
    write_table(g.out, "step-density", trajectory_table(rec.trajectory), g.table_format());
    write_table(g.out, "schmidt", schmidt_table(rec.schmidt_per_step), g.table_format());
    write_json_file(g.out / "schedule.json", to_json(rec.schedule));
    write_state_file(g.out / "state.csv", rec.final_state());
}

json optimized_summary(const OptimizedWalk& run) {
    return {{"n_steps", run.setup.n_steps},
            {"beta", run.setup.beta},
            {"initial", to_json(run.setup.initial)},
            {"schmidt", to_json(run.final_report)},
            {"participation_ratio", run.final_participation},
            {"opt_result", to_json(run.result)}};
}

// --- walk -------------------------------------------------------------------

struct WalkCommand {
    int steps = 0;
    std::vector<std::string> coin{"hadamard"};
    InitialFlags initial;

    void add(CLI::App& app) {
        auto* sub = app.add_subcommand("walk", "Run a walk with a fixed coin schedule");
        sub->add_option("--steps", steps, "Number of steps N")->check(CLI::PositiveNumber);
        sub->add_option("--coin", coin, "hadamard | random | file PATH")->expected(1, 2)->capture_default_str();
        initial.add(sub);
    }

    int run(const Globals& g) const {
        CoinSchedule sched;
        const std::string& kind = coin.at(0);
        if (kind == "hadamard" || kind == "random") {
            if (coin.size() != 1) throw InvalidArgument("--coin " + kind + " takes no path");
            if (steps < 1) throw InvalidArgument("--steps is required for --coin " + kind);
            sched = kind == "hadamard" ? hadamard_schedule(steps) : random_schedule(steps, g.seed);
        } else if (kind == "file") {
            if (coin.size() != 2) throw InvalidArgument("--coin file needs a PATH");
            sched = schedule_from_json(read_json_file(coin[1]));
            if (sched.size() == 0) throw InvalidArgument("schedule file is empty");
            if (steps != 0 && static_cast<std::size_t>(steps) != sched.size()) {
                throw InvalidArgument("--steps does not match the schedule file length");
            }
        } else {
            throw InvalidArgument("unknown coin '" + kind + "'");
        }
        const WalkRecord rec = record_walk(kind, initial.angles(), sched);
        write_walk_outputs(g, rec);
        write_manifest(g, "walk",
                       {{"steps", sched.size()}, {"coin", coin}, {"initial", to_json(initial.angles())},
                        {"schedule", to_json(sched)}});
        std::printf("final S = %.10f\n", rec.schmidt_per_step.back());
        return 0;
    }
};

// --- optimize ---------------------------------------------------------------

struct OptimizeCommand {
    int steps = 10;
    double beta = 0.0;
    InitialFlags initial;
    OptimizerFlags opt;

    void add(CLI::App& app) {
        auto* sub = app.add_subcommand("optimize", "Basin-hopping search for a maximally entangling schedule");
        sub->add_option("--steps", steps, "Number of steps N")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--beta", beta, "Weight of the participation ratio")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        initial.add(sub);
        opt.add(sub);
    }

    int run(const Globals& g) const {
        const OptimizerConfig cfg = opt.resolve(g.seed);
        const CostSetup setup{initial.angles(), steps, beta};
        const OptimizedWalk result = optimize_walk(setup, cfg);
        write_walk_outputs(g, result.walk);
        write_json_file(g.out / "opt_result.json", optimized_summary(result));
        write_table(g.out, "hop_trace", hop_trace_table(result.result), g.table_format());
        write_manifest(g, "optimize",
                       {{"steps", steps}, {"beta", beta}, {"initial", to_json(initial.angles())},
                        {"optimizer", to_json(cfg)}});
        std::printf("best S = %.10f  PR = %.6f  cost = %.12f\n", result.final_report.schmidt_norm,
                    result.final_participation, result.result.best_cost);
        return 0;
    }
};

// --- batch ------------------------------------------------------------------

struct BatchCommand {
    ExperimentConfig exp;
    OptimizerFlags opt;

    void add(CLI::App& app) {
        auto* sub = app.add_subcommand("batch", "Optimize from many random initial states");
        sub->add_option("--samples", exp.n_samples, "Number of initial states")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--steps", exp.n_steps, "Number of steps N")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--threshold", exp.selection_threshold, "Outer-site population threshold")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        sub->add_option("--beta", exp.beta, "Weight of the participation ratio")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        sub->add_option("--threads", exp.n_threads, "Worker threads (0 = all cores)")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        sub->add_flag("--haar", exp.haar_uniform, "Area-uniform initial states on the Bloch sphere");
        opt.add(sub);
    }

    int run(const Globals& g) const {
        ExperimentConfig cfg = exp;
        cfg.rng_seed = g.seed;
        cfg.output_dir = g.out;
        const BatchResult r = run_batch(cfg, opt.resolve(g.seed));
        const BatchStats& st = r.stats;
        std::printf("runs %zu  failed %zu  selected %zu (%.4f)\n", st.n_total, st.n_failed, st.n_selected,
                    static_cast<double>(st.n_selected) / static_cast<double>(st.n_total));
        if (st.averages_defined) std::printf("mean final S (selected) = %.10f\n", st.mean_schmidt_per_step.back());
        return 0;
    }
};

// --- spread -----------------------------------------------------------------

struct SpreadCommand {
    int steps = 10;
    double beta = 0.1;
    InitialFlags initial;
    OptimizerFlags opt;

    void add(CLI::App& app) {
        auto* sub = app.add_subcommand("spread", "Optimize S + beta * PR for a delocalized entangled state");
        sub->add_option("--steps", steps, "Number of steps N")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--beta", beta, "Weight of the participation ratio (> 0)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        initial.add(sub);
        opt.add(sub);
    }

    int run(const Globals& g) const {
        const OptimizerConfig cfg = opt.resolve(g.seed);
        const SpreadResult r = run_spread(steps, beta, initial.angles(), cfg);
        write_walk_outputs(g, r.walk.walk);
        write_table(g.out, "final-density", site_population_table(r.walk.walk.final_state()), g.table_format());
        double min_even = 1.0;
        for (int j = -steps; j <= steps; j += 2) {
            min_even = std::min(min_even, r.final_site_population[static_cast<std::size_t>(j + steps)]);
        }
        json summary = optimized_summary(r.walk);
        summary["min_reachable_site_population"] = min_even;
        write_json_file(g.out / "spread_result.json", summary);
        write_table(g.out, "hop_trace", hop_trace_table(r.walk.result), g.table_format());
        write_manifest(g, "spread",
                       {{"steps", steps}, {"beta", beta}, {"initial", to_json(initial.angles())},
                        {"optimizer", to_json(cfg)}});
        std::printf("final S = %.10f  PR = %.6f  min reachable-site population = %.3e\n",
                    r.walk.final_report.schmidt_norm, r.walk.final_participation, min_even);
        return 0;
    }
};

// --- tomo -------------------------------------------------------------------

struct TomoCommand {
    std::string input;
    std::int64_t shots = 0;

    void add(CLI::App& app) {
        auto* sub = app.add_subcommand("tomo", "Simulate intensity measurements and reconstruct S");
        sub->add_option("--input", input, "State CSV (site, spin, re, im, density)")->required()->check(CLI::ExistingFile);
        sub->add_option("--shots", shots, "Shots per analyzer setting (0 = noiseless)")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
    }

    int run(const Globals& g) const {
        std::ifstream is(input);
        if (!is) throw InvalidArgument("cannot open " + input);
        const WalkState s = read_state_csv(is);
        const std::optional<std::int64_t> n_shots = shots == 0 ? std::nullopt : std::optional(shots);
        const MeasurementRecord mr = simulate_measurements(s, n_shots, g.seed);
        const Reconstruction rec = reconstruct(mr);
        const double direct = schmidt_report(s).schmidt_norm;

        fs::create_directories(g.out);
        write_table(g.out, "measurements", measurement_table(mr), g.table_format());
        write_json_file(g.out / "measurements.json", to_json(mr));
        write_json_file(g.out / "reconstruction.json",
                        {{"n_shots", n_shots ? json(*n_shots) : json(nullptr)},
                         {"reconstructed", to_json(rec.report)},
                         {"direct", to_json(schmidt_report(s))},
                         {"abs_error", std::abs(rec.report.schmidt_norm - direct)}});
        write_manifest(g, "tomo", {{"input", input}, {"shots", shots}});
        std::printf("S_rec = %.12f  S_direct = %.12f  |diff| = %.3e\n", rec.report.schmidt_norm, direct,
                    std::abs(rec.report.schmidt_norm - direct));
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coined quantum walks with optimized SU(2) coins for position-spin entanglement"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--format", g.format, "Tabular output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.fallthrough();

    WalkCommand walk;
    OptimizeCommand optimize;
    BatchCommand batch;
    SpreadCommand spread;
    TomoCommand tomo;
    walk.add(app);
    optimize.add(app);
    batch.add(app);
    spread.add(app);
    tomo.add(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand("walk")) return walk.run(g);
        if (app.got_subcommand("optimize")) return optimize.run(g);
        if (app.got_subcommand("batch")) return batch.run(g);
        if (app.got_subcommand("spread")) return spread.run(g);
        if (app.got_subcommand("tomo")) return tomo.run(g);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
