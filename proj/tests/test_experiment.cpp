#include "oracles/dense_walk.hpp"

#include "qwalk/errors.hpp"
#include "qwalk/experiment.hpp"
#include "qwalk/io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

using namespace qwalk;
using std::numbers::pi;
using std::numbers::sqrt2;
namespace fs = std::filesystem;

namespace {

OptimizerConfig quick_optimizer(int hops) {
    OptimizerConfig cfg;
    cfg.n_hops = hops;
    return cfg;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("qwalk_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("Hadamard schedule") {
    const CoinSchedule one = hadamard_schedule(1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == CoinParams{0.0, 0.0, pi / 4});
    const CoinSchedule ten = hadamard_schedule(10);
    CHECK(ten.size() == 10);
    CHECK(std::all_of(ten.steps().begin(), ten.steps().end(), [&](const CoinParams& c) { return c == one[0]; }));
    CHECK(ten.to_vector().size() == 30);
    CHECK_THROWS_AS(hadamard_schedule(0), InvalidArgument);
}

TEST_CASE("random schedule") {
    CHECK(random_schedule(10, 42) == random_schedule(10, 42));
    CHECK_FALSE(random_schedule(10, 42) == random_schedule(10, 43));

    const int n = 100000;
    const CoinSchedule big = random_schedule(n, 7);
    double mean = 0.0;
    for (const auto& c : big.steps()) {
        CHECK(c.xi >= 0.0);
        CHECK(c.xi <= 2 * pi);
        CHECK(c.zeta >= 0.0);
        CHECK(c.zeta <= 2 * pi);
        CHECK(c.theta >= 0.0);
        CHECK(c.theta <= pi / 2);
        mean += c.theta;
    }
    mean /= n;
    const double sigma = (pi / 2) / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - pi / 4) <= 3 * sigma);
}

TEST_CASE("initial-state sampling") {
    std::mt19937_64 a(5);
    std::mt19937_64 b(5);
    const BlochAngles x = sample_initial_state(a);
    const BlochAngles y = sample_initial_state(b);
    CHECK(x.theta == y.theta);
    CHECK(x.phi == y.phi);

    std::mt19937_64 rng(6);
    const int n = 100000;
    double mean = 0.0;
    for (int k = 0; k < n; ++k) {
        const BlochAngles s = sample_initial_state(rng);
        CHECK(s.theta >= 0.0);
        CHECK(s.theta <= pi);
        CHECK(s.phi >= 0.0);
        CHECK(s.phi <= 2 * pi);
        mean += s.theta;
    }
    mean /= n;
    const double sigma = pi / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - pi / 2) <= 3 * sigma);

    // Area-uniform variant: cos(theta) uniform on [-1, 1].
    double mean_cos = 0.0;
    for (int k = 0; k < n; ++k) mean_cos += std::cos(sample_initial_state(rng, true).theta);
    mean_cos /= n;
    CHECK(std::abs(mean_cos) <= 3 * (1.0 / std::sqrt(3.0)) / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("derived seeds differ per index") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(9, 3) == derive_seed(9, 3));
}

TEST_CASE("comparison of Hadamard, random and optimized walks at N = 10") {
    const Comparison c = run_comparison(10, {0.0, 0.0}, quick_optimizer(100));
    CHECK(c.optimized.final_report.schmidt_norm >= 1.414);

    std::vector<oracle::Angles> steps(10, {0.0, 0.0, pi / 4});
    const auto dense = oracle::evolve(oracle::initial(0.0, 0.0, 10), steps, 10);
    CHECK(std::abs(c.hadamard.schmidt_per_step.back() - oracle::schmidt_norm(dense, 10)) <= 1e-10);
    CHECK(c.hadamard.schmidt_per_step.back() < 1.414);

    bool decreases = false;
    for (std::size_t i = 1; i < c.hadamard.schmidt_per_step.size(); ++i) {
        decreases |= c.hadamard.schmidt_per_step[i] < c.hadamard.schmidt_per_step[i - 1];
    }
    CHECK(decreases);

    CHECK(c.hadamard.trajectory.size() == 11);
    CHECK(c.random.trajectory.size() == 11);
    CHECK(c.optimized.walk.trajectory.size() == 11);
    for (const auto* rec : {&c.hadamard, &c.random, &c.optimized.walk}) {
        for (double s : rec->schmidt_per_step) {
            CHECK(s >= 1.0 - 1e-12);
            CHECK(s <= sqrt2 + 1e-12);
        }
    }
}

TEST_CASE("comparison at N = 1 hits the analytic optimum") {
    const Comparison c = run_comparison(1, {0.0, 0.0}, quick_optimizer(5));
    CHECK(std::abs(c.optimized.final_report.schmidt_norm - sqrt2) <= 1e-6);
}

TEST_CASE("selection criterion reads either outer site") {
    WalkState s(3);
    s.set_amplitude(0, Spin::L, std::sqrt(1.0 - 2e-4));
    s.set_amplitude(-3, Spin::R, std::sqrt(2e-4));
    CHECK(passes_selection(s, 3, 1e-4));
    CHECK_FALSE(passes_selection(s, 3, 3e-4));
    WalkState t(3);
    t.set_amplitude(3, Spin::L, std::sqrt(0.6e-4));
    t.set_amplitude(3, Spin::R, std::sqrt(0.6e-4));
    t.set_amplitude(0, Spin::L, std::sqrt(1.0 - 1.2e-4));
    CHECK(passes_selection(t, 3, 1e-4));  // summed over spin
}

TEST_CASE("small batch: statistics, parity and reproducibility") {
    ExperimentConfig cfg;
    cfg.n_steps = 6;
    cfg.n_samples = 12;
    cfg.rng_seed = 99;
    cfg.n_threads = 1;
    cfg.output_dir = scratch_dir("batch");
    const OptimizerConfig opt = quick_optimizer(20);

    const BatchResult a = run_batch(cfg, opt);
    const BatchStats& st = a.stats;
    CHECK(st.n_total == 12);
    CHECK(st.n_failed == 0);
    CHECK(st.n_selected <= st.n_total);
    CHECK(st.per_run_final_schmidt.size() == 12);
    for (double s : st.per_run_final_schmidt) CHECK(s >= 1.41);

    if (st.averages_defined) {
        REQUIRE(st.mean_schmidt_per_step.size() == 7);
        for (double s : st.mean_schmidt_per_step) {
            CHECK(s >= 1.0 - 1e-12);
            CHECK(s <= sqrt2 + 1e-12);
        }
        double total = 0.0;
        for (std::size_t i = 0; i < st.mean_final_density_l.size(); ++i) {
            total += st.mean_final_density_l[i] + st.mean_final_density_r[i];
            const int site = static_cast<int>(i) - cfg.n_steps;
            if (site % 2 != 0) {
                CHECK(st.mean_final_density_l[i] == 0.0);
                CHECK(st.mean_final_density_r[i] == 0.0);
            }
        }
        CHECK(std::abs(total - 1.0) <= 1e-9);
    }

    // Worker count does not change anything.
    ExperimentConfig threaded = cfg;
    threaded.n_threads = 3;
    threaded.output_dir.clear();
    const BatchResult b = run_batch(threaded, opt);
    CHECK(a.runs == b.runs);
    CHECK(a.stats.mean_schmidt_per_step == b.stats.mean_schmidt_per_step);

    // Persisted records round-trip exactly.
    REQUIRE(fs::exists(cfg.output_dir / "runs.jsonl"));
    REQUIRE(fs::exists(cfg.output_dir / "batch_stats.json"));
    REQUIRE(fs::exists(cfg.output_dir / "manifest.json"));
    REQUIRE(fs::exists(cfg.output_dir / "mean_schmidt.csv"));
    REQUIRE(fs::exists(cfg.output_dir / "mean_density.csv"));
    std::ifstream is(cfg.output_dir / "runs.jsonl");
    CHECK(read_runs_jsonl(is) == a.runs);
    fs::remove_all(cfg.output_dir);
}

TEST_CASE("batch with an infinite threshold selects nothing") {
    ExperimentConfig cfg;
    cfg.n_steps = 3;
    cfg.n_samples = 4;
    cfg.selection_threshold = std::numeric_limits<double>::infinity();
    const BatchResult r = run_batch(cfg, quick_optimizer(3));
    CHECK(r.stats.n_selected == 0);
    CHECK_FALSE(r.stats.averages_defined);
    CHECK(r.stats.mean_schmidt_per_step.empty());
    CHECK(r.stats.per_run_final_schmidt.size() == 4);
}

TEST_CASE("failing runs are recorded, and too many fail the batch") {
    ExperimentConfig cfg;
    cfg.n_steps = 2;
    cfg.n_samples = 3;
    cfg.beta = -1.0;  // rejected inside every run
    cfg.output_dir = scratch_dir("failing");
    CHECK_THROWS_AS(run_batch(cfg, quick_optimizer(2)), BatchFailure);
    std::ifstream is(cfg.output_dir / "runs.jsonl");
    const auto runs = read_runs_jsonl(is);
    REQUIRE(runs.size() == 3);
    for (const auto& r : runs) {
        CHECK_FALSE(r.ok);
        CHECK_FALSE(r.error.empty());
    }
    fs::remove_all(cfg.output_dir);

    std::vector<RunRecord> mixed(200);
    for (std::size_t i = 0; i < mixed.size(); ++i) {
        mixed[i].ok = i != 7;
        mixed[i].final_schmidt = 1.4;
        mixed[i].schmidt_per_step.assign(2, 1.0);
        mixed[i].final_density_l.assign(3, 0.0);
        mixed[i].final_density_r.assign(3, 0.0);
    }
    const BatchStats st = aggregate(mixed, 1);
    CHECK(st.n_failed == 1);
    CHECK(st.per_run_final_schmidt.size() == 199);
}

TEST_CASE("spread run with the participation term") {
    const SpreadResult r = run_spread(10, 0.1, {0.0, 0.0}, quick_optimizer(100));
    CHECK(r.walk.final_report.schmidt_norm >= 1.40);
    REQUIRE(r.final_site_population.size() == 21);
    for (int j = -10; j <= 10; ++j) {
        const double p = r.final_site_population[static_cast<std::size_t>(j + 10)];
        if (j % 2 == 0) {
            CHECK(p >= 1e-4);
        } else {
            CHECK(p == 0.0);
        }
    }
    CHECK_THROWS_AS(run_spread(10, 0.0, {0.0, 0.0}, quick_optimizer(1)), InvalidArgument);
}

TEST_CASE("participation term raises the final participation ratio") {
    // Paired seeds, beta = 0.1 against beta = 0; the median difference must be positive.
    std::vector<double> diffs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        OptimizerConfig cfg = quick_optimizer(5);
        cfg.rng_seed = seed;
        const double with = optimize_walk({{0.0, 0.0}, 10, 0.1}, cfg).final_participation;
        const double without = optimize_walk({{0.0, 0.0}, 10, 0.0}, cfg).final_participation;
        diffs.push_back(with - without);
    }
    std::nth_element(diffs.begin(), diffs.begin() + 10, diffs.end());
    CHECK(diffs[10] > 0.0);
}
