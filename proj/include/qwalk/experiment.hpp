#pragma once

#include "qwalk/basin_hopping.hpp"
#include "qwalk/entanglement.hpp"
#include "qwalk/walk.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwalk {

struct ExperimentConfig {
    int n_steps = 10;
    int n_samples = 200;
    double selection_threshold = 1e-4;
    double beta = 0.0;
    std::uint64_t rng_seed = 0;
    bool haar_uniform = false;  // area-uniform initial spins instead of uniform (theta, phi)
    int n_threads = 0;          // 0: one per hardware thread
    std::filesystem::path output_dir;  // empty: nothing persisted
};

/// SplitMix64 of (master, index): independent per-sample streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

CoinSchedule hadamard_schedule(int n_steps);

/// xi, zeta ~ U[0, 2pi), theta ~ U[0, pi/2).
CoinSchedule random_schedule(int n_steps, std::uint64_t seed);

/// theta ~ U[0, pi], phi ~ U[0, 2pi]. With haar_uniform, cos(theta) ~ U[-1, 1] instead.
BlochAngles sample_initial_state(std::mt19937_64& rng, bool haar_uniform = false);

/// A walk with its full trajectory and per-step Schmidt norm.
struct WalkRecord {
    std::string label;
    CoinSchedule schedule;
    std::vector<WalkState> trajectory;     // psi_0..psi_N
    std::vector<double> schmidt_per_step;  // S(psi_0)..S(psi_N)

    const WalkState& final_state() const { return trajectory.back(); }
};

WalkRecord record_walk(std::string label, BlochAngles initial, const CoinSchedule& schedule);

struct OptimizedWalk {
    CostSetup setup;
    OptResult result;
    WalkRecord walk;
    SchmidtReport final_report;
    double final_participation = 0.0;
};

/// Basin hopping on the composite cost from a random schedule drawn from opt_cfg.rng_seed.
OptimizedWalk optimize_walk(const CostSetup& setup, const OptimizerConfig& opt_cfg);

struct Comparison {
    WalkRecord hadamard;
    WalkRecord random;
    OptimizedWalk optimized;
};

Comparison run_comparison(int n_steps, BlochAngles initial, const OptimizerConfig& opt_cfg);

/// Population at site -N or at site +N (summed over spin) exceeds threshold.
bool passes_selection(const WalkState& s, int n_steps, double threshold);

struct RunRecord {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    BlochAngles initial;
    bool ok = false;
    std::string error;
    std::vector<double> best_w;
    double best_cost = 0.0;
    double final_schmidt = 0.0;
    double final_participation = 0.0;
    std::vector<double> schmidt_per_step;
    std::vector<double> final_density_l;  // indexed by site + N
    std::vector<double> final_density_r;
    bool selected = false;
    std::int64_t n_cost_evals = 0;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct BatchStats {
    int n_steps = 0;
    std::size_t n_total = 0;
    std::size_t n_selected = 0;
    std::size_t n_failed = 0;
    bool averages_defined = false;  // false when nothing was selected
    std::vector<double> mean_schmidt_per_step;  // N + 1 entries over selected runs
    std::vector<double> mean_final_density_l;   // indexed by site + N
    std::vector<double> mean_final_density_r;
    std::vector<double> per_run_final_schmidt;  // every successful run, by sample index
};

struct BatchResult {
    BatchStats stats;
    std::vector<RunRecord> runs;
};

/// Thrown when more than 1% of the batch fails; outputs are still written.
class BatchFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs one sample: its initial state and optimizer seed derive from (cfg.rng_seed, index).
RunRecord run_sample(const ExperimentConfig& cfg, const OptimizerConfig& opt_cfg, std::uint64_t index);

BatchStats aggregate(const std::vector<RunRecord>& runs, int n_steps);

BatchResult run_batch(const ExperimentConfig& cfg, const OptimizerConfig& opt_cfg);

struct SpreadResult {
    OptimizedWalk walk;
    std::vector<double> final_site_population;  // indexed by site + N, summed over spin
};

SpreadResult run_spread(int n_steps, double beta, BlochAngles initial, const OptimizerConfig& opt_cfg);

}  // namespace qwalk
