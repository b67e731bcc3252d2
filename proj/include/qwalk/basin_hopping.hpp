#pragma once

#include "qwalk/entanglement.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qwalk {

enum class BoundsMode {
    /// After each perturbation fold every (xi, zeta, theta) triple into its
    /// canonical range; the coin matrix is unchanged. Needs a 3N vector.
    PeriodicWrap,
    Unconstrained,
};

struct OptimizerConfig {
    int n_hops = 100;
    double step_size = 0.5;   // perturbation half-width
    double temperature = 1.0; // Metropolis temperature; 0 = greedy
    int local_max_iters = 200;
    double local_tolerance = 1e-8;  // stop when a step lowers the cost by less
    double fd_step = 1e-6;
    std::uint64_t rng_seed = 0;
    BoundsMode bounds_mode = BoundsMode::PeriodicWrap;

    void validate() const;
};

struct LocalResult {
    std::vector<double> w;
    double cost = 0.0;
    int iterations = 0;
    std::int64_t n_cost_evals = 0;
};

struct HopRecord {
    double proposed_cost = 0.0;
    bool accepted = false;
    double best_so_far = 0.0;
};

struct OptResult {
    std::vector<double> best_w;
    double best_cost = 0.0;
    double initial_local_cost = 0.0;  // after the first local minimization of w0
    std::vector<HopRecord> hop_trace;
    std::int64_t n_cost_evals = 0;
};

/// Quasi-Newton (BFGS) descent on the central-difference gradient with Armijo backtracking
/// (step halving, sufficient-decrease constant 1e-4). Throws NumericFailure on a
/// non-finite cost.
LocalResult local_minimize(const CostFunction& f, std::span<const double> w0, const OptimizerConfig& cfg);

/// Metropolis acceptance of a move with cost change delta.
/// `uniform` is a draw from [0, 1); ignored when delta <= 0.
bool metropolis_accept(double delta, double temperature, double uniform);

/// Basin hopping: local minimization of w0, then n_hops rounds of
/// {uniform perturbation, local minimization, Metropolis accept/reject}.
/// Returns the best minimum seen. Deterministic in cfg.rng_seed.
OptResult basin_hop(const CostFunction& f, std::span<const double> w0, const OptimizerConfig& cfg);

/// In-place canonicalization of every coin triple of w.
void wrap_coin_vector(std::span<double> w);

}  // namespace qwalk
