#include "qwalk/experiment.hpp"

#include "qwalk/errors.hpp"
#include "qwalk/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace qwalk {

namespace {

void require_steps(int n_steps) {
    if (n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

CoinSchedule hadamard_schedule(int n_steps) {
    require_steps(n_steps);
    return CoinSchedule(std::vector<CoinParams>(static_cast<std::size_t>(n_steps),
                                                CoinParams{0.0, 0.0, std::numbers::pi / 4}));
}

CoinSchedule random_schedule(int n_steps, std::uint64_t seed) {
    require_steps(n_steps);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> mix(0.0, std::numbers::pi / 2);
    std::vector<CoinParams> steps;
    steps.reserve(static_cast<std::size_t>(n_steps));
    for (int i = 0; i < n_steps; ++i) {
        const double xi = phase(rng);
        const double zeta = phase(rng);
        const double theta = mix(rng);
        steps.push_back({xi, zeta, theta});
    }
    return CoinSchedule(std::move(steps));
}

BlochAngles sample_initial_state(std::mt19937_64& rng, bool haar_uniform) {
    std::uniform_real_distribution<double> polar(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> azimuth(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> cosine(-1.0, 1.0);
    BlochAngles b;
    b.theta = haar_uniform ? std::acos(cosine(rng)) : polar(rng);
    b.phi = azimuth(rng);
    return b;
}

WalkRecord record_walk(std::string label, BlochAngles initial, const CoinSchedule& schedule) {
    const int n = static_cast<int>(schedule.size());
    Evolution ev = evolve(make_initial_state(initial, n), schedule, true);
    WalkRecord rec{std::move(label), schedule, std::move(ev.trajectory), {}};
    rec.schmidt_per_step.reserve(rec.trajectory.size());
    for (const auto& s : rec.trajectory) rec.schmidt_per_step.push_back(schmidt_report(s).schmidt_norm);
    return rec;
}

OptimizedWalk optimize_walk(const CostSetup& setup, const OptimizerConfig& opt_cfg) {
    const EntanglementCost f(setup);
    const auto w0 = random_schedule(setup.n_steps, derive_seed(opt_cfg.rng_seed, 0x5eed)).to_vector();
    OptimizedWalk out;
    out.setup = setup;
    out.result = basin_hop(CostFunction(std::cref(f)), w0, opt_cfg);
    out.walk = record_walk("optimized", setup.initial, CoinSchedule::from_vector(out.result.best_w));
    out.final_report = schmidt_report(out.walk.final_state());
    out.final_participation = participation_ratio(out.walk.final_state());
    return out;
}

Comparison run_comparison(int n_steps, BlochAngles initial, const OptimizerConfig& opt_cfg) {
    require_steps(n_steps);
    Comparison c;
    c.hadamard = record_walk("hadamard", initial, hadamard_schedule(n_steps));
    c.random = record_walk("random", initial, random_schedule(n_steps, derive_seed(opt_cfg.rng_seed, 1)));
    c.optimized = optimize_walk({initial, n_steps, 0.0}, opt_cfg);
    return c;
}

bool passes_selection(const WalkState& s, int n_steps, double threshold) {
    return s.site_population(-n_steps) > threshold || s.site_population(n_steps) > threshold;
}

RunRecord run_sample(const ExperimentConfig& cfg, const OptimizerConfig& opt_cfg, std::uint64_t index) {
    RunRecord rec;
    rec.index = index;
    rec.seed = derive_seed(cfg.rng_seed, index);
    std::mt19937_64 rng(rec.seed);
    rec.initial = sample_initial_state(rng, cfg.haar_uniform);
    try {
        OptimizerConfig local = opt_cfg;
        local.rng_seed = rng();
        const OptimizedWalk run = optimize_walk({rec.initial, cfg.n_steps, cfg.beta}, local);
        const WalkState& psi = run.walk.final_state();
        rec.best_w = run.result.best_w;
        rec.best_cost = run.result.best_cost;
        rec.final_schmidt = run.final_report.schmidt_norm;
        rec.final_participation = run.final_participation;
        rec.schmidt_per_step = run.walk.schmidt_per_step;
        rec.n_cost_evals = run.result.n_cost_evals;
        for (int j = -cfg.n_steps; j <= cfg.n_steps; ++j) {
            rec.final_density_l.push_back(psi.density(j, Spin::L));
            rec.final_density_r.push_back(psi.density(j, Spin::R));
        }
        rec.selected = passes_selection(psi, cfg.n_steps, cfg.selection_threshold);
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

BatchStats aggregate(const std::vector<RunRecord>& runs, int n_steps) {
    BatchStats st;
    st.n_steps = n_steps;
    st.n_total = runs.size();
    const auto steps = static_cast<std::size_t>(n_steps) + 1;
    const auto sites = 2 * static_cast<std::size_t>(n_steps) + 1;
    std::vector<double> sum_s(steps, 0.0);
    std::vector<double> sum_l(sites, 0.0);
    std::vector<double> sum_r(sites, 0.0);
    // Sums in index order, so the result does not depend on worker scheduling.
    for (const auto& r : runs) {
        if (!r.ok) {
            ++st.n_failed;
            continue;
        }
        st.per_run_final_schmidt.push_back(r.final_schmidt);
        if (!r.selected) continue;
        ++st.n_selected;
        for (std::size_t i = 0; i < steps; ++i) sum_s[i] += r.schmidt_per_step[i];
        for (std::size_t i = 0; i < sites; ++i) {
            sum_l[i] += r.final_density_l[i];
            sum_r[i] += r.final_density_r[i];
        }
    }
    st.averages_defined = st.n_selected > 0;
    if (st.averages_defined) {
        const auto k = static_cast<double>(st.n_selected);
        for (auto& v : sum_s) v /= k;
        for (auto& v : sum_l) v /= k;
        for (auto& v : sum_r) v /= k;
        st.mean_schmidt_per_step = std::move(sum_s);
        st.mean_final_density_l = std::move(sum_l);
        st.mean_final_density_r = std::move(sum_r);
    }
    return st;
}

BatchResult run_batch(const ExperimentConfig& cfg, const OptimizerConfig& opt_cfg) {
    require_steps(cfg.n_steps);
    if (cfg.n_samples < 1) throw InvalidArgument("run_batch: n_samples must be >= 1");
    if (!(cfg.selection_threshold >= 0.0)) throw InvalidArgument("run_batch: selection_threshold must be >= 0");
    opt_cfg.validate();

    const auto n = static_cast<std::size_t>(cfg.n_samples);
    std::vector<RunRecord> runs(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) runs[i] = run_sample(cfg, opt_cfg, i);
    };
    unsigned threads = cfg.n_threads > 0 ? static_cast<unsigned>(cfg.n_threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    BatchResult result{aggregate(runs, cfg.n_steps), std::move(runs)};
    if (!cfg.output_dir.empty()) write_batch_outputs(cfg.output_dir, cfg, opt_cfg, result);
    if (100 * result.stats.n_failed > result.stats.n_total) {
        throw BatchFailure("batch: " + std::to_string(result.stats.n_failed) + " of " +
                           std::to_string(result.stats.n_total) + " runs failed");
    }
    return result;
}

SpreadResult run_spread(int n_steps, double beta, BlochAngles initial, const OptimizerConfig& opt_cfg) {
    require_steps(n_steps);
    if (!(beta > 0.0)) throw InvalidArgument("run_spread: beta must be > 0");
    SpreadResult out;
    out.walk = optimize_walk({initial, n_steps, beta}, opt_cfg);
    const WalkState& psi = out.walk.walk.final_state();
    for (int j = -n_steps; j <= n_steps; ++j) out.final_site_population.push_back(psi.site_population(j));
    return out;
}

}  // namespace qwalk
