#include "oracles/grid_search.hpp"
#include "support.hpp"

#include "qwalk/basin_hopping.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/experiment.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace qwalk;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

double bowl(std::span<const double> w) {
    double s = 0.0;
    for (double x : w) s += (x - 1.0) * (x - 1.0);
    return s;
}

double double_well(double x) { return (x * x - 1.0) * (x * x - 1.0) + 0.3 * x; }

OptimizerConfig unconstrained() {
    OptimizerConfig cfg;
    cfg.bounds_mode = BoundsMode::Unconstrained;
    return cfg;
}

void check_trace_consistent(const OptResult& r, double temperature) {
    double current = r.initial_local_cost;
    double best = r.initial_local_cost;
    for (const auto& h : r.hop_trace) {
        if (temperature == 0.0) CHECK(h.accepted == (h.proposed_cost <= current));
        if (h.accepted) current = h.proposed_cost;
        best = std::min(best, h.proposed_cost);
        CHECK(h.best_so_far == best);
    }
}

}  // namespace

TEST_CASE("local minimization of a quadratic bowl") {
    const std::vector<double> w0(5, 0.0);
    const LocalResult r = local_minimize(bowl, w0, unconstrained());
    CHECK(r.cost <= 1e-10);
    for (double x : r.w) CHECK(std::abs(x - 1.0) < 1e-5);
}

TEST_CASE("local minimization of the one-step entanglement cost") {
    const EntanglementCost f({{0.0, 0.0}, 1, 0.0});
    const std::vector<double> w0{0.0, 0.0, 0.5};
    const LocalResult r = local_minimize(CostFunction(std::cref(f)), w0, OptimizerConfig{});
    CHECK(std::abs(r.cost + sqrt2) <= 1e-6);
    CHECK(std::abs(r.w[2] - pi / 4) < 1e-3);
    CHECK(r.cost <= f(w0));
}

TEST_CASE("local minimization from a stationary point") {
    const std::vector<double> w0(3, 1.0);
    const LocalResult r = local_minimize(bowl, w0, unconstrained());
    CHECK(r.w == w0);
    CHECK(r.iterations <= 1);

    const EntanglementCost f({{0.0, 0.0}, 1, 0.0});
    const std::vector<double> opt{0.0, 0.0, pi / 4};
    const LocalResult e = local_minimize(CostFunction(std::cref(f)), opt, OptimizerConfig{});
    CHECK(e.iterations <= 1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(e.w[i] - opt[i]) < 1e-8);
    CHECK(e.cost <= f(opt));
}

TEST_CASE("non-finite cost is reported with the offending point") {
    auto bad = [](std::span<const double> w) { return w[0] > 0.5 ? std::nan("") : -w[0]; };
    const std::vector<double> w0{0.0};
    try {
        local_minimize(bad, w0, unconstrained());
        FAIL("expected NumericFailure");
    } catch (const NumericFailure& e) {
        REQUIRE(e.point().size() == 1);
        CHECK(e.point()[0] > 0.5);
    }
    CHECK_THROWS_AS(basin_hop(bad, w0, unconstrained()), NumericFailure);
}

TEST_CASE("Metropolis rule") {
    CHECK(metropolis_accept(-1.0, 0.0, 0.99));
    CHECK(metropolis_accept(0.0, 0.0, 0.99));
    CHECK_FALSE(metropolis_accept(1e-12, 0.0, 0.0));
    CHECK(metropolis_accept(1.0, 1.0, std::exp(-1.0) - 1e-9));
    CHECK_FALSE(metropolis_accept(1.0, 1.0, std::exp(-1.0) + 1e-9));
    CHECK(metropolis_accept(1.0, 1e9, 0.999999));
}

TEST_CASE("basin hopping escapes the shallow well of a double well") {
    const auto grid = oracle::grid_minimum(double_well, -3.0, 3.0, 1e-4);
    REQUIRE(grid.x < 0.0);

    auto f = [](std::span<const double> w) { return double_well(w[0]); };
    OptimizerConfig cfg = unconstrained();
    cfg.n_hops = 50;
    cfg.step_size = 1.5;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        cfg.rng_seed = seed;
        const std::vector<double> w0{1.0};
        const OptResult r = basin_hop(f, w0, cfg);
        CHECK(r.initial_local_cost > grid.f + 0.1);  // the local search alone stays in the worse well
        CHECK(std::abs(r.best_w[0] - grid.x) <= 2e-4);
        CHECK(r.best_cost <= grid.f + 1e-8);
    }
}

TEST_CASE("basin hopping reaches the maximal Schmidt norm in ten steps") {
    const CostSetup setup{{0.0, 0.0}, 10, 0.0};
    const EntanglementCost f(setup);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        OptimizerConfig cfg;
        cfg.rng_seed = seed;
        const auto w0 = random_schedule(10, seed + 100).to_vector();
        const OptResult r = basin_hop(CostFunction(std::cref(f)), w0, cfg);
        CHECK(r.best_cost <= -1.414);
        CHECK(schmidt_norm_svd(f.final_state(r.best_w)) >= 1.414);
        CHECK(stationarity_certificate(r.best_w, setup).satisfied);
        CHECK(std::abs(f(r.best_w) - r.best_cost) <= 1e-12);
        for (std::size_t i = 0; i < r.best_w.size(); ++i) {
            CHECK(r.best_w[i] >= 0.0);
            CHECK(r.best_w[i] <= (i % 3 == 2 ? pi / 2 : 2 * pi));
        }
    }
}

TEST_CASE("basin hopping invariants on the entanglement cost") {
    const CostSetup setup{{1.1, 2.3}, 4, 0.0};
    const EntanglementCost f(setup);
    OptimizerConfig cfg;
    cfg.n_hops = 20;
    cfg.rng_seed = 77;
    const auto w0 = random_schedule(4, 5).to_vector();

    const OptResult a = basin_hop(CostFunction(std::cref(f)), w0, cfg);
    const OptResult b = basin_hop(CostFunction(std::cref(f)), w0, cfg);
    CHECK(a.best_w == b.best_w);
    CHECK(a.best_cost == b.best_cost);
    CHECK(a.n_cost_evals == b.n_cost_evals);
    REQUIRE(a.hop_trace.size() == b.hop_trace.size());
    for (std::size_t i = 0; i < a.hop_trace.size(); ++i) {
        CHECK(a.hop_trace[i].proposed_cost == b.hop_trace[i].proposed_cost);
        CHECK(a.hop_trace[i].accepted == b.hop_trace[i].accepted);
    }

    CHECK(a.hop_trace.size() == 20);
    for (std::size_t i = 1; i < a.hop_trace.size(); ++i) {
        CHECK(a.hop_trace[i].best_so_far <= a.hop_trace[i - 1].best_so_far);
    }
    CHECK(std::abs(f(a.best_w) - a.best_cost) <= 1e-12);
    CHECK(a.best_cost <= a.hop_trace.back().best_so_far + 1e-12);
    check_trace_consistent(a, cfg.temperature);
}

TEST_CASE("temperature limits of the acceptance rule") {
    auto f = [](std::span<const double> w) { return double_well(w[0]) + 0.2 * std::sin(7 * w[0]); };
    OptimizerConfig cfg = unconstrained();
    cfg.n_hops = 60;
    cfg.step_size = 2.0;
    cfg.rng_seed = 5;

    cfg.temperature = 0.0;
    const std::vector<double> w0{1.0};
    const OptResult greedy = basin_hop(f, w0, cfg);
    check_trace_consistent(greedy, 0.0);
    bool any_rejected = false;
    for (const auto& h : greedy.hop_trace) any_rejected |= !h.accepted;
    CHECK(any_rejected);

    cfg.temperature = 1e9;
    const OptResult hot = basin_hop(f, w0, cfg);
    for (const auto& h : hot.hop_trace) CHECK(h.accepted);
}

TEST_CASE("basin hopping argument checks") {
    OptimizerConfig cfg = unconstrained();
    cfg.n_hops = 0;
    const std::vector<double> w0{0.0};
    CHECK_THROWS_AS(basin_hop(bowl, w0, cfg), InvalidArgument);

    OptimizerConfig wrap;
    CHECK_THROWS_AS(basin_hop(bowl, w0, wrap), InvalidArgument);  // periodic wrap needs 3N entries

    const std::vector<double> inf{std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(local_minimize(bowl, inf, unconstrained()), InvalidArgument);
}

TEST_CASE("optimizer solutions pass the stationarity certificate") {
    for (int n : {2, 5, 8}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const CostSetup setup{{0.3 * static_cast<double>(seed), 1.0}, n, 0.0};
            const EntanglementCost f(setup);
            OptimizerConfig cfg;
            cfg.n_hops = 10;
            cfg.rng_seed = seed;
            const OptResult r = basin_hop(CostFunction(std::cref(f)), random_schedule(n, seed).to_vector(), cfg);
            const auto cert = stationarity_certificate(r.best_w, setup);
            CHECK(cert.satisfied);
        }
    }
}
