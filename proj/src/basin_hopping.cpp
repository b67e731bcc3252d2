#include "qwalk/basin_hopping.hpp"

#include "qwalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace qwalk {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-20;

// Counts evaluations and rejects non-finite values.
class CountingCost {
public:
    explicit CountingCost(const CostFunction& f) : f_(f) {}

    double operator()(std::span<const double> w) {
        ++evals_;
        const double v = f_(w);
        if (!std::isfinite(v)) {
            throw NumericFailure("cost function returned a non-finite value",
                                 std::vector<double>(w.begin(), w.end()));
        }
        return v;
    }

    std::int64_t evals() const noexcept { return evals_; }

private:
    const CostFunction& f_;
    std::int64_t evals_ = 0;
};

void fd_gradient(CountingCost& f, std::vector<double>& x, double h, std::vector<double>& g) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Descent along -H g with Armijo backtracking, H a BFGS inverse-Hessian estimate.
// Plain steepest descent stalls in the flat, badly conditioned bowl around the
// maximal-entanglement manifold long before the gradient is small.
LocalResult descend(CountingCost& f, std::vector<double> x, const OptimizerConfig& cfg) {
    const std::int64_t evals_before = f.evals();
    const std::size_t n = x.size();
    double fx = f(x);
    std::vector<double> g(n);
    std::vector<double> g_new(n);
    std::vector<double> p(n);
    std::vector<double> trial(n);
    std::vector<double> s(n);
    std::vector<double> y(n);
    std::vector<double> hy(n);
    std::vector<double> inv_h(n * n, 0.0);
    auto reset = [&] {
        std::fill(inv_h.begin(), inv_h.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) inv_h[i * n + i] = 1.0;
    };
    reset();
    fd_gradient(f, x, cfg.fd_step, g);

    int it = 0;
    for (; it < cfg.local_max_iters; ++it) {
        if (dot(g, g) == 0.0) break;
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < n; ++k) v += inv_h[i * n + k] * g[k];
            p[i] = -v;
        }
        double slope = dot(g, p);
        if (!(slope < 0.0)) {
            reset();
            for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];
            slope = -dot(g, g);
        }

        double t = 1.0;
        double ft = fx;
        bool found = false;
        while (t >= kMinStep) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + t * p[i];
            ft = f(trial);
            if (ft <= fx + kArmijo * t * slope) {
                found = true;
                break;
            }
            t *= 0.5;
        }
        if (!found) break;  // no descent at this resolution: stationary

        const double decrease = fx - ft;
        fd_gradient(f, trial, cfg.fd_step, g_new);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = trial[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        x.swap(trial);
        g.swap(g_new);
        fx = ft;
        if (decrease < cfg.local_tolerance) {
            ++it;
            break;
        }

        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
            for (std::size_t i = 0; i < n; ++i) {
                double v = 0.0;
                for (std::size_t k = 0; k < n; ++k) v += inv_h[i * n + k] * y[k];
                hy[i] = v;
            }
            const double yhy = dot(y, hy);
            const double rho = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < n; ++k) {
                    inv_h[i * n + k] += rho * ((1.0 + rho * yhy) * s[i] * s[k] - hy[i] * s[k] - s[i] * hy[k]);
                }
            }
        }
    }
    return {std::move(x), fx, it, f.evals() - evals_before};
}

}  // namespace

void OptimizerConfig::validate() const {
    if (n_hops < 1) throw InvalidArgument("optimizer: n_hops must be >= 1");
    if (!(step_size > 0.0)) throw InvalidArgument("optimizer: step_size must be > 0");
    if (!(temperature >= 0.0)) throw InvalidArgument("optimizer: temperature must be >= 0");
    if (local_max_iters < 1) throw InvalidArgument("optimizer: local_max_iters must be >= 1");
    if (!(local_tolerance > 0.0)) throw InvalidArgument("optimizer: local_tolerance must be > 0");
    if (!(fd_step > 0.0)) throw InvalidArgument("optimizer: fd_step must be > 0");
}

void wrap_coin_vector(std::span<double> w) {
    if (w.size() % 3 != 0) {
        throw InvalidArgument("periodic wrap needs a coin vector of length 3N, got " + std::to_string(w.size()));
    }
    for (std::size_t i = 0; i < w.size(); i += 3) {
        const CoinParams c = CoinParams{w[i], w[i + 1], w[i + 2]}.canonical();
        w[i] = c.xi;
        w[i + 1] = c.zeta;
        w[i + 2] = c.theta;
    }
}

LocalResult local_minimize(const CostFunction& f, std::span<const double> w0, const OptimizerConfig& cfg) {
    if (!(cfg.local_max_iters >= 1 && cfg.local_tolerance > 0.0 && cfg.fd_step > 0.0)) {
        throw InvalidArgument("local_minimize: invalid configuration");
    }
    for (double v : w0) {
        if (!std::isfinite(v)) throw InvalidArgument("local_minimize: w0 has non-finite entries");
    }
    CountingCost counted(f);
    return descend(counted, std::vector<double>(w0.begin(), w0.end()), cfg);
}

bool metropolis_accept(double delta, double temperature, double uniform) {
    if (delta <= 0.0) return true;
    if (temperature <= 0.0) return false;
    return uniform < std::exp(-delta / temperature);
}

OptResult basin_hop(const CostFunction& f, std::span<const double> w0, const OptimizerConfig& cfg) {
    cfg.validate();
    for (double v : w0) {
        if (!std::isfinite(v)) throw InvalidArgument("basin_hop: w0 has non-finite entries");
    }
    const bool wrap = cfg.bounds_mode == BoundsMode::PeriodicWrap;
    std::vector<double> start(w0.begin(), w0.end());
    if (wrap) wrap_coin_vector(start);

    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> perturb(-cfg.step_size, cfg.step_size);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    CountingCost counted(f);
    LocalResult current = descend(counted, std::move(start), cfg);
    LocalResult best = current;

    OptResult out;
    out.initial_local_cost = current.cost;
    out.hop_trace.reserve(static_cast<std::size_t>(cfg.n_hops));

    std::vector<double> trial(current.w.size());
    for (int hop = 0; hop < cfg.n_hops; ++hop) {
        for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = current.w[i] + perturb(rng);
        if (wrap) wrap_coin_vector(trial);

        LocalResult proposal = descend(counted, trial, cfg);
        const double delta = proposal.cost - current.cost;
        const double u = delta > 0.0 ? unit(rng) : 0.0;
        const bool accepted = metropolis_accept(delta, cfg.temperature, u);

        if (proposal.cost < best.cost) best = proposal;
        out.hop_trace.push_back({proposal.cost, accepted, best.cost});
        if (accepted) current = std::move(proposal);
    }

    out.best_w = std::move(best.w);
    out.best_cost = best.cost;
    if (wrap) {
        // Canonical angles give the same coins; re-evaluate so best_cost matches best_w exactly.
        wrap_coin_vector(out.best_w);
        out.best_cost = counted(out.best_w);
    }
    out.n_cost_evals = counted.evals();
    return out;
}

}  // namespace qwalk
