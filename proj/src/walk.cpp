#include "qwalk/walk.hpp"

#include "qwalk/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qwalk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_two_pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

void require_normalized(const WalkState& s, const char* op) {
    const double dev = std::abs(s.norm_squared() - 1.0);
    if (!(dev <= kNormTolerance)) {
        throw ContractViolation(std::string(op) + ": state is not normalized (|norm^2 - 1| = " +
                                std::to_string(dev) + ")");
    }
}

// Working buffers plus the index window [lo, hi] outside which all amplitudes are zero.
struct Kernel {
    std::vector<Complex>& left;
    std::vector<Complex>& right;
    std::size_t lo;
    std::size_t hi;

    void coin(const Coin& m) {
        for (std::size_t i = lo; i <= hi; ++i) {
            const Complex a = left[i];
            const Complex b = right[i];
            left[i] = m[0][0] * a + m[0][1] * b;
            right[i] = m[1][0] * a + m[1][1] * b;
        }
    }

    // L at m moves to m-1 as R; R at m moves to m+1 as L.
    void shift(std::vector<Complex>& new_left, std::vector<Complex>& new_right) {
        const std::size_t last = left.size() - 1;
        if ((lo == 0 && left[0] != Complex{}) || (hi == last && right[last] != Complex{})) {
            throw BoundaryOverflow("shift: amplitude would leave the lattice; enlarge half_width");
        }
        const std::size_t new_lo = lo == 0 ? 0 : lo - 1;
        const std::size_t new_hi = hi == last ? last : hi + 1;
        for (std::size_t i = new_lo; i <= new_hi; ++i) {
            new_right[i] = i + 1 <= last ? left[i + 1] : Complex{};
            new_left[i] = i >= 1 ? right[i - 1] : Complex{};
        }
        // Clear the stale window so buffers can be swapped.
        for (std::size_t i = lo; i <= hi; ++i) {
            left[i] = Complex{};
            right[i] = Complex{};
        }
        left.swap(new_left);
        right.swap(new_right);
        lo = new_lo;
        hi = new_hi;
    }
};

std::pair<std::size_t, std::size_t> support_window(std::span<const Complex> l, std::span<const Complex> r) {
    std::size_t lo = l.size();
    std::size_t hi = 0;
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (l[i] != Complex{} || r[i] != Complex{}) {
            lo = std::min(lo, i);
            hi = i;
        }
    }
    if (lo == l.size()) return {0, 0};
    return {lo, hi};
}

}  // namespace

CoinParams CoinParams::canonical() const {
    double x = xi;
    double z = zeta;
    double t = wrap_two_pi(theta);
    if (t >= std::numbers::pi) {
        // cos and sin both flip sign
        t -= std::numbers::pi;
        x += std::numbers::pi;
        z += std::numbers::pi;
    }
    if (t > std::numbers::pi / 2) {
        // cos flips sign, sin unchanged
        t = std::numbers::pi - t;
        x += std::numbers::pi;
    }
    return {wrap_two_pi(x), wrap_two_pi(z), t};
}

CoinSchedule::CoinSchedule(std::vector<CoinParams> steps) : steps_(std::move(steps)) {}

CoinSchedule CoinSchedule::from_vector(std::span<const double> w) {
    if (w.size() % 3 != 0) {
        throw InvalidArgument("parameter vector length " + std::to_string(w.size()) +
                              " is not a multiple of 3");
    }
    std::vector<CoinParams> steps;
    steps.reserve(w.size() / 3);
    for (std::size_t i = 0; i < w.size(); i += 3) steps.push_back({w[i], w[i + 1], w[i + 2]});
    return CoinSchedule(std::move(steps));
}

std::vector<double> CoinSchedule::to_vector() const {
    std::vector<double> w;
    w.reserve(3 * steps_.size());
    for (const auto& c : steps_) {
        w.push_back(c.xi);
        w.push_back(c.zeta);
        w.push_back(c.theta);
    }
    return w;
}

WalkState::WalkState(int half_width) : half_width_(half_width) {
    if (half_width < 0) throw InvalidArgument("half_width must be >= 0");
    const auto n = static_cast<std::size_t>(2 * half_width + 1);
    left_.assign(n, Complex{});
    right_.assign(n, Complex{});
}

std::size_t WalkState::offset(int site) const {
    if (!contains(site)) {
        throw InvalidArgument("site " + std::to_string(site) + " outside lattice of half_width " +
                              std::to_string(half_width_));
    }
    return static_cast<std::size_t>(site + half_width_);
}

Complex WalkState::amplitude(int site, Spin s) const {
    const auto i = offset(site);
    return s == Spin::L ? left_[i] : right_[i];
}

void WalkState::set_amplitude(int site, Spin s, Complex value) {
    const auto i = offset(site);
    (s == Spin::L ? left_[i] : right_[i]) = value;
}

double WalkState::norm_squared() const noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < left_.size(); ++i) sum += std::norm(left_[i]) + std::norm(right_[i]);
    return sum;
}

double WalkState::site_population(int site) const {
    const auto i = offset(site);
    return std::norm(left_[i]) + std::norm(right_[i]);
}

std::size_t WalkState::lambda_index(int site, Spin s) const {
    return 2 * offset(site) + static_cast<std::size_t>(s);
}

WalkState make_initial_state(BlochAngles bloch, int half_width) {
    if (half_width < 0) throw InvalidArgument("make_initial_state: half_width must be >= 0");
    WalkState s(half_width);
    s.set_amplitude(0, Spin::L, Complex(std::cos(bloch.theta / 2), 0.0));
    s.set_amplitude(0, Spin::R, std::polar(std::sin(bloch.theta / 2), bloch.phi));
    return s;
}

Coin coin_matrix(const CoinParams& c) {
    const double ct = std::cos(c.theta);
    const double st = std::sin(c.theta);
    const Complex ex = std::polar(1.0, c.xi);
    const Complex ez = std::polar(1.0, c.zeta);
    return {{{ex * ct, ez * st}, {std::conj(ez) * st, -std::conj(ex) * ct}}};
}

WalkState apply_coin(const WalkState& s, const CoinParams& c) {
    require_normalized(s, "apply_coin");
    WalkState out = s;
    const Coin m = coin_matrix(c);
    auto left = out.spin_amplitudes(Spin::L);
    auto right = out.spin_amplitudes(Spin::R);
    for (std::size_t i = 0; i < left.size(); ++i) {
        const Complex a = left[i];
        const Complex b = right[i];
        left[i] = m[0][0] * a + m[0][1] * b;
        right[i] = m[1][0] * a + m[1][1] * b;
    }
    return out;
}

WalkState apply_shift(const WalkState& s) {
    WalkState out(s.half_width());
    const auto left = s.spin_amplitudes(Spin::L);
    const auto right = s.spin_amplitudes(Spin::R);
    const std::size_t last = left.size() - 1;
    if (left[0] != Complex{} || right[last] != Complex{}) {
        throw BoundaryOverflow("shift: amplitude would leave the lattice; enlarge half_width");
    }
    auto new_left = out.spin_amplitudes(Spin::L);
    auto new_right = out.spin_amplitudes(Spin::R);
    for (std::size_t i = 0; i <= last; ++i) {
        if (i + 1 <= last) new_right[i] = left[i + 1];
        if (i >= 1) new_left[i] = right[i - 1];
    }
    return out;
}

Evolution evolve(const WalkState& s0, const CoinSchedule& sched, bool record_trajectory) {
    if (static_cast<std::size_t>(s0.half_width()) < sched.size()) {
        throw InvalidArgument("evolve: half_width " + std::to_string(s0.half_width()) +
                              " smaller than number of steps " + std::to_string(sched.size()));
    }
    require_normalized(s0, "evolve");
    Evolution ev{s0, {}};
    if (record_trajectory) {
        ev.trajectory.reserve(sched.size() + 1);
        ev.trajectory.push_back(s0);
    }
    for (const auto& c : sched.steps()) {
        ev.final_state = apply_shift(apply_coin(ev.final_state, c));
        if (record_trajectory) ev.trajectory.push_back(ev.final_state);
    }
    return ev;
}

WalkState evolve_final(const WalkState& s0, std::span<const double> w) {
    if (w.size() % 3 != 0) throw InvalidArgument("evolve_final: parameter vector length not a multiple of 3");
    WalkState out = s0;
    std::vector<Complex> left(out.spin_amplitudes(Spin::L).begin(), out.spin_amplitudes(Spin::L).end());
    std::vector<Complex> right(out.spin_amplitudes(Spin::R).begin(), out.spin_amplitudes(Spin::R).end());
    std::vector<Complex> scratch_l(left.size());
    std::vector<Complex> scratch_r(left.size());
    auto [lo, hi] = support_window(left, right);
    Kernel k{left, right, lo, hi};
    for (std::size_t i = 0; i < w.size(); i += 3) {
        k.coin(coin_matrix({w[i], w[i + 1], w[i + 2]}));
        k.shift(scratch_l, scratch_r);
    }
    std::copy(left.begin(), left.end(), out.spin_amplitudes(Spin::L).begin());
    std::copy(right.begin(), right.end(), out.spin_amplitudes(Spin::R).begin());
    return out;
}

}  // namespace qwalk
