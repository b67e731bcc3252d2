#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qwalk {

using Complex = std::complex<double>;
using Coin = std::array<std::array<Complex, 2>, 2>;

enum class Spin { L = 0, R = 1 };

inline constexpr double kNormTolerance = 1e-9;

/// Initial spin superposition cos(theta/2)|L> + e^{i phi} sin(theta/2)|R>.
struct BlochAngles {
    double theta = 0.0;  // [0, pi]
    double phi = 0.0;    // [0, 2 pi]

    friend bool operator==(const BlochAngles&, const BlochAngles&) = default;
};

/// One SU(2) coin. Canonical ranges: xi, zeta in [0, 2pi), theta in [0, pi/2].
struct CoinParams {
    double xi = 0.0;
    double zeta = 0.0;
    double theta = 0.0;

    /// Same coin matrix, angles folded into the canonical ranges.
    CoinParams canonical() const;

    friend bool operator==(const CoinParams&, const CoinParams&) = default;
};

/// Per-step coins. Flattens to w = {xi_1, zeta_1, theta_1, ..., xi_N, zeta_N, theta_N}.
class CoinSchedule {
public:
    CoinSchedule() = default;
    explicit CoinSchedule(std::vector<CoinParams> steps);

    static CoinSchedule from_vector(std::span<const double> w);
    std::vector<double> to_vector() const;

    std::size_t size() const noexcept { return steps_.size(); }
    const CoinParams& operator[](std::size_t i) const { return steps_[i]; }
    const std::vector<CoinParams>& steps() const noexcept { return steps_; }

    friend bool operator==(const CoinSchedule&, const CoinSchedule&) = default;

private:
    std::vector<CoinParams> steps_;
};

/// Amplitudes alpha_{j,sigma} on sites -half_width..half_width, stored per spin
/// as contiguous arrays indexed by j + half_width.
class WalkState {
public:
    explicit WalkState(int half_width = 0);

    int half_width() const noexcept { return half_width_; }
    std::size_t num_sites() const noexcept { return left_.size(); }

    Complex amplitude(int site, Spin s) const;
    void set_amplitude(int site, Spin s, Complex value);

    std::span<const Complex> spin_amplitudes(Spin s) const noexcept {
        return s == Spin::L ? std::span<const Complex>(left_) : std::span<const Complex>(right_);
    }
    std::span<Complex> spin_amplitudes(Spin s) noexcept {
        return s == Spin::L ? std::span<Complex>(left_) : std::span<Complex>(right_);
    }

    double norm_squared() const noexcept;
    /// |alpha_{j,L}|^2 + |alpha_{j,R}|^2
    double site_population(int site) const;
    double density(int site, Spin s) const { return std::norm(amplitude(site, s)); }

    bool contains(int site) const noexcept { return site >= -half_width_ && site <= half_width_; }

    /// Interleaved index used by plot tables: lambda = 2 (j + half_width) + sigma.
    std::size_t lambda_index(int site, Spin s) const;

private:
    std::size_t offset(int site) const;

    int half_width_;
    std::vector<Complex> left_;
    std::vector<Complex> right_;
};

WalkState make_initial_state(BlochAngles bloch, int half_width);

/// [[e^{i xi} cos t, e^{i zeta} sin t], [e^{-i zeta} sin t, -e^{-i xi} cos t]]
Coin coin_matrix(const CoinParams& c);

WalkState apply_coin(const WalkState& s, const CoinParams& c);
WalkState apply_shift(const WalkState& s);

struct Evolution {
    WalkState final_state;
    std::vector<WalkState> trajectory;  // psi_0..psi_N when recorded, else empty
};

/// Applies T * C_i for i = 1..N. Requires s0.half_width() >= sched.size().
Evolution evolve(const WalkState& s0, const CoinSchedule& sched, bool record_trajectory = false);

/// Final state only, from a flat parameter vector; the hot path for cost evaluation.
WalkState evolve_final(const WalkState& s0, std::span<const double> w);

}  // namespace qwalk
