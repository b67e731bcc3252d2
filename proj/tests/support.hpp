#pragma once

#include "qwalk/walk.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace testing {

/// Normalized state with complex Gaussian amplitudes; about a third of the
/// basis states are zeroed to exercise sparse supports.
inline qwalk::WalkState random_state(std::mt19937_64& rng, int half_width) {
    std::normal_distribution<double> g;
    std::bernoulli_distribution keep(0.66);
    qwalk::WalkState s(half_width);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (int j = -half_width; j <= half_width; ++j) {
            for (auto sp : {qwalk::Spin::L, qwalk::Spin::R}) {
                const qwalk::Complex a = keep(rng) ? qwalk::Complex(g(rng), g(rng)) : qwalk::Complex{};
                s.set_amplitude(j, sp, a);
                norm += std::norm(a);
            }
        }
    } while (norm == 0.0);
    const double scale = 1.0 / std::sqrt(norm);
    for (int j = -half_width; j <= half_width; ++j) {
        for (auto sp : {qwalk::Spin::L, qwalk::Spin::R}) s.set_amplitude(j, sp, s.amplitude(j, sp) * scale);
    }
    return s;
}

inline std::vector<double> random_angles(std::mt19937_64& rng, int n_steps) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    std::vector<double> w(3 * static_cast<std::size_t>(n_steps));
    for (auto& x : w) x = u(rng);
    return w;
}

inline qwalk::WalkState bell_state() {
    qwalk::WalkState s(1);
    s.set_amplitude(-1, qwalk::Spin::L, 1.0 / std::numbers::sqrt2);
    s.set_amplitude(1, qwalk::Spin::R, 1.0 / std::numbers::sqrt2);
    return s;
}

/// (1/2)(|-2,R> - |0,L> + |0,R> + |2,L>), the two-step Hadamard walk from |0,L>.
inline qwalk::WalkState hadamard_two_step_state() {
    qwalk::WalkState s(2);
    s.set_amplitude(-2, qwalk::Spin::R, 0.5);
    s.set_amplitude(0, qwalk::Spin::L, -0.5);
    s.set_amplitude(0, qwalk::Spin::R, 0.5);
    s.set_amplitude(2, qwalk::Spin::L, 0.5);
    return s;
}

}  // namespace testing
