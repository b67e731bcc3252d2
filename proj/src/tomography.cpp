#include "qwalk/tomography.hpp"

#include "qwalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace qwalk {

namespace {

// Outcome counts of n draws over probs, as conditional binomials.
std::vector<double> multinomial_frequencies(const std::vector<double>& probs, std::int64_t n,
                                            std::mt19937_64& rng) {
    std::vector<double> freq(probs.size(), 0.0);
    double remaining_mass = 0.0;
    for (double p : probs) remaining_mass += p;
    std::int64_t remaining = n;
    for (std::size_t k = 0; k < probs.size() && remaining > 0; ++k) {
        const double q = remaining_mass > 0.0 ? std::clamp(probs[k] / remaining_mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::int64_t> draw(remaining, q);
        const std::int64_t c = draw(rng);
        freq[k] = static_cast<double>(c) / static_cast<double>(n);
        remaining -= c;
        remaining_mass -= probs[k];
    }
    return freq;
}

}  // namespace

MeasurementRecord simulate_measurements(const WalkState& s, std::optional<std::int64_t> n_shots,
                                        std::uint64_t seed) {
    if (n_shots && *n_shots < 1) throw InvalidArgument("simulate_measurements: n_shots must be >= 1");
    if (std::abs(s.norm_squared() - 1.0) > kNormTolerance) {
        throw ContractViolation("simulate_measurements: state is not normalized");
    }
    const double r2 = std::numbers::sqrt2;
    const Complex i{0.0, 1.0};
    MeasurementRecord mr;
    mr.half_width = s.half_width();
    mr.n_shots = n_shots;

    // Exact outcome probabilities, interleaved (outcome, complement) per site.
    std::vector<double> direct;
    std::vector<double> diag;
    std::vector<double> circ;
    for (int j = -s.half_width(); j <= s.half_width(); ++j) {
        const Complex a = s.amplitude(j, Spin::L);
        const Complex b = s.amplitude(j, Spin::R);
        direct.push_back(std::norm(a));
        direct.push_back(std::norm(b));
        diag.push_back(std::norm((a + b) / r2));
        diag.push_back(std::norm((a - b) / r2));
        circ.push_back(std::norm((a + i * b) / r2));
        circ.push_back(std::norm((a - i * b) / r2));
    }
    if (n_shots) {
        std::mt19937_64 rng(seed);
        direct = multinomial_frequencies(direct, *n_shots, rng);
        diag = multinomial_frequencies(diag, *n_shots, rng);
        circ = multinomial_frequencies(circ, *n_shots, rng);
    }
    for (int j = -s.half_width(); j <= s.half_width(); ++j) {
        const auto k = 2 * static_cast<std::size_t>(j + s.half_width());
        mr.sites.push_back({j, direct[k], direct[k + 1], diag[k], circ[k]});
    }
    return mr;
}

Reconstruction reconstruct(const MeasurementRecord& mr, double tolerance) {
    if (tolerance < 0.0) {
        tolerance = mr.n_shots ? 10.0 / std::sqrt(static_cast<double>(*mr.n_shots)) : 1e-9;
    }
    Complex cross{};
    double pop_l = 0.0;
    double pop_r = 0.0;
    for (const auto& m : mr.sites) {
        for (double v : {m.i_l, m.i_r, m.i_d, m.i_c}) {
            if (!(v >= -tolerance && v <= 1.0 + tolerance)) {
                throw InconsistentData("reconstruct: intensity out of [0, 1] at site " + std::to_string(m.site));
            }
        }
        const double mean = 0.5 * (m.i_l + m.i_r);
        const Complex c{m.i_d - mean, m.i_c - mean};
        // |alpha_R^* alpha_L|^2 cannot exceed I_L I_R.
        if (std::norm(c) > m.i_l * m.i_r + tolerance) {
            throw InconsistentData("reconstruct: interference term too large at site " + std::to_string(m.site));
        }
        cross += c;
        pop_l += m.i_l;
        pop_r += m.i_r;
    }
    Reconstruction r;
    r.n = {cross.real(), cross.imag(), 0.5 * (pop_l - pop_r)};
    r.report = schmidt_report_from_n(r.n);
    if (!mr.n_shots && r.report.e_minus < 1e-6) {
        // Noiseless data fixes each site's spinor up to a phase, which is all the
        // determinant refinement needs.
        std::vector<Complex> left;
        std::vector<Complex> right;
        for (const auto& m : mr.sites) {
            const double mean = 0.5 * (m.i_l + m.i_r);
            const Complex c{m.i_d - mean, m.i_c - mean};
            if (m.i_l >= m.i_r) {
                if (m.i_l <= 0.0) continue;
                const double a = std::sqrt(m.i_l);
                left.emplace_back(a);
                right.push_back(std::conj(c) / a);
            } else {
                const double b = std::sqrt(m.i_r);
                right.emplace_back(b);
                left.push_back(c / b);
            }
        }
        r.report = schmidt_report_from_n(r.n, spin_determinant(left, right));
    }
    return r;
}

}  // namespace qwalk
