#pragma once

#include "qwalk/entanglement.hpp"
#include "qwalk/walk.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qwalk {

/// Intensities at one lattice site under the three analyzer settings:
/// direct (L, R), diagonal D = (L + R)/sqrt2 and circular C = (L + iR)/sqrt2.
struct SiteIntensities {
    int site = 0;
    double i_l = 0.0;
    double i_r = 0.0;
    double i_d = 0.0;
    double i_c = 0.0;

    friend bool operator==(const SiteIntensities&, const SiteIntensities&) = default;
};

/// Real-valued data only; reconstruction never sees amplitudes.
struct MeasurementRecord {
    int half_width = 0;
    std::vector<SiteIntensities> sites;   // ordered by site, -half_width..half_width
    std::optional<std::int64_t> n_shots;  // nullopt: exact intensities

    friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

/// Noiseless when n_shots is nullopt; otherwise each analyzer setting is sampled
/// n_shots times from its multinomial over all (site, outcome) pairs.
MeasurementRecord simulate_measurements(const WalkState& s, std::optional<std::int64_t> n_shots,
                                        std::uint64_t seed = 0);

struct Reconstruction {
    NVector n;
    SchmidtReport report;
};

/// Per-site cross term alpha_R^* alpha_L from
///   Re = I_D - (I_L + I_R)/2,  Im = I_C - (I_L + I_R)/2,
/// summed into n. Throws InconsistentData when a site's quadruple is not
/// admissible within `tolerance` (negative: 1e-9 noiseless, 10/sqrt(n_shots) otherwise).
Reconstruction reconstruct(const MeasurementRecord& mr, double tolerance = -1.0);

}  // namespace qwalk
