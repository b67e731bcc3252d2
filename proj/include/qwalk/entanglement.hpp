#pragma once

#include "qwalk/walk.hpp"

#include <functional>
#include <span>
#include <vector>

namespace qwalk {

/// Bloch vector of the reduced spin density matrix rho_C = 1/2 + n . sigma.
struct NVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const noexcept;
};

struct SchmidtReport {
    double schmidt_norm = 1.0;  // lambda_plus + lambda_minus, in [1, sqrt 2]
    double lambda_plus = 1.0;
    double lambda_minus = 0.0;
    double e_plus = 1.0;  // lambda_plus^2
    double e_minus = 0.0;
    NVector n;
};

NVector n_vector(const WalkState& s);

/// E_pm = 1/2 pm |n|, S = sqrt(E_-) + sqrt(E_+). |n| is clamped to 1/2 so that
/// slightly noisy vectors (e.g. from reconstructed data) still give a valid report.
SchmidtReport schmidt_report_from_n(const NVector& n);

/// det of the reduced spin matrix as a sum of squared 2x2 minors of the amplitude
/// columns. Unlike 1/4 - |n|^2 it keeps full relative precision near product states.
double spin_determinant(std::span<const Complex> left, std::span<const Complex> right);

/// Same as schmidt_report_from_n, but when E_- is small it is recomputed as det / E_+.
SchmidtReport schmidt_report_from_n(const NVector& n, double determinant);
SchmidtReport schmidt_report(const WalkState& s);

/// Sum of the two singular values of the (2h+1) x 2 amplitude matrix.
double schmidt_norm_svd(const WalkState& s);

/// 1 / sum_{j,sigma} |alpha_{j,sigma}|^4
double participation_ratio(const WalkState& s);

using CostFunction = std::function<double(std::span<const double>)>;

struct CostSetup {
    BlochAngles initial;
    int n_steps = 10;
    double beta = 0.0;
};

/// -(S + beta * PR) of the state reached by the schedule w from setup.initial.
/// Reentrant: holds only immutable data after construction.
class EntanglementCost {
public:
    explicit EntanglementCost(const CostSetup& setup);

    double operator()(std::span<const double> w) const;
    WalkState final_state(std::span<const double> w) const;

    const CostSetup& setup() const noexcept { return setup_; }
    std::size_t dimension() const noexcept { return 3 * static_cast<std::size_t>(setup_.n_steps); }

private:
    CostSetup setup_;
    WalkState initial_state_;
};

double cost(std::span<const double> w, const CostSetup& setup);

/// Central differences, component-wise.
std::vector<double> gradient_fd(const CostFunction& f, std::span<const double> w, double h = 1e-6);
std::vector<double> gradient_fd(std::span<const double> w, const CostSetup& setup, double h = 1e-6);

/// Stationarity test: either the FD gradient vanishes or |n| does (E_- = E_+).
struct StationarityCertificate {
    double gradient_inf_norm = 0.0;
    double n_norm = 0.0;
    bool satisfied = false;
};

StationarityCertificate stationarity_certificate(std::span<const double> w, const CostSetup& setup,
                                                 double gradient_tol = 1e-4, double n_tol = 1e-6,
                                                 double h = 1e-6);

/// Chain rule dS = (sqrt(E_-) - sqrt(E_+)) / sqrt(1 - 4|n|^2) * d|n| along a direction,
/// both sides by central differences. Not applicable where 1 - 4|n|^2 < 1e-12 or |n| < 1e-6.
struct ChainRuleCheck {
    double directional_s = 0.0;
    double directional_n = 0.0;
    double predicted_s = 0.0;
    bool applicable = false;
};

ChainRuleCheck chain_rule_check(std::span<const double> w, const CostSetup& setup,
                                std::span<const double> direction, double h = 1e-5);

}  // namespace qwalk
