#include "qwalk/entanglement.hpp"

#include "qwalk/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace qwalk {

double NVector::norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }

NVector n_vector(const WalkState& s) {
    const auto left = s.spin_amplitudes(Spin::L);
    const auto right = s.spin_amplitudes(Spin::R);
    Complex cross{};
    double pop_l = 0.0;
    double pop_r = 0.0;
    for (std::size_t i = 0; i < left.size(); ++i) {
        cross += std::conj(right[i]) * left[i];
        pop_l += std::norm(left[i]);
        pop_r += std::norm(right[i]);
    }
    return {cross.real(), cross.imag(), 0.5 * (pop_l - pop_r)};
}

SchmidtReport schmidt_report_from_n(const NVector& n) {
    const double len = std::min(n.norm(), 0.5);
    SchmidtReport r;
    r.n = n;
    r.e_plus = 0.5 + len;
    r.e_minus = 0.5 - len;
    r.lambda_plus = std::sqrt(r.e_plus);
    r.lambda_minus = std::sqrt(r.e_minus);
    r.schmidt_norm = r.lambda_plus + r.lambda_minus;
    return r;
}

double spin_determinant(std::span<const Complex> left, std::span<const Complex> right) {
    if (left.size() != right.size()) throw InvalidArgument("spin_determinant: column length mismatch");
    double det = 0.0;
    for (std::size_t j = 0; j < left.size(); ++j) {
        if (left[j] == Complex{} && right[j] == Complex{}) continue;
        for (std::size_t k = j + 1; k < left.size(); ++k) {
            det += std::norm(left[j] * right[k] - right[j] * left[k]);
        }
    }
    return det;
}

namespace {
// Below this, rounding in 1/2 - |n| is amplified past 1e-10 by the square root.
constexpr double kRefineBelow = 1e-6;
}  // namespace

SchmidtReport schmidt_report_from_n(const NVector& n, double determinant) {
    SchmidtReport r = schmidt_report_from_n(n);
    if (r.e_minus < kRefineBelow) {
        r.e_minus = std::max(determinant, 0.0) / r.e_plus;
        r.lambda_minus = std::sqrt(r.e_minus);
        r.schmidt_norm = r.lambda_plus + r.lambda_minus;
    }
    return r;
}

SchmidtReport schmidt_report(const WalkState& s) {
    const NVector n = n_vector(s);
    const SchmidtReport r = schmidt_report_from_n(n);
    if (r.e_minus >= kRefineBelow) return r;
    return schmidt_report_from_n(n, spin_determinant(s.spin_amplitudes(Spin::L), s.spin_amplitudes(Spin::R)));
}

double schmidt_norm_svd(const WalkState& s) {
    const auto left = s.spin_amplitudes(Spin::L);
    const auto right = s.spin_amplitudes(Spin::R);
    Eigen::MatrixXcd alpha(static_cast<Eigen::Index>(left.size()), 2);
    for (std::size_t i = 0; i < left.size(); ++i) {
        alpha(static_cast<Eigen::Index>(i), 0) = left[i];
        alpha(static_cast<Eigen::Index>(i), 1) = right[i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(alpha);
    return svd.singularValues().sum();
}

double participation_ratio(const WalkState& s) {
    double sum = 0.0;
    for (Spin sp : {Spin::L, Spin::R}) {
        for (const Complex& a : s.spin_amplitudes(sp)) {
            const double p = std::norm(a);
            sum += p * p;
        }
    }
    return 1.0 / sum;
}

EntanglementCost::EntanglementCost(const CostSetup& setup)
    : setup_(setup), initial_state_(0) {
    if (setup.n_steps < 1) throw InvalidArgument("cost: n_steps must be >= 1");
    if (!(setup.beta >= 0.0)) throw InvalidArgument("cost: beta must be >= 0");
    initial_state_ = make_initial_state(setup.initial, setup.n_steps);
}

WalkState EntanglementCost::final_state(std::span<const double> w) const {
    if (w.size() != dimension()) {
        throw InvalidArgument("cost: parameter vector has length " + std::to_string(w.size()) +
                              ", expected " + std::to_string(dimension()));
    }
    return evolve_final(initial_state_, w);
}

double EntanglementCost::operator()(std::span<const double> w) const {
    const WalkState psi = final_state(w);
    double value = schmidt_report(psi).schmidt_norm;
    if (setup_.beta != 0.0) value += setup_.beta * participation_ratio(psi);
    return -value;
}

double cost(std::span<const double> w, const CostSetup& setup) { return EntanglementCost(setup)(w); }

std::vector<double> gradient_fd(const CostFunction& f, std::span<const double> w, double h) {
    if (!(h > 0.0)) throw InvalidArgument("gradient_fd: step must be > 0");
    std::vector<double> x(w.begin(), w.end());
    std::vector<double> g(w.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

std::vector<double> gradient_fd(std::span<const double> w, const CostSetup& setup, double h) {
    const EntanglementCost f(setup);
    return gradient_fd(CostFunction(std::cref(f)), w, h);
}

StationarityCertificate stationarity_certificate(std::span<const double> w, const CostSetup& setup,
                                                 double gradient_tol, double n_tol, double h) {
    const EntanglementCost f(setup);
    StationarityCertificate c;
    for (double gi : gradient_fd(CostFunction(std::cref(f)), w, h)) {
        c.gradient_inf_norm = std::max(c.gradient_inf_norm, std::abs(gi));
    }
    c.n_norm = n_vector(f.final_state(w)).norm();
    c.satisfied = c.gradient_inf_norm <= gradient_tol || c.n_norm <= n_tol;
    return c;
}

ChainRuleCheck chain_rule_check(std::span<const double> w, const CostSetup& setup,
                                std::span<const double> direction, double h) {
    if (direction.size() != w.size()) throw InvalidArgument("chain_rule_check: direction length mismatch");
    CostSetup pure = setup;
    pure.beta = 0.0;
    const EntanglementCost f(pure);

    auto along = [&](double t) {
        std::vector<double> x(w.begin(), w.end());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += t * direction[i];
        return schmidt_report(f.final_state(x));
    };
    const SchmidtReport here = along(0.0);
    const SchmidtReport plus = along(h);
    const SchmidtReport minus = along(-h);

    ChainRuleCheck c;
    c.directional_s = (plus.schmidt_norm - minus.schmidt_norm) / (2.0 * h);
    c.directional_n = (plus.n.norm() - minus.n.norm()) / (2.0 * h);
    const double n = here.n.norm();
    const double gap = 1.0 - 4.0 * n * n;
    // gap -> 0 is the product-state end, where the prefactor diverges; at n = 0
    // (maximal S) |n| has no derivative.
    c.applicable = gap >= 1e-12 && n >= 1e-6;
    if (c.applicable) {
        c.predicted_s = (here.lambda_minus - here.lambda_plus) / std::sqrt(gap) * c.directional_n;
    }
    return c;
}

}  // namespace qwalk
