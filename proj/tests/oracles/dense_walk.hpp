#pragma once

// Independent reference for the walk: explicit (2(2h+1))-dimensional unitaries
// T and 1 (x) C_i, multiplied in order. Basis index 2 (j + h) + sigma.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct Angles {
    double xi, zeta, theta;
};

inline Eigen::Index basis(int site, int spin, int h) { return 2 * (site + h) + spin; }

inline Mat shift_matrix(int h) {
    const Eigen::Index d = 2 * (2 * h + 1);
    Mat t = Mat::Zero(d, d);
    for (int m = -h; m <= h; ++m) {
        if (m - 1 >= -h) t(basis(m - 1, 1, h), basis(m, 0, h)) = 1.0;  // |m-1,R><m,L|
        if (m + 1 <= h) t(basis(m + 1, 0, h), basis(m, 1, h)) = 1.0;    // |m+1,L><m,R|
    }
    return t;
}

inline Mat coin_operator(const Angles& a, int h) {
    using C = std::complex<double>;
    const C i(0.0, 1.0);
    Eigen::Matrix2cd c;
    c << std::exp(i * a.xi) * std::cos(a.theta), std::exp(i * a.zeta) * std::sin(a.theta),
        std::exp(-i * a.zeta) * std::sin(a.theta), -std::exp(-i * a.xi) * std::cos(a.theta);
    const Eigen::Index sites = 2 * h + 1;
    Mat full = Mat::Zero(2 * sites, 2 * sites);
    for (Eigen::Index s = 0; s < sites; ++s) full.block(2 * s, 2 * s, 2, 2) = c;
    return full;
}

inline Vec initial(double theta, double phi, int h) {
    Vec v = Vec::Zero(2 * (2 * h + 1));
    v(basis(0, 0, h)) = std::cos(theta / 2);
    v(basis(0, 1, h)) = std::polar(std::sin(theta / 2), phi);
    return v;
}

/// The full product U = prod_i T C_i (later steps on the left).
inline Mat walk_unitary(const std::vector<Angles>& steps, int h) {
    const Mat t = shift_matrix(h);
    Mat u = Mat::Identity(t.rows(), t.cols());
    for (const auto& a : steps) u = t * coin_operator(a, h) * u;
    return u;
}

inline Vec evolve(const Vec& psi0, const std::vector<Angles>& steps, int h) { return walk_unitary(steps, h) * psi0; }

/// Schmidt norm as the singular-value sum of the (2h+1) x 2 reshaping.
inline double schmidt_norm(const Vec& psi, int h) {
    Mat a(2 * h + 1, 2);
    for (int j = -h; j <= h; ++j) {
        a(j + h, 0) = psi(basis(j, 0, h));
        a(j + h, 1) = psi(basis(j, 1, h));
    }
    Eigen::BDCSVD<Mat> svd(a);
    return svd.singularValues().sum();
}

}  // namespace oracle
