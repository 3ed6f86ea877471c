#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/QR>

#include "conefrac/linop.hpp"

namespace conefrac::testing {

/// Q diag(d) Q^H with Q Haar-ish unitary and d log-uniform in [lo, hi].
inline DenseOperator random_normal(std::mt19937_64& rng, int dim, double lo, double hi, double max_angle = 0.0)
{
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z(i, j) = {re, im};
        }
    const Matrix q = Eigen::HouseholderQR<Matrix>(z).householderQ();
    Vector d(dim);
    for (int i = 0; i < dim; ++i) {
        const double r = std::exp(std::log(lo) + unif(rng) * (std::log(hi) - std::log(lo)));
        d(i) = std::polar(r, (2.0 * unif(rng) - 1.0) * max_angle);
    }
    return DenseOperator(q * d.asDiagonal() * q.adjoint());
}

/// Real symmetric positive definite with eigenvalues in [lo, hi].
inline DenseOperator random_spd(std::mt19937_64& rng, int dim, double lo, double hi)
{
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) z(i, j) = gauss(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ();
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d(i) = std::exp(std::log(lo) + unif(rng) * (std::log(hi) - std::log(lo)));
    const Eigen::MatrixXd a = q * d.asDiagonal() * q.transpose();
    return DenseOperator(Matrix(a.cast<Complex>()));
}

inline double rel_error(const Matrix& a, const Matrix& b)
{
    return spectral_norm(Matrix(a - b)) / std::max(spectral_norm(b), 1e-300);
}

} // namespace conefrac::testing
