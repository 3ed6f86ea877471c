#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace conefrac {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Square complex matrix standing in for a closed sectorial operator.
///
/// When `inner_weights` is present the space carries the weighted inner
/// product <u, v> = sum_i w_i conj(u_i) v_i; every norm reported for this
/// operator is taken in that metric. Immutable after construction.
class DenseOperator {
public:
    explicit DenseOperator(Matrix entries, std::optional<RealVector> inner_weights = std::nullopt,
                           std::string label = {});

    static DenseOperator identity(Eigen::Index dim);
    static DenseOperator zero(Eigen::Index dim);
    static DenseOperator diagonal(const Vector& values);
    static DenseOperator diagonal(std::initializer_list<double> values);

    [[nodiscard]] Eigen::Index dim() const noexcept { return entries_.rows(); }
    [[nodiscard]] const Matrix& entries() const noexcept { return entries_; }
    [[nodiscard]] const std::optional<RealVector>& inner_weights() const noexcept { return weights_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// D^{1/2} A D^{-1/2}: the operator expressed in an orthonormal frame of
    /// the weighted metric. Equals `entries()` when unweighted.
    [[nodiscard]] Matrix unitary_frame() const;

    /// Maps a matrix acting on this space into the orthonormal frame.
    [[nodiscard]] Matrix to_frame(const Matrix& m) const;
    [[nodiscard]] Matrix from_frame(const Matrix& m) const;

    [[nodiscard]] double vector_norm(const Vector& v) const;

    /// Same metric, new entries.
    [[nodiscard]] DenseOperator with_entries(Matrix entries, std::string label = {}) const;

private:
    Matrix entries_;
    std::optional<RealVector> weights_;
    std::string label_;
};

struct EigenData {
    Vector eigenvalues;
    Matrix right_vectors;
    /// inverse of right_vectors
    Matrix left_vectors;
    /// 2-norm condition number of the eigenvector matrix (in the weighted frame).
    double condition_estimate = 1.0;
    /// ||A V - V diag(eigenvalues)|| / ||A||.
    double residual = 0.0;
};

/// LU factorization of A + lambda I with the singularity guard applied once.
class ShiftedFactorization {
public:
    ShiftedFactorization(const DenseOperator& op, Complex lambda);

    [[nodiscard]] Vector solve(const Vector& rhs) const;
    [[nodiscard]] Matrix solve(const Matrix& rhs) const;
    [[nodiscard]] double rcond() const noexcept { return rcond_; }

private:
    Eigen::PartialPivLU<Matrix> lu_;
    RealVector row_scale_;
    double rcond_ = 0.0;
};

/// Condition estimates above this raise SingularShift.
inline constexpr double singular_condition_threshold = 1e14;

Vector apply(const DenseOperator& op, const Vector& v);

/// Solves (A + lambda I) w = v.
Vector shifted_solve(const DenseOperator& op, Complex lambda, const Vector& v);

/// (A + lambda I)^{-1} as a matrix.
Matrix shifted_inverse(const DenseOperator& op, Complex lambda);

/// Largest singular value in the operator's (weighted) metric.
double operator_norm(const DenseOperator& op);

/// Largest singular value of `m` viewed as an operator on the space of `metric`.
double operator_norm(const Matrix& m, const DenseOperator& metric);

double spectral_norm(const Matrix& m);

EigenData eigen_decompose(const DenseOperator& op);

/// Eigen-oracle evaluation V f(Lambda) V^{-1}.
template <typename F>
Matrix apply_spectral_function(const EigenData& eig, F&& f)
{
    Vector fv(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(eig.eigenvalues(i));
    return eig.right_vectors * fv.asDiagonal() * eig.left_vectors;
}

/// CSV rows of complex entries written as "re+imj" with 17 significant digits.
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);

std::string format_complex(Complex z);
Complex parse_complex(const std::string& token);

} // namespace conefrac
