#include "conefrac/linop.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "conefrac/error.hpp"

namespace conefrac {

namespace {

RealVector sqrt_weights(const std::optional<RealVector>& w)
{
    return w ? RealVector(w->array().sqrt()) : RealVector();
}

} // namespace

DenseOperator::DenseOperator(Matrix entries, std::optional<RealVector> inner_weights, std::string label)
    : entries_(std::move(entries)), weights_(std::move(inner_weights)), label_(std::move(label))
{
    if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
        fail(ErrorCode::DimensionMismatch, "operator must be square with dim >= 1");
    if (!entries_.allFinite()) fail(ErrorCode::InvalidArgument, "operator entries must be finite");
    if (weights_) {
        if (weights_->size() != entries_.rows())
            fail(ErrorCode::DimensionMismatch, "inner_weights length differs from dim");
        if (!weights_->allFinite() || (weights_->array() <= 0.0).any())
            fail(ErrorCode::InvalidArgument, "inner_weights must be strictly positive");
    }
}

DenseOperator DenseOperator::identity(Eigen::Index dim)
{
    return DenseOperator(Matrix::Identity(dim, dim), std::nullopt, "identity");
}

DenseOperator DenseOperator::zero(Eigen::Index dim)
{
    return DenseOperator(Matrix::Zero(dim, dim), std::nullopt, "zero");
}

DenseOperator DenseOperator::diagonal(const Vector& values)
{
    return DenseOperator(Matrix(values.asDiagonal()), std::nullopt, "diag");
}

DenseOperator DenseOperator::diagonal(std::initializer_list<double> values)
{
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return diagonal(v);
}

Matrix DenseOperator::to_frame(const Matrix& m) const
{
    if (!weights_) return m;
    const RealVector d = sqrt_weights(weights_);
    return d.asDiagonal() * m * d.cwiseInverse().asDiagonal();
}

Matrix DenseOperator::from_frame(const Matrix& m) const
{
    if (!weights_) return m;
    const RealVector d = sqrt_weights(weights_);
    return d.cwiseInverse().asDiagonal() * m * d.asDiagonal();
}

Matrix DenseOperator::unitary_frame() const { return to_frame(entries_); }

double DenseOperator::vector_norm(const Vector& v) const
{
    if (!weights_) return v.norm();
    return std::sqrt((weights_->array() * v.array().abs2()).sum());
}

DenseOperator DenseOperator::with_entries(Matrix entries, std::string label) const
{
    return DenseOperator(std::move(entries), weights_, label.empty() ? label_ : std::move(label));
}

ShiftedFactorization::ShiftedFactorization(const DenseOperator& op, Complex lambda)
{
    Matrix shifted = op.entries();
    shifted.diagonal().array() += lambda;
    // Row equilibration keeps graded operators (entries spanning many decades
    // from row to row) from tripping the condition guard spuriously.
    row_scale_.resize(shifted.rows());
    for (Eigen::Index i = 0; i < shifted.rows(); ++i) {
        const double m = shifted.row(i).cwiseAbs().maxCoeff();
        if (m == 0.0) fail(ErrorCode::SingularShift, "A + lambda I has a zero row");
        row_scale_(i) = 1.0 / m;
    }
    shifted = row_scale_.asDiagonal() * shifted;
    lu_.compute(shifted);
    rcond_ = lu_.rcond();
    if (!std::isfinite(rcond_) || rcond_ < 1.0 / singular_condition_threshold) {
        std::ostringstream msg;
        msg << "A + lambda I numerically singular at lambda = " << lambda << " (rcond " << rcond_ << ")";
        fail(ErrorCode::SingularShift, msg.str());
    }
}

Vector ShiftedFactorization::solve(const Vector& rhs) const
{
    if (rhs.size() != row_scale_.size()) fail(ErrorCode::DimensionMismatch, "rhs length differs from dim");
    return lu_.solve(row_scale_.asDiagonal() * rhs);
}

Matrix ShiftedFactorization::solve(const Matrix& rhs) const
{
    if (rhs.rows() != row_scale_.size()) fail(ErrorCode::DimensionMismatch, "rhs rows differ from dim");
    return lu_.solve(row_scale_.asDiagonal() * rhs);
}

Vector apply(const DenseOperator& op, const Vector& v)
{
    if (v.size() != op.dim()) fail(ErrorCode::DimensionMismatch, "vector length differs from dim");
    return op.entries() * v;
}

Vector shifted_solve(const DenseOperator& op, Complex lambda, const Vector& v)
{
    if (v.size() != op.dim()) fail(ErrorCode::DimensionMismatch, "vector length differs from dim");
    return ShiftedFactorization(op, lambda).solve(v);
}

Matrix shifted_inverse(const DenseOperator& op, Complex lambda)
{
    return ShiftedFactorization(op, lambda).solve(Matrix(Matrix::Identity(op.dim(), op.dim())));
}

double spectral_norm(const Matrix& m)
{
    if (m.size() == 0) return 0.0;
    if (m.rows() <= 2 || m.cols() <= 2) {
        Eigen::JacobiSVD<Matrix> svd(m);
        return svd.singularValues()(0);
    }
    if (m.rows() <= 32) {
        Eigen::BDCSVD<Matrix> svd(m);
        return svd.singularValues()(0);
    }
    // largest eigenvalue of the Gram matrix carries full relative accuracy and
    // is several times cheaper than a full SVD at this size
    const Matrix gram = m.cols() <= m.rows() ? Matrix(m.adjoint() * m) : Matrix(m * m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

double operator_norm(const DenseOperator& op) { return spectral_norm(op.unitary_frame()); }

double operator_norm(const Matrix& m, const DenseOperator& metric)
{
    if (m.rows() != metric.dim() || m.cols() != metric.dim())
        fail(ErrorCode::DimensionMismatch, "matrix shape differs from metric dim");
    return spectral_norm(metric.to_frame(m));
}

EigenData eigen_decompose(const DenseOperator& op)
{
    const Matrix frame = op.unitary_frame();
    const double scale = spectral_norm(frame);
    const Eigen::Index n = frame.rows();

    EigenData out;
    Matrix vectors;
    Matrix inverse;
    bool unitary = false;
    const double herm_defect = (frame - frame.adjoint()).norm();
    if (herm_defect <= 1e-13 * std::max(scale, 1e-300) * std::sqrt(static_cast<double>(n))) {
        const Matrix herm = 0.5 * (frame + frame.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
        out.eigenvalues = es.eigenvalues().cast<Complex>();
        vectors = es.eigenvectors();
        unitary = true;
    } else {
        Eigen::ComplexSchur<Matrix> schur(frame);
        const Matrix& t = schur.matrixT();
        const double off = t.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm();
        if (off <= 1e-12 * std::max(scale, 1e-300)) {
            out.eigenvalues = t.diagonal();
            vectors = schur.matrixU();
            unitary = true;
        } else {
            Eigen::ComplexEigenSolver<Matrix> es(frame);
            out.eigenvalues = es.eigenvalues();
            vectors = es.eigenvectors();
        }
    }

    if (unitary) {
        // orthonormal up to rounding; the adjoint is the inverse
        inverse = vectors.adjoint();
        out.condition_estimate = 1.0 + (inverse * vectors - Matrix::Identity(n, n)).norm();
    } else {
        Eigen::JacobiSVD<Matrix> svd(vectors);
        const auto& sv = svd.singularValues();
        out.condition_estimate = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
        if (std::isfinite(out.condition_estimate) && out.condition_estimate < 1e12)
            inverse = vectors.partialPivLu().inverse();
    }

    const double denom = scale > 0.0 ? scale : 1.0;
    out.residual = (frame * vectors - vectors * out.eigenvalues.asDiagonal()).norm() / denom;
    double recon = std::numeric_limits<double>::infinity();
    if (inverse.size() != 0) {
        const Matrix rebuilt = vectors * out.eigenvalues.asDiagonal() * inverse;
        recon = (frame - rebuilt).norm() / denom;
    }
    if (!(out.residual <= 1e-8) || !(recon <= 1e-8)) {
        std::ostringstream msg;
        msg << "eigenvector basis unusable (condition " << out.condition_estimate << ", reconstruction "
            << recon << ")";
        fail(ErrorCode::DefectiveMatrix, msg.str());
    }

    if (op.inner_weights()) {
        const RealVector d = op.inner_weights()->array().sqrt();
        vectors = d.cwiseInverse().asDiagonal() * vectors;
        inverse = inverse * d.asDiagonal();
    }
    out.left_vectors = std::move(inverse);
    out.right_vectors = std::move(vectors);
    return out;
}

std::string format_complex(Complex z)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
    return buf;
}

Complex parse_complex(const std::string& raw)
{
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) fail(ErrorCode::IoError, "empty complex token");
    auto to_double = [&](const std::string& part) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(part, &used);
        } catch (const std::exception&) {
            fail(ErrorCode::IoError, "malformed complex token '" + raw + "'");
        }
        if (used != part.size()) fail(ErrorCode::IoError, "malformed complex token '" + raw + "'");
        return v;
    };
    const char last = s.back();
    if (last != 'j' && last != 'i') return {to_double(s), 0.0};
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t p = s.size(); p-- > 1;) {
        if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
            split = p;
            break;
        }
    }
    if (split == std::string::npos) {
        if (s.empty() || s == "+") return {0.0, 1.0};
        if (s == "-") return {0.0, -1.0};
        return {0.0, to_double(s)};
    }
    std::string im = s.substr(split);
    if (im == "+") im = "1";
    if (im == "-") im = "-1";
    return {to_double(s.substr(0, split)), to_double(im)};
}

void write_matrix_csv(std::ostream& out, const Matrix& m)
{
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_complex(m(i, j));
        }
        out << '\n';
    }
}

Matrix read_matrix_csv(std::istream& in)
{
    std::vector<std::vector<Complex>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<Complex> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(parse_complex(cell));
        rows.push_back(std::move(row));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) fail(ErrorCode::IoError, "empty matrix file");
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
            fail(ErrorCode::DimensionMismatch, "CSV matrix is not square");
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

} // namespace conefrac
