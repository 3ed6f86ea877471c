#include "conefrac/sectorial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "conefrac/error.hpp"
#include "conefrac/funcalc.hpp"

namespace conefrac {

using std::complex;
using std::numbers::pi;

namespace {

std::vector<double> log_space(double lo, double hi, int count)
{
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (int k = 0; k < count; ++k) out[k] = std::exp(a + (b - a) * k / (count - 1));
    return out;
}

std::vector<double> ray_angles(double theta, int rays)
{
    if (theta == 0.0 || rays <= 1) return {0.0};
    std::vector<double> out(rays);
    for (int k = 0; k < rays; ++k) out[k] = -theta + 2.0 * theta * k / (rays - 1);
    return out;
}

double resolvent_bound(const DenseOperator& op, complex<double> lambda, const Matrix& identity)
{
    const ShiftedFactorization lu(op, lambda);
    return std::abs(lambda) * operator_norm(lu.solve(identity), op);
}

} // namespace

SectorProbeReport sectorial_bound_probe(const DenseOperator& op, double theta, const SectorProbeOptions& options)
{
    if (!(theta >= 0.0 && theta < pi)) fail(ErrorCode::InvalidArgument, "theta must lie in [0, pi)");
    if (!(options.r_min > 0.0 && options.r_max >= options.r_min))
        fail(ErrorCode::InvalidArgument, "modulus range must satisfy 0 < r_min <= r_max");
    if (options.radial_samples < 1) fail(ErrorCode::InvalidArgument, "radial_samples must be positive");

    SectorProbeReport report;
    report.angle_theta = theta;
    report.min_modulus_sampled = std::numeric_limits<double>::infinity();
    const Matrix identity = Matrix::Identity(op.dim(), op.dim());
    for (double psi : ray_angles(theta, options.rays)) {
        for (double r : log_space(options.r_min, options.r_max, options.radial_samples)) {
            const complex<double> lambda = std::polar(r, psi);
            try {
                report.samples.push_back({lambda, resolvent_bound(op, lambda, identity)});
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingularShift) throw;
                report.skipped.push_back(lambda);
                continue;
            }
            report.estimated_K = std::max(report.estimated_K, report.samples.back().bound_value);
            report.min_modulus_sampled = std::min(report.min_modulus_sampled, r);
            report.max_modulus_sampled = std::max(report.max_modulus_sampled, r);
        }
    }
    if (report.samples.empty()) report.min_modulus_sampled = 0.0;

    bool inside = false;
    const Vector eig = Eigen::ComplexEigenSolver<Matrix>(op.entries(), false).eigenvalues();
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        const complex<double> z = -eig(i);
        const double m = std::abs(z);
        if (m >= options.r_min && m <= options.r_max && std::abs(std::arg(z)) <= theta) inside = true;
    }
    report.not_sectorial_suspected = inside || !report.skipped.empty() || report.estimated_K > 1e6;
    return report;
}

RBoundEstimate rademacher_rbound_estimate(const std::vector<DenseOperator>& family, const RBoundOptions& options)
{
    if (family.empty()) fail(ErrorCode::InvalidArgument, "family is empty");
    if (options.trials < 1 || options.vectors_per_trial < 1)
        fail(ErrorCode::InvalidArgument, "trials and vectors_per_trial must be positive");
    const Eigen::Index dim = family.front().dim();
    for (const auto& t : family)
        if (t.dim() != dim) fail(ErrorCode::DimensionMismatch, "family operators differ in dimension");
    const int size = static_cast<int>(family.size());
    if (options.subset_size < 0 || options.subset_size > size)
        fail(ErrorCode::InvalidArgument, "subset_size exceeds the family size");

    RBoundEstimate est;
    est.family_size = size;
    est.trials = options.trials;
    est.vector_dim = static_cast<int>(dim);
    for (const auto& t : family) est.uniform_norm_bound = std::max(est.uniform_norm_bound, operator_norm(t));

    const DenseOperator& metric = family.front();
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss;
    std::vector<int> indices(size);

    for (int trial = 0; trial < options.trials; ++trial) {
        const int n = options.subset_size > 0 ? options.subset_size
                                              : std::uniform_int_distribution<int>(1, size)(rng);
        for (int k = 0; k < size; ++k) indices[k] = k;
        for (int k = 0; k < n; ++k) std::swap(indices[k], indices[std::uniform_int_distribution<int>(k, size - 1)(rng)]);

        for (int rep = 0; rep < options.vectors_per_trial; ++rep) {
            std::vector<Vector> x(n), tx(n);
            for (int k = 0; k < n; ++k) {
                x[k].resize(dim);
                for (Eigen::Index i = 0; i < dim; ++i) {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    x[k](i) = complex<double>(re, im);
                }
                tx[k] = family[indices[k]].entries() * x[k];
            }
            const bool exhaustive = n <= exhaustive_sign_limit && !options.force_monte_carlo;
            const std::uint64_t patterns = exhaustive ? (std::uint64_t{1} << n) : monte_carlo_sign_draws;
            double lhs = 0.0, rhs = 0.0;
            Vector a(dim), b(dim);
            for (std::uint64_t p = 0; p < patterns; ++p) {
                a.setZero();
                b.setZero();
                std::uint64_t bits = exhaustive ? p : rng();
                for (int k = 0; k < n; ++k) {
                    if (!exhaustive && k > 0 && k % 64 == 0) bits = rng();
                    const double eps = (bits >> (k % 64)) & 1 ? -1.0 : 1.0;
                    a += eps * tx[k];
                    b += eps * x[k];
                }
                const double na = metric.vector_norm(a), nb = metric.vector_norm(b);
                lhs += na * na;
                rhs += nb * nb;
            }
            const double ratio = rhs > 0.0 ? std::sqrt(lhs / rhs) : 0.0;
            est.max_ratio = std::max(est.max_ratio, ratio);
            if (n == 1) est.max_single_ratio = std::max(est.max_single_ratio, ratio);
        }
    }
    return est;
}

DecayFit power_resolvent_decay_fit(const DenseOperator& op, double sigma, double theta, const DecayFitOptions& options)
{
    if (!(sigma > 0.0 && sigma <= 1.0)) fail(ErrorCode::InvalidArgument, "sigma must lie in (0, 1]");
    if (!(theta >= 0.0 && theta < pi)) fail(ErrorCode::InvalidArgument, "theta must lie in [0, pi)");
    if (options.samples < 2) fail(ErrorCode::InvalidArgument, "need at least two samples per ray");
    const Matrix power = sigma == 1.0 ? op.entries() : frac_power(op, {sigma}).entries();

    DecayFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::vector<double> angles = theta == 0.0 ? std::vector<double>{0.0} : std::vector<double>{-theta, 0.0, theta};
    for (double psi : angles) {
        for (double r : log_space(options.r_min, options.r_max, options.samples)) {
            const complex<double> lambda = std::polar(r, psi);
            const double value = operator_norm(Matrix(ShiftedFactorization(op, lambda).solve(power)), op);
            fit.samples.push_back({lambda, value});
            const double x = std::log1p(r);
            const double y = std::log(std::max(value, 1e-300));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
    }
    const double n = static_cast<double>(fit.samples.size());
    fit.exponent_fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.C_fit = std::exp((sy - fit.exponent_fit * sx) / n);
    return fit;
}

double default_laurent_radius(const DenseOperator& op, complex<double> lambda0)
{
    const Vector eig = Eigen::ComplexEigenSolver<Matrix>(op.entries(), false).eigenvalues();
    double scale = 1.0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) scale = std::max(scale, std::abs(eig(i)));
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        const double d = std::abs(-eig(i) - lambda0);
        if (d > 1e-8 * std::max(1.0, std::abs(lambda0))) nearest = std::min(nearest, d);
    }
    return std::isfinite(nearest) ? 0.5 * nearest : 1.0;
}

LaurentExpansion laurent_coefficients(const DenseOperator& op, complex<double> lambda0, int order, int k_max,
                                      double contour_radius, int contour_nodes)
{
    if (order < 1) fail(ErrorCode::InvalidArgument, "order must be positive");
    if (contour_nodes < 64) fail(ErrorCode::InvalidArgument, "contour_nodes must be at least 64");
    if (k_max < 0) fail(ErrorCode::InvalidArgument, "k_max must be >= 0");
    const double radius = contour_radius > 0.0 ? contour_radius : default_laurent_radius(op, lambda0);

    const Vector eig = Eigen::ComplexEigenSolver<Matrix>(op.entries(), false).eigenvalues();
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        if (std::abs(std::abs(-eig(i) - lambda0) - radius) < 1e-8 * std::max(1.0, radius)) {
            std::ostringstream msg;
            msg << "eigenvalue " << -eig(i) << " of -A lies on the contour";
            fail(ErrorCode::ContourHitsSpectrum, msg.str());
        }
    }

    LaurentExpansion out;
    out.pole = lambda0;
    out.order = order;
    out.contour_radius = radius;
    out.contour_nodes = contour_nodes;
    const Eigen::Index n = op.dim();
    const int k_lo = -order - 1;
    for (int k = k_lo; k <= k_max; ++k) out.coefficients[k] = Matrix::Zero(n, n);

    const Matrix identity = Matrix::Identity(n, n);
    for (int j = 0; j < contour_nodes; ++j) {
        const double phi = 2.0 * pi * j / contour_nodes;
        Matrix resolvent;
        try {
            resolvent = ShiftedFactorization(op, lambda0 + std::polar(radius, phi)).solve(identity);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularShift) throw;
            fail(ErrorCode::ContourHitsSpectrum, e.what());
        }
        for (int k = k_lo; k <= k_max; ++k)
            out.coefficients[k] += std::polar(std::pow(radius, -k), -k * phi) * resolvent;
    }
    for (auto& [k, b] : out.coefficients) b /= static_cast<double>(contour_nodes);
    return out;
}

Matrix laurent_resum(const LaurentExpansion& expansion, complex<double> lambda)
{
    const complex<double> d = lambda - expansion.pole;
    Matrix acc = Matrix::Zero(expansion.coefficients.begin()->second.rows(), expansion.coefficients.begin()->second.cols());
    for (const auto& [k, b] : expansion.coefficients) acc += std::pow(d, k) * b;
    return acc;
}

std::map<std::string, double> verify_laurent_identities(const LaurentExpansion& expansion, const DenseOperator& op)
{
    const Eigen::Index n = op.dim();
    for (const auto& [k, b] : expansion.coefficients)
        if (b.rows() != n) fail(ErrorCode::DimensionMismatch, "expansion does not match the operator");
    Matrix shifted = op.entries();
    shifted.diagonal().array() += expansion.pole;
    auto b = [&](int k) -> const Matrix& { return expansion.coefficients.at(k); };
    auto norm = [&](const Matrix& m) { return operator_norm(m, op); };

    std::map<std::string, double> out;
    const int mu = expansion.order;
    out["pole_annihilation"] = norm(shifted * b(-mu));
    out["below_order"] = norm(b(-mu - 1));
    out["identity_B0"] = norm(Matrix(shifted * b(0) + b(-1) - Matrix::Identity(n, n)));
    const int k_max = expansion.coefficients.rbegin()->first;
    for (int k = -mu + 1; k <= k_max; ++k) {
        if (k == 0) continue;
        out["recursion_" + std::to_string(k)] = norm(Matrix(shifted * b(k) + b(k - 1)));
    }
    double worst = 0.0;
    for (const auto& [name, value] : out) worst = std::max(worst, value);
    out["max"] = worst;
    return out;
}

SimplePoleReport simple_pole_check(const DenseOperator& op, double modulus_floor, double theta)
{
    if (!(modulus_floor > 0.0 && modulus_floor < 1.0)) fail(ErrorCode::InvalidArgument, "modulus_floor must lie in (0, 1)");
    const int decades = static_cast<int>(std::floor(-std::log10(modulus_floor) + 1e-9));
    if (decades < 6) fail(ErrorCode::InvalidArgument, "need at least six decades below |lambda| = 1");
    const Matrix identity = Matrix::Identity(op.dim(), op.dim());

    SimplePoleReport report;
    for (double psi : {-theta, 0.0, theta}) {
        double previous = 0.0;
        for (int d = 0; d <= decades; ++d) {
            const complex<double> lambda = std::polar(std::pow(10.0, -d), psi);
            const double value = resolvent_bound(op, lambda, identity);
            report.sup_value = std::max(report.sup_value, value);
            if (d > 0) report.max_decade_growth = std::max(report.max_decade_growth, value / previous);
            previous = value;
        }
    }
    report.is_simple = report.max_decade_growth < 1.05;
    return report;
}

} // namespace conefrac
