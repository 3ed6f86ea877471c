#include "conefrac/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "conefrac/config.hpp"
#include "conefrac/error.hpp"

namespace conefrac {

using std::complex;

CrossSection CrossSection::circle(int max_modes)
{
    CrossSection cs;
    cs.name = "circle";
    cs.n = 1;
    // one mode past the request so truncation can keep mu_1 for the weight window
    for (int j = 0; j <= max_modes; ++j) {
        cs.eigenvalues.push_back(-static_cast<double>(j) * j);
        cs.multiplicities.push_back(j == 0 ? 1 : 2);
    }
    return cs.truncated(max_modes);
}

CrossSection CrossSection::sphere(int max_modes)
{
    CrossSection cs;
    cs.name = "sphere";
    cs.n = 2;
    for (int l = 0; l <= max_modes; ++l) {
        cs.eigenvalues.push_back(-static_cast<double>(l) * (l + 1));
        cs.multiplicities.push_back(2 * l + 1);
    }
    return cs.truncated(max_modes);
}

CrossSection CrossSection::from_text(const std::string& text, const std::string& origin)
{
    const KeyValueConfig kv = KeyValueConfig::parse(text, origin);
    for (const char* key : {"n", "eigenvalues", "multiplicities", "components"})
        if (!kv.has(key)) fail(ErrorCode::ConfigError, origin + ": missing key '" + key + "'");
    CrossSection cs;
    cs.name = origin;
    cs.n = static_cast<int>(kv.get_int("n", 1));
    cs.eigenvalues = kv.get_doubles("eigenvalues", {});
    for (double m : kv.get_doubles("multiplicities", {})) {
        if (m != std::floor(m)) fail(ErrorCode::ConfigError, origin + ": multiplicities must be integers");
        cs.multiplicities.push_back(static_cast<int>(m));
    }
    cs.components = static_cast<int>(kv.get_int("components", 1));
    cs.validate();
    return cs.truncated(default_max_modes);
}

CrossSection CrossSection::from_file(const std::string& path)
{
    const KeyValueConfig kv = KeyValueConfig::load(path);
    std::ostringstream text;
    for (const auto& [k, v] : kv.values()) text << k << " = " << v << "\n";
    return from_text(text.str(), path);
}

CrossSection CrossSection::named(const std::string& name_or_path)
{
    if (name_or_path == "circle") return circle();
    if (name_or_path == "sphere") return sphere();
    return from_file(name_or_path);
}

void CrossSection::validate() const
{
    auto bad = [&](const std::string& why) { fail(ErrorCode::InvalidArgument, "cross-section " + name + ": " + why); };
    if (n < 1) bad("n must be >= 1");
    if (components < 1) bad("components must be >= 1");
    if (eigenvalues.empty()) bad("no eigenvalues");
    if (eigenvalues.size() != multiplicities.size()) bad("eigenvalues and multiplicities differ in length");
    if (eigenvalues[0] != 0.0) bad("first eigenvalue must be 0");
    if (multiplicities[0] != components) bad("multiplicity of eigenvalue 0 must equal components");
    for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
        if (!std::isfinite(eigenvalues[j])) bad("non-finite eigenvalue");
        if (multiplicities[j] < 1) bad("multiplicities must be positive");
        if (j > 0 && !(eigenvalues[j] < eigenvalues[j - 1])) bad("eigenvalues must be strictly decreasing");
    }
}

CrossSection CrossSection::truncated(int max_modes) const
{
    validate();
    if (max_modes < 1) fail(ErrorCode::InvalidArgument, "max_modes must be positive");
    CrossSection out = *this;
    std::size_t keep = 0;
    while (keep < eigenvalues.size() && keep < static_cast<std::size_t>(max_modes) &&
           std::abs(eigenvalues[keep]) < eigenvalue_cutoff)
        ++keep;
    keep = std::max<std::size_t>(keep, 1);
    if (keep == 1 && eigenvalues.size() > 1) out.dropped_lambda1 = eigenvalues[1];
    out.eigenvalues.resize(keep);
    out.multiplicities.resize(keep);
    return out;
}

std::vector<double> mu_exponents(const CrossSection& cs)
{
    const double half = 0.5 * (cs.n - 1);
    std::vector<double> mu;
    for (double lam : cs.eigenvalues) mu.push_back(std::sqrt(half * half - lam));
    return mu;
}

WeightWindow weight_window(const CrossSection& cs)
{
    const std::vector<double> mu = mu_exponents(cs);
    const double half = 0.5 * (cs.n - 1);
    double mu1 = std::numeric_limits<double>::infinity();
    if (mu.size() > 1) mu1 = mu[1];
    else if (cs.dropped_lambda1) mu1 = std::sqrt(half * half - *cs.dropped_lambda1);
    WeightWindow w;
    w.gamma_lo = 0.5 * (cs.n - 3);
    w.gamma_hi = std::min(mu1 - 1.0, 0.5 * (cs.n + 1));
    w.sigma0 = std::max(0.0, 0.5 * (0.5 * (cs.n + 3) - mu1));
    if (!(w.gamma_hi > w.gamma_lo)) {
        std::ostringstream msg;
        msg << "weight window (n-3)/2 < gamma < min(mu_1 - 1, (n+1)/2) is empty: mu_1 = " << mu1;
        fail(ErrorCode::EmptyWindow, msg.str());
    }
    return w;
}

std::vector<AsymptoticExponent> asymptotics_exponents(const CrossSection& cs, double gamma)
{
    const double lo = 0.5 * (cs.n - 3) - gamma;
    const double hi = 0.5 * (cs.n + 1) - gamma;
    const double centre = 0.5 * (cs.n - 1);
    const std::vector<double> mu = mu_exponents(cs);
    std::vector<AsymptoticExponent> out;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        for (int sign : {1, -1}) {
            if (sign == -1 && mu[j] == 0.0) continue;
            const double q = centre + sign * mu[j];
            if (q > lo && q < hi) out.push_back({q, static_cast<int>(j), sign});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.q < b.q; });
    return out;
}

ConeGrid::ConeGrid(double x_min, int count, double gamma) : x_min_(x_min), count_(count), gamma_(gamma)
{
    if (!(x_min > 0.0 && x_min < 1.0)) fail(ErrorCode::InvalidArgument, "x_min must lie in (0, 1)");
    if (count < min_count) {
        std::ostringstream msg;
        msg << "grid count " << count << " is below " << min_count;
        fail(ErrorCode::GridTooCoarse, msg.str());
    }
    t0_ = std::log(x_min);
    step_ = -t0_ / (count - 1);
}

RealVector ConeGrid::points() const
{
    RealVector x(count_);
    for (int i = 0; i < count_; ++i) x(i) = this->x(i);
    return x;
}

namespace {

DenseOperator assemble_block(const ConeGrid& grid, int n, double eigenvalue, bool augmented, const std::string& label)
{
    const int m = grid.count();
    const int off = augmented ? 1 : 0;
    const double h = grid.step();
    const double drift = 0.5 * (n - 1) / h;
    if (!(1.0 / (h * h) > drift)) fail(ErrorCode::GridTooCoarse, "radial step too large for a monotone stencil");

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + off, m + off);
    if (augmented) {
        const double kappa = 1.0 / (grid.x(0) * grid.x(0) * h * h);
        a(0, 0) = -kappa;
        a(0, 1) = kappa;
    }
    for (int i = 0; i < m; ++i) {
        const int r = i + off;
        const double s = 1.0 / (grid.x(i) * grid.x(i));
        double lower = s * (1.0 / (h * h) - drift);
        const double upper = s * (1.0 / (h * h) + drift);
        a(r, r) = s * (-2.0 / (h * h) + eigenvalue);
        if (i == m - 1) {
            lower += upper; // reflecting ghost u_m = u_{m-2}
        } else {
            a(r, r + 1) = upper;
        }
        if (i > 0 || augmented) a(r, r - 1) = lower;
    }
    RealVector w(m + off);
    w(0) = 1.0;
    for (int k = 0; k + 1 < m + off; ++k) w(k + 1) = w(k) * a(k, k + 1) / a(k + 1, k);
    return DenseOperator(a.cast<complex<double>>(), w, label);
}

} // namespace

ConeOperator::ConeOperator(CrossSection cs, ConeGrid grid, Extension extension, std::vector<ModeBlock> blocks)
    : cs_(std::move(cs)), grid_(grid), extension_(extension), blocks_(std::move(blocks))
{
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b)
        for (int c = 0; c < blocks_[b].multiplicity; ++c) instances_.push_back({b, c});
}

Eigen::Index ConeOperator::dim(int max_blocks) const
{
    const int nb = max_blocks < 0 ? static_cast<int>(blocks_.size()) : std::min<int>(max_blocks, blocks_.size());
    Eigen::Index d = 0;
    for (int b = 0; b < nb; ++b) d += blocks_[b].laplacian.dim() * blocks_[b].multiplicity;
    return d;
}

DenseOperator ConeOperator::negative_laplacian(int max_blocks) const
{
    const int nb = max_blocks < 0 ? static_cast<int>(blocks_.size()) : std::min<int>(max_blocks, blocks_.size());
    const Eigen::Index d = dim(nb);
    Matrix a = Matrix::Zero(d, d);
    RealVector w(d);
    Eigen::Index at = 0;
    for (int b = 0; b < nb; ++b) {
        const DenseOperator& blk = blocks_[b].laplacian;
        const Eigen::Index k = blk.dim();
        for (int c = 0; c < blocks_[b].multiplicity; ++c) {
            a.block(at, at, k, k) = -blk.entries();
            w.segment(at, k) = *blk.inner_weights();
            at += k;
        }
    }
    return DenseOperator(std::move(a), std::move(w), "-Delta");
}

ConeOperator assemble_cone_laplacian(const CrossSection& cs, const ConeGrid& grid, Extension extension)
{
    cs.validate();
    if (extension == Extension::with_C_omega) {
        const WeightWindow w = weight_window(cs);
        if (!w.contains(grid.gamma())) {
            std::ostringstream msg;
            msg << "gamma = " << grid.gamma() << " outside the weight window (n-3)/2 < gamma < min(mu_1 - 1, (n+1)/2) = ("
                << w.gamma_lo << ", " << w.gamma_hi << ")";
            fail(ErrorCode::InvalidArgument, msg.str());
        }
    }
    std::vector<ModeBlock> blocks;
    for (int j = 0; j < cs.mode_count(); ++j) {
        const bool augmented = j == 0 && extension == Extension::with_C_omega;
        blocks.push_back({j, cs.eigenvalues[j], cs.multiplicities[j], augmented,
                          assemble_block(grid, cs.n, cs.eigenvalues[j], augmented, "Delta_" + std::to_string(j))});
    }
    return ConeOperator(cs, grid, extension, std::move(blocks));
}

ConeFunction ConeFunction::zero(const ConeOperator& op)
{
    ConeFunction u;
    u.coefficients.assign(op.instances().size(), Vector::Zero(op.grid().count()));
    u.c_omega_part.assign(op.cross_section().components, 0.0);
    return u;
}

ConeFunction ConeFunction::radial(const ConeOperator& op, const Vector& u_h, complex<double> c_omega)
{
    if (u_h.size() != op.grid().count()) fail(ErrorCode::DimensionMismatch, "radial profile length differs from grid count");
    ConeFunction u = zero(op);
    for (int r = 0; r < op.cross_section().components; ++r) {
        u.coefficients[r] = u_h;
        u.c_omega_part[r] = c_omega;
    }
    return u;
}

Vector ConeFunction::block_vector(const ConeOperator& op, int instance) const
{
    const ModeInstance& inst = op.instances().at(instance);
    const ModeBlock& blk = op.blocks()[inst.block];
    const Vector& uh = coefficients.at(instance);
    if (!blk.augmented) return uh;
    const complex<double> c = c_omega_part.at(inst.copy);
    Vector v(uh.size() + 1);
    v(0) = c;
    v.tail(uh.size()) = uh.array() + c;
    return v;
}

void ConeFunction::set_block_vector(const ConeOperator& op, int instance, const Vector& v)
{
    const ModeInstance& inst = op.instances().at(instance);
    const ModeBlock& blk = op.blocks()[inst.block];
    if (v.size() != blk.laplacian.dim()) fail(ErrorCode::DimensionMismatch, "block vector length mismatch");
    if (!blk.augmented) {
        coefficients.at(instance) = v;
        return;
    }
    const complex<double> c = v(0);
    c_omega_part.at(inst.copy) = c;
    coefficients.at(instance) = v.tail(v.size() - 1).array() - c;
}

bool ConeFunction::is_radial(const ConeOperator& op) const
{
    for (std::size_t r = 0; r < coefficients.size(); ++r)
        if (op.instances()[r].block != 0 && coefficients[r].cwiseAbs().maxCoeff() != 0.0) return false;
    return true;
}

namespace {

/// Second-order d/dt on a uniform grid, one-sided at the ends.
Vector log_derivative(const Vector& u, double h)
{
    const Eigen::Index m = u.size();
    Vector d(m);
    for (Eigen::Index i = 1; i + 1 < m; ++i) d(i) = (u(i + 1) - u(i - 1)) / (2.0 * h);
    d(0) = (-3.0 * u(0) + 4.0 * u(1) - u(2)) / (2.0 * h);
    d(m - 1) = (3.0 * u(m - 1) - 4.0 * u(m - 2) + u(m - 3)) / (2.0 * h);
    return d;
}

} // namespace

double mellin_norm(const ConeFunction& u, int s, double gamma, const ConeOperator& op)
{
    if (s < 0 || s > 2) fail(ErrorCode::UnsupportedSmoothness, "Mellin norm only for s in {0, 1, 2}");
    if (u.coefficients.size() != op.instances().size()) fail(ErrorCode::DimensionMismatch, "function does not match operator");
    const ConeGrid& g = op.grid();
    const int m = g.count();
    const double h = g.step();
    const double power = op.cross_section().n + 1 - 2.0 * gamma;
    RealVector weight(m);
    for (int i = 0; i < m; ++i) weight(i) = (i == 0 || i == m - 1 ? 0.5 : 1.0) * h * std::exp(power * g.t(i));

    double best = 0.0;
    for (int k = 0; k <= s; ++k) {
        double total = 0.0;
        for (std::size_t r = 0; r < u.coefficients.size(); ++r) {
            Vector d = u.coefficients[r];
            if (d.size() != m) fail(ErrorCode::DimensionMismatch, "coefficient length differs from grid count");
            for (int q = 0; q < k; ++q) d = log_derivative(d, h);
            const double lam = op.blocks()[op.instances()[r].block].eigenvalue;
            total += std::pow(1.0 + std::abs(lam), s - k) * (weight.array() * d.array().abs2()).sum();
        }
        best = std::max(best, total);
    }
    return std::sqrt(best);
}

TipDecayFit tip_decay_fit(const ConeFunction& u, const ConeGrid& grid, double x_a, double x_b)
{
    if (!(x_a < x_b)) fail(ErrorCode::InvalidArgument, "fit window needs x_a < x_b");
    std::vector<double> xs, ys;
    for (int i = 0; i < grid.count(); ++i) {
        const double x = grid.x(i);
        if (x < x_a * (1 - 1e-12) || x > x_b * (1 + 1e-12)) continue;
        double v = 0.0;
        for (const auto& c : u.coefficients) v = std::max(v, std::abs(c(i)));
        if (!(v > 0.0)) continue;
        xs.push_back(grid.t(i));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 2) fail(ErrorCode::WindowEmpty, "fewer than two nonzero grid values in the fit window");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    TipDecayFit fit;
    fit.points = static_cast<int>(xs.size());
    fit.alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - fit.alpha * sx) / n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double e = ys[k] - (intercept + fit.alpha * xs[k]);
        ss_res += e * e;
        ss_tot += (ys[k] - sy / n) * (ys[k] - sy / n);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

double dilation_covariance_check(const ConeOperator& op, complex<double> lambda, int shift_steps,
                                 const DilationOptions& options)
{
    const int m = op.grid().count();
    if (shift_steps < 0) fail(ErrorCode::InvalidArgument, "shift_steps must be >= 0");
    if (4 * shift_steps >= m) fail(ErrorCode::ShiftTooLarge, "shift_steps must stay below count / 4");
    if (options.block < 0 || options.block >= static_cast<int>(op.blocks().size()))
        fail(ErrorCode::InvalidArgument, "no such mode block");
    const ModeBlock& blk = op.blocks()[options.block];
    const Matrix& a = blk.laplacian.entries();
    const int off = blk.offset();
    const int k = shift_steps;
    const double rho = std::exp(k * op.grid().step());
    const double eta = 0.5 * (op.cross_section().n + 1) - op.grid().gamma();
    const double scale_in = std::pow(rho, -eta);
    const double scale_out = std::pow(rho, 2.0 + eta);

    int lo = k + 1, hi = m - k - 2;
    if (options.support) {
        lo = std::max(lo, options.support->first);
        hi = std::min(hi, options.support->second);
    }
    if (lo > hi) fail(ErrorCode::WindowEmpty, "support window has no interior rows");
    const int row_lo = 1, row_hi = m - k - 2;

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0;
    const Eigen::Index d = a.rows();
    for (int trial = 0; trial < options.trials; ++trial) {
        Vector u = Vector::Zero(d);
        for (int i = lo; i <= hi; ++i) {
            const double re = unif(rng);
            const double im = unif(rng);
            u(i + off) = complex<double>(re, im);
        }
        const Vector lhs = lambda * u - a * u;
        Vector w = Vector::Zero(d);
        for (int i = k; i < m; ++i) w(i + off) = scale_in * u(i - k + off);
        const Vector y = (lambda / (rho * rho)) * w - a * w;
        double diff = 0.0, size = 0.0;
        for (int i = row_lo; i <= row_hi; ++i) {
            const complex<double> rhs = scale_out * y(i + k + off);
            diff = std::max(diff, std::abs(lhs(i + off) - rhs));
            size = std::max(size, std::abs(lhs(i + off)));
        }
        if (size > 0.0) worst = std::max(worst, diff / size);
    }
    return worst;
}

std::pair<RealVector, Matrix> block_eigensystem(const DenseOperator& block)
{
    const Matrix frame = block.unitary_frame();
    const Eigen::MatrixXd sym = -0.5 * (frame + frame.transpose()).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) fail(ErrorCode::SolveFailed, "symmetric eigensolver did not converge");
    Matrix v = es.eigenvectors().cast<complex<double>>();
    if (block.inner_weights()) v = block.inner_weights()->cwiseSqrt().cwiseInverse().asDiagonal() * v;
    return {es.eigenvalues(), v};
}

SpectrumReport spectrum_check(const ConeOperator& op)
{
    SpectrumReport report;
    const double h = op.grid().step();
    const double kernel_tol = 1e-8 * 4.0 / (h * h);
    report.min_eigenvalue = std::numeric_limits<double>::infinity();
    report.max_eigenvalue = -std::numeric_limits<double>::infinity();
    for (const ModeBlock& blk : op.blocks()) {
        BlockSpectrum bs;
        bs.j = blk.j;
        bs.multiplicity = blk.multiplicity;
        const Matrix frame = blk.laplacian.unitary_frame();
        bs.symmetry_defect = (frame - frame.adjoint()).norm() / frame.norm();
        const RealVector eig = block_eigensystem(blk.laplacian).first;
        bs.eigenvalues.assign(eig.data(), eig.data() + eig.size());
        const double scale = eig.cwiseAbs().maxCoeff();
        for (double e : bs.eigenvalues) {
            if (std::abs(e) <= kernel_tol) ++bs.kernel_count;
            if (e < -1e-8 * scale && std::abs(e) > kernel_tol) report.nonnegative = false;
        }
        if (bs.symmetry_defect > 1e-10) report.symmetric = false;
        report.kernel_dim += bs.kernel_count * blk.multiplicity;
        report.min_eigenvalue = std::min(report.min_eigenvalue, eig.minCoeff());
        report.max_eigenvalue = std::max(report.max_eigenvalue, eig.maxCoeff());
        report.blocks.push_back(std::move(bs));
    }
    report.expected_kernel_dim = op.extension() == Extension::with_C_omega ? op.cross_section().components : 0;
    return report;
}

} // namespace conefrac
