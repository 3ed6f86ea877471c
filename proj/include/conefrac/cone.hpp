#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conefrac/linop.hpp"

namespace conefrac {

/// Spectral data of the cross-section Laplacian: distinct eigenvalues
/// 0 = lambda_0 > lambda_1 > ... with multiplicities, and the number of
/// boundary components (multiplicity of lambda_0).
struct CrossSection {
    std::string name;
    int n = 1;
    std::vector<double> eigenvalues;
    std::vector<int> multiplicities;
    int components = 1;
    /// first nonzero eigenvalue when truncation kept only the zero mode; the
    /// weight window still depends on it
    std::optional<double> dropped_lambda1;

    /// Unit circle, lambda_j = -j^2 (multiplicity 1 for j = 0, else 2).
    static CrossSection circle(int max_modes = default_max_modes);
    /// Unit 2-sphere, lambda_l = -l(l+1) (multiplicity 2l + 1).
    static CrossSection sphere(int max_modes = default_max_modes);
    /// Reads keys n, eigenvalues, multiplicities, components.
    static CrossSection from_file(const std::string& path);
    static CrossSection from_text(const std::string& text, const std::string& origin = "<string>");
    /// "circle", "sphere" or a file path.
    static CrossSection named(const std::string& name_or_path);

    /// Throws InvalidArgument when the invariants fail.
    void validate() const;
    /// Keeps modes up to the first with |lambda| >= 1e4, at most max_modes of them.
    [[nodiscard]] CrossSection truncated(int max_modes) const;
    [[nodiscard]] int mode_count() const { return static_cast<int>(eigenvalues.size()); }

    static constexpr int default_max_modes = 64;
    static constexpr double eigenvalue_cutoff = 1e4;
};

/// mu_j = sqrt(((n-1)/2)^2 - lambda_j) per distinct eigenvalue.
std::vector<double> mu_exponents(const CrossSection& cs);

struct WeightWindow {
    double gamma_lo = 0.0;
    double gamma_hi = 0.0;
    double sigma0 = 0.0;
    [[nodiscard]] bool contains(double gamma) const { return gamma > gamma_lo && gamma < gamma_hi; }
};

/// (n-3)/2 < gamma < min(mu_1 - 1, (n+1)/2) and sigma0 = max(0, ((n+3)/2 - mu_1) / 2).
WeightWindow weight_window(const CrossSection& cs);

struct AsymptoticExponent {
    double q = 0.0;
    int j = 0;
    int sign = 1;
};

/// q_j^{+-} = (n-1)/2 +- mu_j inside ((n-3)/2 - gamma, (n+1)/2 - gamma), sorted by q.
/// When mu_j = 0 the two coincide and are listed once.
std::vector<AsymptoticExponent> asymptotics_exponents(const CrossSection& cs, double gamma);

/// Log-uniform radial grid x_i = exp(t_i), t_i equally spaced on [log x_min, 0].
class ConeGrid {
public:
    ConeGrid(double x_min, int count, double gamma);

    [[nodiscard]] double x_min() const noexcept { return x_min_; }
    [[nodiscard]] int count() const noexcept { return count_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double step() const noexcept { return step_; }
    [[nodiscard]] double t(int i) const noexcept { return t0_ + step_ * i; }
    [[nodiscard]] double x(int i) const { return std::exp(t(i)); }
    [[nodiscard]] RealVector points() const;

    static constexpr int min_count = 32;

private:
    double x_min_;
    int count_;
    double gamma_;
    double t0_;
    double step_;
};

enum class Extension { minimal, with_C_omega };

/// Radial block of one distinct cross-section eigenvalue. Rows are ordered
/// from the tip outwards; an augmented block carries the C_omega unknown as
/// its first row.
struct ModeBlock {
    int j = 0;
    double eigenvalue = 0.0;
    int multiplicity = 1;
    bool augmented = false;
    /// the discrete Delta on this mode, in the metric that makes it self-adjoint
    DenseOperator laplacian;

    [[nodiscard]] int offset() const { return augmented ? 1 : 0; }
};

/// One copy of a mode inside the direct sum (copies come from multiplicity).
struct ModeInstance {
    int block = 0;
    int copy = 0;
};

class ConeOperator {
public:
    ConeOperator(CrossSection cs, ConeGrid grid, Extension extension, std::vector<ModeBlock> blocks);

    [[nodiscard]] const CrossSection& cross_section() const noexcept { return cs_; }
    [[nodiscard]] const ConeGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] Extension extension() const noexcept { return extension_; }
    [[nodiscard]] const std::vector<ModeBlock>& blocks() const noexcept { return blocks_; }
    [[nodiscard]] const std::vector<ModeInstance>& instances() const noexcept { return instances_; }

    /// -Delta restricted to the first `max_blocks` distinct modes (all copies),
    /// as one block-diagonal operator with its weighted metric.
    [[nodiscard]] DenseOperator negative_laplacian(int max_blocks = -1) const;
    /// Dimension of negative_laplacian(max_blocks).
    [[nodiscard]] Eigen::Index dim(int max_blocks = -1) const;

private:
    CrossSection cs_;
    ConeGrid grid_;
    Extension extension_;
    std::vector<ModeBlock> blocks_;
    std::vector<ModeInstance> instances_;
};

/// Per-mode radial discretization of x^{-2}((x d_x)^2 + (n-1) x d_x + lambda_j).
/// The outer end x = 1 reflects; the tip end uses a zero ghost value except
/// for mode 0 under with_C_omega, whose ghost value is the C_omega unknown.
ConeOperator assemble_cone_laplacian(const CrossSection& cs, const ConeGrid& grid, Extension extension);

/// u = u_H + u_C with u_C = c_omega[k] on component k (omega = 1 on the grid).
/// coefficients[r] holds the u_H values of mode instance r at the grid points.
struct ConeFunction {
    std::vector<Vector> coefficients;
    std::vector<std::complex<double>> c_omega_part;

    static ConeFunction zero(const ConeOperator& op);
    /// Mode-0 (radial) function with the given grid values of u_H.
    static ConeFunction radial(const ConeOperator& op, const Vector& u_h, std::complex<double> c_omega = 0.0);

    /// Stacks instances of `block` copies into the block's unknown vector.
    [[nodiscard]] Vector block_vector(const ConeOperator& op, int instance) const;
    void set_block_vector(const ConeOperator& op, int instance, const Vector& v);
    /// Only mode-0 instances carry anything.
    [[nodiscard]] bool is_radial(const ConeOperator& op) const;
};

/// Discrete H^{s,gamma} norm of u_H, s in {0, 1, 2}.
double mellin_norm(const ConeFunction& u, int s, double gamma, const ConeOperator& op);

struct TipDecayFit {
    double alpha = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Slope of log max_r |u_H,r(x)| against log x over grid points in [x_a, x_b].
TipDecayFit tip_decay_fit(const ConeFunction& u, const ConeGrid& grid, double x_a, double x_b);

struct DilationOptions {
    int block = 0;
    int trials = 20;
    std::uint64_t seed = 1;
    /// grid-index window for the random support; intersected with the interior
    std::optional<std::pair<int, int>> support;
};

/// Max relative mismatch of (lambda - Delta) u against rho^2 K (lambda/rho^2 - Delta) K^{-1} u
/// with the normalized dilation K, rho = exp(k h), on interior rows.
double dilation_covariance_check(const ConeOperator& op, std::complex<double> lambda, int shift_steps,
                                 const DilationOptions& options = {});

struct BlockSpectrum {
    int j = 0;
    int multiplicity = 1;
    std::vector<double> eigenvalues;
    double symmetry_defect = 0.0;
    int kernel_count = 0;
};

struct SpectrumReport {
    std::vector<BlockSpectrum> blocks;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    /// counted with multiplicity
    int kernel_dim = 0;
    int expected_kernel_dim = 0;
    bool nonnegative = true;
    bool symmetric = true;
    [[nodiscard]] bool ok() const { return nonnegative && symmetric && kernel_dim == expected_kernel_dim; }
};

/// Eigenvalues of -A_j per block in the self-adjoint frame, kernel counts and flags.
SpectrumReport spectrum_check(const ConeOperator& op);

/// Ascending eigenpairs of the self-adjoint block -A_j, eigenvectors in the
/// original (unweighted) coordinates.
std::pair<RealVector, Matrix> block_eigensystem(const DenseOperator& block);

} // namespace conefrac
