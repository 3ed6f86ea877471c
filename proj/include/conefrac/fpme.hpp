#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "conefrac/cone.hpp"
#include "conefrac/linop.hpp"
#include "conefrac/sectorial.hpp"

namespace conefrac {

struct FpmeConfig {
    double sigma = 0.5;
    double m = 1.0;
    double dt = 1e-3;
    double t_end = 0.1;
    double positivity_floor = 1e-10;
    /// record a snapshot every this many steps (the final step is always kept)
    int snapshot_every = 10;
    /// grid window for the tip exponent diagnostic
    double fit_x_a = 1e-5;
    double fit_x_b = 1e-2;

    void validate() const;
};

/// Fractional generator L_sigma = (-Delta)^sigma, built block by block.
///
/// Blocks with a kernel go through the resolvent-limit route. Applying the
/// generator first removes the constant fixed by the C_omega unknown, so the
/// kernel maps to zero exactly rather than to quadrature noise.
class FracGenerator {
public:
    FracGenerator(const ConeOperator& op, double sigma);

    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] const Matrix& block(int b) const { return blocks_.at(b); }
    [[nodiscard]] int block_count() const noexcept { return static_cast<int>(blocks_.size()); }
    /// L_b (v - v_c 1) for augmented blocks, L_b v otherwise.
    [[nodiscard]] Vector apply(int b, const Vector& v) const;
    /// Block-diagonal generator on the first max_blocks modes, in the cone metric.
    [[nodiscard]] DenseOperator assembled(int max_blocks = -1) const;
    /// max_b ||L_b|| in the block metric.
    [[nodiscard]] double norm() const noexcept { return norm_; }

private:
    const ConeOperator* op_;
    double sigma_;
    std::vector<Matrix> blocks_;
    std::vector<bool> augmented_;
    double norm_ = 0.0;
};

FracGenerator build_frac_generator(const ConeOperator& op, double sigma);

/// Physical values on (radial point, collocation column). Circle cross-sections
/// use equispaced angles; other cross-sections only support radial functions,
/// with one column per boundary component.
Eigen::MatrixXcd synthesize(const ConeOperator& op, const ConeFunction& u);
/// Inverse of synthesize; `c_omega` gives the constant part per component.
ConeFunction analyze(const ConeOperator& op, const Eigen::MatrixXcd& values,
                     const std::vector<std::complex<double>>& c_omega);
/// Values of the C_omega unknowns, one per component (the tip ghost value).
std::vector<std::complex<double>> tip_values(const ConeFunction& u);

/// Eigenpair `index` (ascending) of -Delta on the mode-0 block; the vector is
/// scaled to unit max modulus with a positive largest entry.
struct RadialMode {
    double kappa = 0.0;
    Vector block_vector;
};
RadialMode radial_mode(const ConeOperator& op, int index);

struct StepResult {
    ConeFunction w;
    int clamped = 0;
};

/// One frozen-coefficient implicit Euler step for w' + m w^{(m-1)/m} L_sigma w = 0.
StepResult step_semi_implicit(const ConeFunction& w, const FpmeConfig& cfg, const FracGenerator& generator,
                              const ConeOperator& op);

struct StepDiagnostics {
    double min_value = 0.0;
    double sup_norm = 0.0;
    double h0gamma_norm = 0.0;
    /// NaN when the fit window holds no usable points
    double tip_alpha = 0.0;
    int clamped = 0;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<ConeFunction> snapshots;
    std::vector<StepDiagnostics> diagnostics;
    int steps = 0;
    int clamp_count = 0;
    /// dt * ||L_sigma||
    double stability_product = 0.0;
    std::vector<std::string> warnings;
    /// set when a step failed; the record then holds the partial trajectory
    std::optional<std::string> failure;
};

/// Applies f pointwise in physical space.
ConeFunction map_pointwise(const ConeOperator& op, const ConeFunction& u,
                           const std::function<std::complex<double>(std::complex<double>)>& f);

TrajectoryRecord run(const ConeFunction& u0, const FpmeConfig& cfg, const ConeOperator& op);
TrajectoryRecord run(const ConeFunction& u0, const FpmeConfig& cfg, const ConeOperator& op,
                     const FracGenerator& generator);

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record);
/// x_i as rows, collocation columns.
void write_snapshot_csv(std::ostream& out, const ConeOperator& op, const ConeFunction& u);

struct CommutatorOptions {
    double c = 1.0;
    double theta = 0.5 * 3.141592653589793;
    std::vector<double> lambda_moduli{1.0, 10.0, 100.0, 1e3, 1e4};
    std::vector<double> mu_moduli{1.0, 10.0, 100.0, 1e3, 1e4};
    /// number of mode blocks included in the operator
    int max_blocks = 1;
};

struct CommutatorReport {
    double commutator_norm = 0.0;
    /// (|lambda|, |mu|, value) samples of ||[A, (W + mu)^{-1}] (A + lambda)^{-1}||
    std::vector<std::array<double, 3>> samples;
    double lambda_exponent = 0.0;
    double mu_exponent = 0.0;
    double alpha = 0.0;
    bool lambda_bound_holds = false;
};

/// ||A^rho [W, A^sigma] A^{-nu}|| with A = c - Delta, plus the decay fit of the
/// commutator-resolvent product with A^sigma and B = W.
CommutatorReport commutator_decay_scan(const ConeFunction& w_mult, const ConeOperator& op, double sigma, double nu,
                                       double rho, const CommutatorOptions& options = {});

struct LinearizationReport {
    std::vector<double> c_values;
    std::vector<SectorProbeReport> probes;
    std::vector<double> growth;
    /// smallest c whose probe is stable; absent when none is
    std::optional<double> c_star;
    RBoundEstimate rbound;
};

/// Sector probes of W L_sigma + c over a grid of shifts.
LinearizationReport linearization_sectoriality_probe(const ConeFunction& w_mult, const ConeOperator& op, double sigma,
                                                     const std::vector<double>& c_grid, double theta,
                                                     const SectorProbeOptions& probe = {}, std::uint64_t seed = 0);

} // namespace conefrac
