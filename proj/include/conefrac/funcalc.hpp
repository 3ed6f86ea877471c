#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "conefrac/linop.hpp"
#include "conefrac/quadrature.hpp"

namespace conefrac {

enum class PowerMethod { balakrishnan, eigen_oracle, resolvent_limit };

/// How resolvents (A + s)^{-1} are produced at quadrature nodes.
/// `dense_lu` factorizes at every node. `spectral` diagonalizes A once and
/// runs the same quadrature on each eigenvalue; it requires a well
/// conditioned eigenbasis and is what the cone layer uses.
enum class ResolventBackend { dense_lu, spectral };

struct PowerSpec {
    double sigma = 0.5;
    double shift_c = 0.0;
    PowerMethod method = PowerMethod::balakrishnan;
    ResolventBackend backend = ResolventBackend::dense_lu;
};

/// Coarse location of the spectrum, used to size default quadrature windows.
struct SpectralBounds {
    double min_modulus = 0.0;
    double max_modulus = 0.0;
    /// max |arg a| over eigenvalues a
    double max_angle = 0.0;
    double min_real = 0.0;
};

SpectralBounds spectral_bounds(const Vector& eigenvalues);
SpectralBounds spectral_bounds(const DenseOperator& op);

/// Tolerance for the node-doubling convergence check.
inline constexpr double quadrature_tolerance = 1e-7;

// (A + c)^sigma through s^{sigma-1}(A+c)(A+c+s)^{-1}.
DenseOperator frac_power(const DenseOperator& op, const PowerSpec& spec,
                         const std::optional<QuadratureRule>& rule = std::nullopt);

/// (A + c)^{-sigma} through s^{-sigma}(A+c+s)^{-1}.
DenseOperator inv_frac_power(const DenseOperator& op, const PowerSpec& spec,
                             const std::optional<QuadratureRule>& rule = std::nullopt);

/// Default half-line rules used by frac_power / inv_frac_power.
QuadratureRule default_power_rule(const SpectralBounds& bounds, double sigma, bool inverse);

enum class ResolventPath { automatic, half_line, sector_ray };

struct FracResolventOptions {
    ResolventPath path = ResolventPath::automatic;
    /// Ray angle for the sector path; chosen inside the admissible window when absent.
    std::optional<double> theta_contour;
    /// Radians kept between arg(lambda) and pi(1 - sigma) before leaving the half line.
    double switch_margin = 0.05;
};

/// Admissible ray angles (lo, hi) for the sector path at lambda; empty when lo >= hi.
std::pair<double, double> admissible_ray_window(double sigma, std::complex<double> lambda, double spectrum_angle);

/// (A^sigma + lambda)^{-1} v through the resolvent of A alone.
Vector frac_resolvent_apply(const DenseOperator& op, double sigma, std::complex<double> lambda, const Vector& v,
                            const FracResolventOptions& options = {});

/// (A + c)^{it}.
DenseOperator imaginary_power(const DenseOperator& op, double t, double c,
                              const std::optional<QuadratureRule>& rule = std::nullopt);

using ScalarFunction = std::function<std::complex<double>(std::complex<double>)>;

/// f(-A) = (1 / 2 pi i) * integral over Gamma_theta of f(lambda)(A + lambda)^{-1}.
DenseOperator hinfty_eval(const DenseOperator& op, const ScalarFunction& f, double theta,
                          const std::optional<QuadratureRule>& rule = std::nullopt);

QuadratureRule default_sector_rule(const SpectralBounds& bounds, double theta);

/// (A + c)^z for Re z < 0 via the Dunford integral of (-lambda)^z; Re z == 0 is
/// routed to imaginary_power.
DenseOperator complex_power(const DenseOperator& op, std::complex<double> z, double c,
                            const std::optional<QuadratureRule>& rule = std::nullopt);

struct ShiftComparisonSample {
    double c = 0.0;
    double measured = 0.0;
    double envelope = 0.0;
};

struct ShiftComparisonReport {
    std::vector<ShiftComparisonSample> samples;
    double fitted_m = 0.0;
    /// least-squares slope of log(measured) against log(c)
    double slope = 0.0;
    bool scaling_holds = false;
};

/// Measures ||(A + c)^sigma - A^sigma|| against the envelope M c^sigma.
ShiftComparisonReport shift_comparison_probe(const DenseOperator& op, double sigma, const std::vector<double>& c_values);

/// Principal branch power with 0^z = 0 for Re z > 0.
std::complex<double> principal_pow(std::complex<double> base, std::complex<double> exponent);

} // namespace conefrac
