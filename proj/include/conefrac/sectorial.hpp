#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "conefrac/linop.hpp"

namespace conefrac {

struct SectorSample {
    std::complex<double> lambda;
    double bound_value = 0.0;
};

struct SectorProbeReport {
    double angle_theta = 0.0;
    std::vector<SectorSample> samples;
    double estimated_K = 0.0;
    double min_modulus_sampled = 0.0;
    double max_modulus_sampled = 0.0;
    /// samples dropped because A + lambda was numerically singular
    std::vector<std::complex<double>> skipped;
    /// set when a sample hit the spectrum, when -A has an eigenvalue inside the
    /// sampled sector, or when estimated_K exceeds 1e6
    bool not_sectorial_suspected = false;
};

struct SectorProbeOptions {
    int rays = 9;
    int radial_samples = 40;
    double r_min = 1e-3;
    double r_max = 1e3;
};

/// |lambda| ||(A + lambda)^{-1}|| over rays psi in [-theta, theta].
SectorProbeReport sectorial_bound_probe(const DenseOperator& op, double theta, const SectorProbeOptions& options = {});

struct RBoundEstimate {
    int family_size = 0;
    int trials = 0;
    int vector_dim = 0;
    double max_ratio = 0.0;
    /// max_k ||T_k||, which bounds the R-bound in a Hilbert metric
    double uniform_norm_bound = 0.0;
    /// largest ratio among trials with a single operator
    double max_single_ratio = 0.0;
};

struct RBoundOptions {
    int trials = 64;
    int vectors_per_trial = 1;
    std::uint64_t seed = 0;
    /// draw sign patterns at random even when exhaustive enumeration is possible
    bool force_monte_carlo = false;
    /// fixed subset size; 0 draws it uniformly in [1, family size]
    int subset_size = 0;
};

inline constexpr int exhaustive_sign_limit = 12;
inline constexpr int monte_carlo_sign_draws = 4096;

RBoundEstimate rademacher_rbound_estimate(const std::vector<DenseOperator>& family, const RBoundOptions& options);

struct DecayFit {
    double C_fit = 0.0;
    double exponent_fit = 0.0;
    std::vector<SectorSample> samples;
};

struct DecayFitOptions {
    int samples = 40;
    double r_min = 1.0;
    double r_max = 1e6;
};

/// Least-squares fit of log ||A^sigma (A + lambda)^{-1}|| against log(1 + |lambda|)
/// on the rays arg lambda = 0, +-theta.
DecayFit power_resolvent_decay_fit(const DenseOperator& op, double sigma, double theta,
                                   const DecayFitOptions& options = {});

struct LaurentExpansion {
    std::complex<double> pole;
    int order = 1;
    /// B_k for k = -order - 1 .. k_max; the extra lowest index should vanish
    std::map<int, Matrix> coefficients;
    double contour_radius = 0.0;
    int contour_nodes = 0;
};

/// Half the distance from lambda0 to the nearest other point of spec(-A).
double default_laurent_radius(const DenseOperator& op, std::complex<double> lambda0);

LaurentExpansion laurent_coefficients(const DenseOperator& op, std::complex<double> lambda0, int order, int k_max,
                                      double contour_radius = 0.0, int contour_nodes = 128);

/// Sum of (lambda - lambda0)^k B_k.
Matrix laurent_resum(const LaurentExpansion& expansion, std::complex<double> lambda);

/// Residual norms of the Laurent identities, keyed by name, plus "max".
std::map<std::string, double> verify_laurent_identities(const LaurentExpansion& expansion, const DenseOperator& op);

struct SimplePoleReport {
    bool is_simple = false;
    double sup_value = 0.0;
    double max_decade_growth = 0.0;
};

/// Watches ||lambda (A + lambda)^{-1}|| as |lambda| goes from 1 down to modulus_floor.
SimplePoleReport simple_pole_check(const DenseOperator& op, double modulus_floor = 1e-6, double theta = 0.25 * 3.141592653589793);

} // namespace conefrac
