#include "conefrac/funcalc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "conefrac/error.hpp"

namespace conefrac {

using std::complex;
using std::numbers::pi;

namespace {

/// Tail length in the log variable: e^{-37} is below double resolution.
constexpr double tail = 37.0;
constexpr int default_doublings = 3;
constexpr std::size_t max_nodes = 400000;
const complex<double> I1(0.0, 1.0);

double angle_gap(double a, double b)
{
    double d = std::fmod(std::abs(a - b), 2.0 * pi);
    return std::min(d, 2.0 * pi - d);
}

double norm_of(const Matrix& m) { return m.norm(); }
double norm_of(const Vector& v) { return v.norm(); }

/// Sums over `rule` and its midpoint companion until the two agree to the
/// quadrature tolerance, refining at most `doublings` times.
template <typename Sum>
auto integrate_checked(QuadratureRule rule, Sum&& sum, int doublings, const char* what, double floor = 0.0)
{
    auto coarse = sum(rule);
    for (int round = 0;; ++round) {
        const auto mid = sum(rule.midpoints());
        auto fine = decltype(coarse)(0.5 * (coarse + mid));
        const double change = norm_of(decltype(coarse)(fine - coarse));
        const double scale = std::max(norm_of(fine), floor);
        if (std::isfinite(change) && change <= quadrature_tolerance * std::max(scale, 1e-300)) return fine;
        if (!std::isfinite(change) || round >= doublings || 2 * rule.node_count() > max_nodes) {
            std::ostringstream msg;
            msg << what << ": node doubling changed the result by " << change << " (relative to " << scale
                << ") at " << rule.node_count() << " nodes";
            fail(ErrorCode::QuadratureNotConverged, msg.str());
        }
        rule = rule.refined();
        coarse = std::move(fine);
    }
}

Vector eigenvalues_of(const DenseOperator& op)
{
    const Matrix frame = op.unitary_frame();
    if ((frame - frame.adjoint()).norm() <= 1e-13 * frame.norm()) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (frame + frame.adjoint())), Eigen::EigenvaluesOnly);
        return es.eigenvalues().cast<complex<double>>();
    }
    Eigen::ComplexEigenSolver<Matrix> es(frame, false);
    return es.eigenvalues();
}

DenseOperator shifted(const DenseOperator& op, double c)
{
    if (c == 0.0) return op;
    Matrix m = op.entries();
    m.diagonal().array() += c;
    return op.with_entries(std::move(m));
}

void require_sigma(double sigma)
{
    if (!(sigma > 0.0 && sigma < 1.0)) fail(ErrorCode::InvalidArgument, "sigma must lie in (0, 1)");
}

void require_right_half_plane(const SpectralBounds& b, const char* what)
{
    // relative to the spectral scale for small operators, absolute once the
    // scale passes 1: graded operators keep small eigenvalues to full accuracy
    if (!(b.min_real > 1e-12 * std::min(b.max_modulus, 1.0)) || !(b.min_modulus > 0.0)) {
        std::ostringstream msg;
        msg << what << ": spectrum touches Re <= 0 (min Re = " << b.min_real << ")";
        fail(ErrorCode::SpectrumNotSectorial, msg.str());
    }
}

/// Integral of kernel(s) * N(B) (B + s)^{-1} ds along `rule` by one LU per
/// node, where N(B) is B when `times_operator` and I otherwise.
template <typename Kernel>
Matrix dense_integral(const DenseOperator& b, const QuadratureRule& rule, Kernel&& kernel, bool times_operator,
                      int doublings, const char* what)
{
    const Eigen::Index n = b.dim();
    const Matrix rhs = times_operator ? b.entries() : Matrix(Matrix::Identity(n, n));
    auto sum = [&](const QuadratureRule& r) {
        Matrix acc = Matrix::Zero(n, n);
        for (std::size_t k = 0; k < r.node_count(); ++k) {
            const complex<double> s = r.nodes()[k];
            const complex<double> wk = r.weights()[k] * kernel(s);
            if (wk == 0.0) continue;
            acc += wk * ShiftedFactorization(b, s).solve(rhs);
        }
        return acc;
    };
    return integrate_checked(rule, sum, doublings, what);
}

/// The same integral evaluated on each eigenvalue a + shift.
template <typename Kernel>
Vector spectral_integral(const Vector& eigenvalues, double shift, const QuadratureRule& rule, Kernel&& kernel,
                         bool times_operator, int doublings, const char* what)
{
    const Eigen::Index n = eigenvalues.size();
    auto sum = [&](const QuadratureRule& r) {
        Vector acc = Vector::Zero(n);
        for (std::size_t k = 0; k < r.node_count(); ++k) {
            const complex<double> s = r.nodes()[k];
            const complex<double> wk = r.weights()[k] * kernel(s);
            if (wk == 0.0) continue;
            for (Eigen::Index i = 0; i < n; ++i) {
                const complex<double> a = eigenvalues(i) + shift;
                acc(i) += wk * (times_operator ? a : complex<double>(1.0)) / (a + s);
            }
        }
        return acc;
    };
    return integrate_checked(rule, sum, doublings, what);
}

int doublings_for(const std::optional<QuadratureRule>& rule) { return rule ? 0 : default_doublings; }

Vector shifted_values(const Vector& eigenvalues, double c)
{
    return eigenvalues.array() + complex<double>(c);
}

/// (eigenvalue + c)^sigma for every eigenvalue via the quadrature.
Vector power_values(const Vector& eigenvalues, double sigma, double c, const std::optional<QuadratureRule>& rule)
{
    const SpectralBounds bounds = spectral_bounds(shifted_values(eigenvalues, c));
    require_right_half_plane(bounds, "frac_power");
    const QuadratureRule r = rule ? *rule : default_power_rule(bounds, sigma, false);
    const double prefactor = std::sin(pi * sigma) / pi;
    auto kernel = [&](complex<double> s) { return prefactor * std::pow(s, sigma - 1.0); };
    return spectral_integral(eigenvalues, c, r, kernel, true, doublings_for(rule), "frac_power");
}

DenseOperator balakrishnan_power(const DenseOperator& op, double sigma, double c, ResolventBackend backend,
                                 const std::optional<QuadratureRule>& rule)
{
    if (backend == ResolventBackend::spectral) {
        const EigenData eig = eigen_decompose(op);
        const Vector values = power_values(eig.eigenvalues, sigma, c, rule);
        return op.with_entries(eig.right_vectors * values.asDiagonal() * eig.left_vectors);
    }
    const DenseOperator b = shifted(op, c);
    const SpectralBounds bounds = spectral_bounds(b);
    require_right_half_plane(bounds, "frac_power");
    const QuadratureRule r = rule ? *rule : default_power_rule(bounds, sigma, false);
    const double prefactor = std::sin(pi * sigma) / pi;
    auto kernel = [&](complex<double> s) { return prefactor * std::pow(s, sigma - 1.0); };
    return op.with_entries(dense_integral(b, r, kernel, true, doublings_for(rule), "frac_power"));
}

/// Extrapolates (A + c + c_k)^sigma to c_k = 0 assuming the error expansion
/// c_k^sigma Y_sigma + c_k Y_1 + c_k^2 Y_2.
DenseOperator limit_power(const DenseOperator& op, double sigma, double c, ResolventBackend backend)
{
    std::optional<EigenData> eig;
    Vector values;
    if (backend == ResolventBackend::spectral) {
        eig = eigen_decompose(op);
        values = shifted_values(eig->eigenvalues, c);
    } else {
        values = shifted_values(eigenvalues_of(op), c);
    }
    double smallest = 1.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double m = std::abs(values(i));
        if (m > 1e-8) smallest = std::min(smallest, m);
        if (values(i).real() < -1e-8 * std::max(1.0, m)) fail(ErrorCode::SpectrumNotSectorial, "eigenvalue with Re < 0");
    }
    const double c0 = 1e-4 * smallest;
    constexpr int samples = 4;
    const double exponents[samples] = {0.0, sigma, 1.0, 2.0};
    Eigen::Matrix4d vander;
    double shifts[samples];
    for (int k = 0; k < samples; ++k) {
        shifts[k] = c0 * std::pow(0.25, k);
        for (int p = 0; p < samples; ++p) vander(p, k) = p == 0 ? 1.0 : std::pow(shifts[k], exponents[p]);
    }
    Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
    rhs(0) = 1.0;
    const Eigen::Vector4d alpha = vander.fullPivLu().solve(rhs);

    if (eig) {
        Vector acc = Vector::Zero(values.size());
        for (int k = 0; k < samples; ++k) acc += alpha(k) * power_values(eig->eigenvalues, sigma, c + shifts[k], std::nullopt);
        return op.with_entries(eig->right_vectors * acc.asDiagonal() * eig->left_vectors);
    }
    Matrix acc = Matrix::Zero(op.dim(), op.dim());
    for (int k = 0; k < samples; ++k)
        acc += alpha(k) * balakrishnan_power(op, sigma, c + shifts[k], backend, std::nullopt).entries();
    return op.with_entries(std::move(acc));
}

} // namespace

complex<double> principal_pow(complex<double> base, complex<double> exponent)
{
    if (base == 0.0) return exponent.real() > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::exp(exponent * std::log(base));
}

SpectralBounds spectral_bounds(const Vector& eigenvalues)
{
    SpectralBounds b;
    b.min_modulus = std::numeric_limits<double>::infinity();
    b.min_real = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const complex<double> a = eigenvalues(i);
        b.min_modulus = std::min(b.min_modulus, std::abs(a));
        b.max_modulus = std::max(b.max_modulus, std::abs(a));
        b.min_real = std::min(b.min_real, a.real());
        if (a != 0.0) b.max_angle = std::max(b.max_angle, std::abs(std::arg(a)));
    }
    return b;
}

SpectralBounds spectral_bounds(const DenseOperator& op) { return spectral_bounds(eigenvalues_of(op)); }

QuadratureRule default_power_rule(const SpectralBounds& bounds, double sigma, bool inverse)
{
    require_sigma(sigma);
    const double lo = std::log(bounds.min_modulus);
    const double hi = std::log(bounds.max_modulus);
    const double small_rate = inverse ? 1.0 - sigma : sigma;
    const double large_rate = inverse ? sigma : 1.0 - sigma;
    const double t_min = lo - tail / small_rate;
    const double t_max = hi + tail / large_rate;
    const double step = std::min(0.5, (pi - bounds.max_angle) / 4.0);
    return half_line_rule(t_min, t_max, nodes_for_step(t_min, t_max, step));
}

DenseOperator frac_power(const DenseOperator& op, const PowerSpec& spec, const std::optional<QuadratureRule>& rule)
{
    require_sigma(spec.sigma);
    if (spec.shift_c < 0.0) fail(ErrorCode::InvalidArgument, "shift_c must be >= 0");
    switch (spec.method) {
    case PowerMethod::eigen_oracle: {
        const EigenData eig = eigen_decompose(shifted(op, spec.shift_c));
        return op.with_entries(apply_spectral_function(eig, [&](complex<double> a) {
            return principal_pow(a, spec.sigma);
        }));
    }
    case PowerMethod::resolvent_limit:
        return limit_power(op, spec.sigma, spec.shift_c, spec.backend);
    case PowerMethod::balakrishnan:
        break;
    }
    return balakrishnan_power(op, spec.sigma, spec.shift_c, spec.backend, rule);
}

DenseOperator inv_frac_power(const DenseOperator& op, const PowerSpec& spec, const std::optional<QuadratureRule>& rule)
{
    require_sigma(spec.sigma);
    if (spec.shift_c < 0.0) fail(ErrorCode::InvalidArgument, "shift_c must be >= 0");
    const DenseOperator b = shifted(op, spec.shift_c);
    if (spec.method == PowerMethod::eigen_oracle) {
        const EigenData eig = eigen_decompose(b);
        return op.with_entries(apply_spectral_function(eig, [&](complex<double> a) {
            return principal_pow(a, -spec.sigma);
        }));
    }
    const double prefactor = std::sin(pi * spec.sigma) / pi;
    auto kernel = [&](complex<double> s) { return prefactor * std::pow(s, -spec.sigma); };
    if (spec.backend == ResolventBackend::spectral) {
        const EigenData eig = eigen_decompose(op);
        const SpectralBounds bounds = spectral_bounds(shifted_values(eig.eigenvalues, spec.shift_c));
        require_right_half_plane(bounds, "inv_frac_power");
        const QuadratureRule r = rule ? *rule : default_power_rule(bounds, spec.sigma, true);
        const Vector values =
            spectral_integral(eig.eigenvalues, spec.shift_c, r, kernel, false, doublings_for(rule), "inv_frac_power");
        return op.with_entries(eig.right_vectors * values.asDiagonal() * eig.left_vectors);
    }
    const SpectralBounds bounds = spectral_bounds(b);
    require_right_half_plane(bounds, "inv_frac_power");
    const QuadratureRule r = rule ? *rule : default_power_rule(bounds, spec.sigma, true);
    return op.with_entries(dense_integral(b, r, kernel, false, doublings_for(rule), "inv_frac_power"));
}

std::pair<double, double> admissible_ray_window(double sigma, complex<double> lambda, double spectrum_angle)
{
    require_sigma(sigma);
    const double psi = std::abs(std::arg(lambda));
    const complex<double> mirrored = std::polar(std::abs(lambda), psi);
    double lo = 0.0;
    double hi = pi - spectrum_angle;
    // poles of the kernel sit where s^sigma = -lambda e^{+-i pi sigma}; on the
    // principal sheet that needs |arg| < pi sigma
    const complex<double> w_plus = -mirrored * std::polar(1.0, pi * sigma);
    const complex<double> w_minus = -mirrored * std::polar(1.0, -pi * sigma);
    if (std::abs(std::arg(w_plus)) < pi * sigma) {
        const double a = std::arg(w_plus) / sigma;
        if (a > 0.0) lo = std::max(lo, a);
    }
    if (std::abs(std::arg(w_minus)) < pi * sigma) {
        const double b = std::arg(w_minus) / sigma;
        if (b > 0.0) hi = std::min(hi, b);
    }
    return {lo, hi};
}

Vector frac_resolvent_apply(const DenseOperator& op, double sigma, complex<double> lambda, const Vector& v,
                            const FracResolventOptions& options)
{
    require_sigma(sigma);
    if (v.size() != op.dim()) fail(ErrorCode::DimensionMismatch, "vector length differs from dim");
    const Vector eig = eigenvalues_of(op);
    const SpectralBounds bounds = spectral_bounds(eig);
    if (bounds.min_real < -1e-12 * std::max(bounds.max_modulus, 1e-300))
        fail(ErrorCode::SpectrumNotSectorial, "frac_resolvent_apply: eigenvalue with Re < 0");

    const double psi = std::arg(lambda);
    ResolventPath path = options.path;
    if (path == ResolventPath::automatic)
        path = (lambda == 0.0 || std::abs(psi) < pi * (1.0 - sigma) - options.switch_margin) ? ResolventPath::half_line
                                                                                              : ResolventPath::sector_ray;

    double ray_angle = 0.0;
    if (path == ResolventPath::sector_ray) {
        const auto [lo, hi] = admissible_ray_window(sigma, lambda, bounds.max_angle);
        double theta = options.theta_contour ? *options.theta_contour : 0.5 * (lo + hi);
        if (!(lo < hi) || !(theta > lo && theta < hi)) {
            std::ostringstream msg;
            msg << "no admissible ray for lambda = " << lambda << " (window " << lo << ", " << hi << ")";
            fail(ErrorCode::KernelPoleOnPath, msg.str());
        }
        ray_angle = psi >= 0.0 ? theta : -theta;
    }

    const complex<double> e_plus = lambda * std::polar(1.0, pi * sigma);
    const complex<double> e_minus = lambda * std::polar(1.0, -pi * sigma);
    const double prefactor = std::sin(pi * sigma) / pi;
    auto kernel = [&](complex<double> s) {
        const complex<double> ss = std::pow(s, sigma);
        const complex<double> d1 = ss + e_plus;
        const complex<double> d2 = ss + e_minus;
        if (std::abs(d1) < 1e-12 || std::abs(d2) < 1e-12)
            fail(ErrorCode::KernelPoleOnPath, "kernel denominator vanishes at a node");
        return prefactor * ss / (d1 * d2);
    };

    // step from the nearest singular direction seen from the path
    double gap = angle_gap(ray_angle, pi);
    for (Eigen::Index i = 0; i < eig.size(); ++i)
        if (eig(i) != 0.0) gap = std::min(gap, angle_gap(ray_angle, std::arg(-eig(i))));
    for (const complex<double> w : {-e_plus, -e_minus}) {
        if (lambda != 0.0 && std::abs(std::arg(w)) < pi * sigma) gap = std::min(gap, angle_gap(ray_angle, std::arg(w) / sigma));
    }
    const double lam_scale = lambda == 0.0 ? bounds.max_modulus : std::pow(std::abs(lambda), 1.0 / sigma);
    double low_scale = lam_scale;
    if (bounds.min_modulus > 0.0) low_scale = std::min(low_scale, bounds.min_modulus);
    if (!(low_scale > 0.0)) low_scale = 1.0;
    const double high_scale = std::max({lam_scale, bounds.max_modulus, low_scale});
    const double t_min = std::log(low_scale) - tail / sigma;
    const double t_max = std::log(high_scale) + tail / sigma;
    const double step = std::min(0.5, gap / 4.0);
    const QuadratureRule rule = path == ResolventPath::half_line
                                    ? half_line_rule(t_min, t_max, nodes_for_step(t_min, t_max, step))
                                    : ray_rule(ray_angle, t_min, t_max, nodes_for_step(t_min, t_max, step));

    auto sum = [&](const QuadratureRule& r) {
        Vector acc = Vector::Zero(op.dim());
        for (std::size_t k = 0; k < r.node_count(); ++k) {
            const complex<double> s = r.nodes()[k];
            acc += (r.weights()[k] * kernel(s)) * shifted_solve(op, s, v);
        }
        return acc;
    };
    return integrate_checked(rule, sum, default_doublings, "frac_resolvent_apply");
}

DenseOperator imaginary_power(const DenseOperator& op, double t, double c, const std::optional<QuadratureRule>& rule)
{
    if (c < 0.0) fail(ErrorCode::InvalidArgument, "shift c must be >= 0");
    const DenseOperator b = shifted(op, c);
    const SpectralBounds bounds = spectral_bounds(b);
    require_right_half_plane(bounds, "imaginary_power");
    const double x = pi * t;
    const double prefactor = std::abs(x) < 1e-8 ? 1.0 + x * x / 6.0 : std::sinh(x) / x;
    QuadratureRule r = [&] {
        if (rule) return *rule;
        const double t_min = std::log(bounds.min_modulus) - tail;
        const double t_max = std::log(bounds.max_modulus) + tail;
        const double step = std::min(0.5, (pi - bounds.max_angle) / 4.0) / (1.0 + 0.25 * std::abs(t));
        return half_line_rule(t_min, t_max, nodes_for_step(t_min, t_max, step));
    }();
    const complex<double> it(0.0, t);
    const Eigen::Index n = b.dim();
    auto sum = [&](const QuadratureRule& q) {
        Matrix acc = Matrix::Zero(n, n);
        for (std::size_t k = 0; k < q.node_count(); ++k) {
            const complex<double> s = q.nodes()[k];
            const ShiftedFactorization lu(b, s);
            const Matrix x1 = lu.solve(b.entries());
            acc += (q.weights()[k] * prefactor * std::pow(s, it)) * lu.solve(x1);
        }
        return acc;
    };
    return op.with_entries(integrate_checked(r, sum, doublings_for(rule), "imaginary_power"));
}

QuadratureRule default_sector_rule(const SpectralBounds& bounds, double theta)
{
    const double lo = std::log(bounds.min_modulus > 0.0 ? std::min(1.0, bounds.min_modulus) : 1.0) - 40.0;
    const double hi = std::log(std::max(1.0, bounds.max_modulus)) + 40.0;
    const double gap = std::min(theta, pi - bounds.max_angle - theta);
    const double step = std::min(0.5, gap / 4.0);
    return sector_contour_rule(theta, lo, hi, nodes_for_step(lo, hi, step));
}

DenseOperator hinfty_eval(const DenseOperator& op, const ScalarFunction& f, double theta,
                          const std::optional<QuadratureRule>& rule)
{
    if (!(theta > 0.0 && theta < pi)) fail(ErrorCode::InvalidArgument, "theta must lie in (0, pi)");
    const SpectralBounds bounds = spectral_bounds(op);
    if (!(bounds.max_angle < pi - theta) || bounds.min_real < -1e-12 * std::max(bounds.max_modulus, 1e-300))
        fail(ErrorCode::SpectrumNotSectorial, "spectrum of -A is not enclosed by Gamma_theta");
    const QuadratureRule r = rule ? *rule : default_sector_rule(bounds, theta);

    // decay spot check on the outermost nodes of each ray
    double peak = 0.0;
    for (const auto& z : r.nodes()) peak = std::max(peak, std::abs(f(z)));
    const std::size_t per_ray = r.node_count() / 2;
    for (std::size_t idx : {std::size_t{0}, per_ray - 1, per_ray, r.node_count() - 1}) {
        const complex<double> z = r.nodes()[idx];
        const double m = std::abs(z);
        const double envelope = 10.0 * peak * std::pow(m / (1.0 + m * m), 0.1);
        if (std::abs(f(z)) > envelope) {
            std::ostringstream msg;
            msg << "|f| = " << std::abs(f(z)) << " at |lambda| = " << m << " exceeds the decay envelope";
            fail(ErrorCode::DecayViolated, msg.str());
        }
    }
    const Eigen::Index n = op.dim();
    const complex<double> scale = 1.0 / (2.0 * pi * I1);
    auto sum = [&](const QuadratureRule& q) {
        Matrix acc = Matrix::Zero(n, n);
        for (std::size_t k = 0; k < q.node_count(); ++k) {
            const complex<double> z = q.nodes()[k];
            const complex<double> fz = f(z);
            if (fz == 0.0) continue;
            acc += (scale * q.weights()[k] * fz) * shifted_inverse(op, z);
        }
        return acc;
    };
    // a symbol whose integral cancels to ~0 is judged against the size of f itself
    return op.with_entries(integrate_checked(r, sum, doublings_for(rule), "hinfty_eval", 1e-6 * peak));
}

DenseOperator complex_power(const DenseOperator& op, complex<double> z, double c, const std::optional<QuadratureRule>& rule)
{
    if (c < 0.0) fail(ErrorCode::InvalidArgument, "shift c must be >= 0");
    if (z.real() > 0.0) fail(ErrorCode::InvalidArgument, "complex_power needs Re z <= 0");
    if (z.real() == 0.0) return imaginary_power(op, z.imag(), c, rule);
    const DenseOperator b = shifted(op, c);
    const SpectralBounds bounds = spectral_bounds(b);
    require_right_half_plane(bounds, "complex_power");
    if (!(bounds.max_angle < pi / 2)) fail(ErrorCode::SpectrumNotSectorial, "spectrum leaves the open right half-plane");
    const QuadratureRule r = [&] {
        if (rule) return *rule;
        const double rho = 0.5 * bounds.min_modulus;
        const double theta = 0.5 * (pi / 2 + pi - bounds.max_angle);
        const double u_max = std::log(8.0 * bounds.max_modulus / rho) + (tail + pi * std::abs(z.imag())) / -z.real();
        return hyperbola_rule(rho, theta, u_max, nodes_for_step(-u_max, u_max, 0.1));
    }();
    const Eigen::Index n = b.dim();
    const complex<double> scale = 1.0 / (2.0 * pi * I1);
    auto sum = [&](const QuadratureRule& q) {
        Matrix acc = Matrix::Zero(n, n);
        for (std::size_t k = 0; k < q.node_count(); ++k) {
            const complex<double> lam = q.nodes()[k];
            acc += (scale * q.weights()[k] * principal_pow(-lam, z)) * shifted_inverse(b, lam);
        }
        return acc;
    };
    return op.with_entries(integrate_checked(r, sum, doublings_for(rule), "complex_power"));
}

ShiftComparisonReport shift_comparison_probe(const DenseOperator& op, double sigma, const std::vector<double>& c_values)
{
    require_sigma(sigma);
    if (c_values.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two shift values");
    std::vector<double> cs = c_values;
    std::sort(cs.begin(), cs.end());
    if (!(cs.front() > 0.0)) fail(ErrorCode::InvalidArgument, "shift values must be positive");

    Matrix base;
    try {
        const EigenData eig = eigen_decompose(op);
        if (eig.condition_estimate > 1.0 + 1e-8) throw Error(ErrorCode::DefectiveMatrix, "not normal");
        base = apply_spectral_function(eig, [&](complex<double> a) { return principal_pow(a, sigma); });
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DefectiveMatrix) throw;
        base = frac_power(op, {sigma, 0.0, PowerMethod::resolvent_limit}).entries();
    }

    ShiftComparisonReport report;
    for (double c : cs) {
        const Matrix shifted_power = frac_power(op, {sigma, c, PowerMethod::balakrishnan}).entries();
        report.samples.push_back({c, operator_norm(Matrix(shifted_power - base), op), 0.0});
    }
    const std::size_t n = report.samples.size();
    for (std::size_t k = n - 2; k < n; ++k)
        report.fitted_m = std::max(report.fitted_m, report.samples[k].measured / std::pow(report.samples[k].c, sigma));
    report.scaling_holds = true;
    for (auto& s : report.samples) {
        s.envelope = report.fitted_m * std::pow(s.c, sigma);
        if (s.measured > 1.05 * s.envelope) report.scaling_holds = false;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : report.samples) {
        const double x = std::log(s.c);
        const double y = std::log(std::max(s.measured, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double nn = static_cast<double>(n);
    report.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    return report;
}

} // namespace conefrac
