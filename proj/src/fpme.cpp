#include "conefrac/fpme.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "conefrac/error.hpp"
#include "conefrac/funcalc.hpp"

namespace conefrac {

using std::complex;

void FpmeConfig::validate() const
{
    auto bad = [](const std::string& why) { fail(ErrorCode::InvalidArgument, why); };
    if (!(sigma > 0.0 && sigma <= 1.0)) bad("fpme sigma must lie in (0, 1]");
    if (!(m > 0.0)) bad("fpme m must be positive");
    if (!(dt > 0.0)) bad("fpme dt must be positive");
    if (!(t_end >= 0.0)) bad("fpme t_end must be >= 0");
    if (!(positivity_floor > 0.0)) bad("positivity_floor must be positive");
    if (snapshot_every < 1) bad("snapshot_every must be >= 1");
}

namespace {

DenseOperator block_negative_laplacian(const ModeBlock& blk)
{
    return blk.laplacian.with_entries(-blk.laplacian.entries(), "-Delta_" + std::to_string(blk.j));
}

bool is_circle(const ConeOperator& op) { return op.cross_section().name == "circle"; }

} // namespace

FracGenerator::FracGenerator(const ConeOperator& op, double sigma) : op_(&op), sigma_(sigma)
{
    if (!(sigma > 0.0 && sigma <= 1.0)) fail(ErrorCode::InvalidArgument, "sigma must lie in (0, 1]");
    for (const ModeBlock& blk : op.blocks()) {
        const DenseOperator b = block_negative_laplacian(blk);
        Matrix l;
        if (sigma == 1.0) {
            l = b.entries();
        } else {
            const PowerMethod method = blk.augmented ? PowerMethod::resolvent_limit : PowerMethod::balakrishnan;
            l = frac_power(b, {sigma, 0.0, method, ResolventBackend::spectral}).entries();
        }
        norm_ = std::max(norm_, operator_norm(l, b));
        blocks_.push_back(std::move(l));
        augmented_.push_back(blk.augmented);
    }
}

Vector FracGenerator::apply(int b, const Vector& v) const
{
    const Matrix& l = blocks_.at(b);
    if (v.size() != l.rows()) fail(ErrorCode::DimensionMismatch, "generator block size differs from vector");
    if (!augmented_[b]) return l * v;
    return l * (v.array() - v(0)).matrix();
}

DenseOperator FracGenerator::assembled(int max_blocks) const
{
    const DenseOperator metric = op_->negative_laplacian(max_blocks);
    Matrix a = Matrix::Zero(metric.dim(), metric.dim());
    Eigen::Index at = 0;
    const int nb = max_blocks < 0 ? block_count() : std::min(max_blocks, block_count());
    for (int b = 0; b < nb; ++b) {
        const Eigen::Index k = blocks_[b].rows();
        for (int c = 0; c < op_->blocks()[b].multiplicity; ++c) {
            a.block(at, at, k, k) = blocks_[b];
            at += k;
        }
    }
    return metric.with_entries(std::move(a), "L_sigma");
}

FracGenerator build_frac_generator(const ConeOperator& op, double sigma)
{
    if (op.extension() != Extension::with_C_omega)
        fail(ErrorCode::PreconditionViolated, "the fractional generator needs the C_omega extension");
    return FracGenerator(op, sigma);
}

namespace {

/// Collocation matrix T(l, r) = phi_r(y_l) for the circle, orthonormal for the
/// normalized measure dy / 2 pi.
Eigen::MatrixXd circle_collocation(const ConeOperator& op)
{
    int top = 0;
    for (const auto& blk : op.blocks()) top = std::max(top, blk.j);
    const int points = 2 * top + 1;
    Eigen::MatrixXd t(points, op.instances().size());
    for (int l = 0; l < points; ++l) {
        const double y = 2.0 * std::numbers::pi * l / points;
        for (std::size_t r = 0; r < op.instances().size(); ++r) {
            const ModeInstance& inst = op.instances()[r];
            const int j = op.blocks()[inst.block].j;
            if (j == 0)
                t(l, r) = 1.0;
            else
                t(l, r) = std::sqrt(2.0) * (inst.copy == 0 ? std::cos(j * y) : std::sin(j * y));
        }
    }
    return t;
}

void require_synthesizable(const ConeOperator& op, const ConeFunction& u)
{
    if (u.coefficients.size() != op.instances().size() ||
        u.c_omega_part.size() != static_cast<std::size_t>(op.cross_section().components))
        fail(ErrorCode::DimensionMismatch, "function does not match the operator");
    if (!is_circle(op) && !u.is_radial(op))
        fail(ErrorCode::InvalidArgument, "physical synthesis of non-radial functions needs the circle cross-section");
}

} // namespace

Eigen::MatrixXcd synthesize(const ConeOperator& op, const ConeFunction& u)
{
    require_synthesizable(op, u);
    const int m = op.grid().count();
    if (!is_circle(op)) {
        Eigen::MatrixXcd out(m, op.cross_section().components);
        for (int k = 0; k < op.cross_section().components; ++k) out.col(k) = u.coefficients[k].array() + u.c_omega_part[k];
        return out;
    }
    const Eigen::MatrixXd t = circle_collocation(op);
    Eigen::MatrixXcd modal(m, op.instances().size());
    for (std::size_t r = 0; r < op.instances().size(); ++r) modal.col(r) = u.coefficients[r];
    Eigen::MatrixXcd out = modal * t.transpose().cast<complex<double>>();
    out.array() += u.c_omega_part[0];
    return out;
}

ConeFunction analyze(const ConeOperator& op, const Eigen::MatrixXcd& values, const std::vector<complex<double>>& c_omega)
{
    ConeFunction u = ConeFunction::zero(op);
    if (c_omega.size() != u.c_omega_part.size()) fail(ErrorCode::DimensionMismatch, "wrong number of C_omega values");
    u.c_omega_part = c_omega;
    if (!is_circle(op)) {
        for (int k = 0; k < op.cross_section().components; ++k) u.coefficients[k] = values.col(k).array() - c_omega[k];
        return u;
    }
    const Eigen::MatrixXd t = circle_collocation(op);
    const Eigen::MatrixXcd shifted = values.array() - c_omega[0];
    const Eigen::MatrixXcd modal = shifted * t.cast<complex<double>>() / static_cast<double>(t.rows());
    for (std::size_t r = 0; r < op.instances().size(); ++r) u.coefficients[r] = modal.col(r);
    return u;
}

std::vector<complex<double>> tip_values(const ConeFunction& u) { return u.c_omega_part; }

ConeFunction map_pointwise(const ConeOperator& op, const ConeFunction& u,
                           const std::function<complex<double>(complex<double>)>& f)
{
    if (u.is_radial(op)) {
        ConeFunction out = u;
        for (int k = 0; k < op.cross_section().components; ++k) {
            const complex<double> c = f(u.c_omega_part[k]);
            out.c_omega_part[k] = c;
            out.coefficients[k] = (u.coefficients[k].array() + u.c_omega_part[k]).unaryExpr(f) - c;
        }
        return out;
    }
    std::vector<complex<double>> c;
    for (const auto& v : u.c_omega_part) c.push_back(f(v));
    return analyze(op, synthesize(op, u).unaryExpr(f), c);
}

RadialMode radial_mode(const ConeOperator& op, int index)
{
    const auto [values, vectors] = block_eigensystem(op.blocks().at(0).laplacian);
    if (index < 0 || index >= values.size()) fail(ErrorCode::InvalidArgument, "no such radial mode");
    RadialMode mode;
    mode.kappa = values(index);
    Vector v = vectors.col(index);
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    v /= v(at);
    mode.block_vector = v;
    return mode;
}

namespace {

double min_real(const ConeOperator& op, const ConeFunction& u)
{
    double lo = synthesize(op, u).real().minCoeff();
    for (const auto& c : u.c_omega_part) lo = std::min(lo, c.real());
    return lo;
}

/// Coupled solve over all mode instances when the frozen coefficient mixes modes.
ConeFunction coupled_step(const ConeFunction& w, const FpmeConfig& cfg, const FracGenerator& gen, const ConeOperator& op)
{
    const auto& inst = op.instances();
    std::vector<Eigen::Index> start(inst.size() + 1, 0);
    for (std::size_t r = 0; r < inst.size(); ++r) start[r + 1] = start[r] + op.blocks()[inst[r].block].laplacian.dim();
    const Eigen::Index n = start.back();

    Matrix g = Matrix::Zero(n, n);
    Vector v(n), gv(n);
    for (std::size_t r = 0; r < inst.size(); ++r) {
        const Eigen::Index k = start[r + 1] - start[r];
        g.block(start[r], start[r], k, k) = gen.block(inst[r].block);
        const Vector vr = w.block_vector(op, static_cast<int>(r));
        v.segment(start[r], k) = vr;
        gv.segment(start[r], k) = gen.apply(inst[r].block, vr);
    }

    const Eigen::MatrixXd t = circle_collocation(op);
    const Eigen::MatrixXcd phys = synthesize(op, w);
    const double points = static_cast<double>(t.rows());
    Matrix mult = Matrix::Zero(n, n);
    const double expo = (cfg.m - 1.0) / cfg.m;
    for (int i = 0; i < op.grid().count(); ++i) {
        Eigen::VectorXd q(t.rows());
        for (Eigen::Index l = 0; l < t.rows(); ++l) q(l) = cfg.m * std::pow(phys(i, l).real(), expo);
        const Eigen::MatrixXd p = t.transpose() * q.asDiagonal() * t / points;
        for (std::size_t r = 0; r < inst.size(); ++r)
            for (std::size_t s = 0; s < inst.size(); ++s)
                mult(start[r] + op.blocks()[inst[r].block].offset() + i, start[s] + op.blocks()[inst[s].block].offset() + i) =
                    p(r, s);
    }
    for (std::size_t r = 0; r < inst.size(); ++r)
        if (op.blocks()[inst[r].block].augmented)
            mult(start[r], start[r]) = cfg.m * std::pow(w.c_omega_part[inst[r].copy].real(), expo);

    Matrix system = Matrix::Identity(n, n) + cfg.dt * mult * g;
    Eigen::PartialPivLU<Matrix> lu(system);
    const Vector delta = lu.solve(Vector(-cfg.dt * (mult * gv)));
    if (!delta.allFinite()) fail(ErrorCode::SolveFailed, "coupled step produced non-finite values; try halving dt");
    ConeFunction out = w;
    for (std::size_t r = 0; r < inst.size(); ++r)
        out.set_block_vector(op, static_cast<int>(r), v.segment(start[r], start[r + 1] - start[r]) +
                                                          delta.segment(start[r], start[r + 1] - start[r]));
    return out;
}

} // namespace

StepResult step_semi_implicit(const ConeFunction& w, const FpmeConfig& cfg, const FracGenerator& generator,
                              const ConeOperator& op)
{
    require_synthesizable(op, w);
    const double lo = min_real(op, w);
    if (!(lo >= cfg.positivity_floor)) {
        std::ostringstream msg;
        msg << "state minimum " << lo << " below the positivity floor " << cfg.positivity_floor;
        fail(ErrorCode::NonPositiveState, msg.str());
    }

    StepResult result{w, 0};
    const bool radial = w.is_radial(op);
    if (cfg.m == 1.0 || radial) {
        const double expo = (cfg.m - 1.0) / cfg.m;
        for (std::size_t r = 0; r < op.instances().size(); ++r) {
            const int b = op.instances()[r].block;
            if (radial && b != 0) continue;
            const Vector v = w.block_vector(op, static_cast<int>(r));
            const Matrix& l = generator.block(b);
            const Eigen::Index k = v.size();
            Vector rhs = -cfg.dt * generator.apply(b, v);
            Matrix system = cfg.dt * l;
            if (cfg.m != 1.0) {
                Eigen::VectorXd coeff(k);
                for (Eigen::Index i = 0; i < k; ++i) coeff(i) = cfg.m * std::pow(v(i).real(), expo);
                system = coeff.asDiagonal() * system;
                rhs = coeff.asDiagonal() * rhs;
            }
            system += Matrix::Identity(k, k);
            Eigen::PartialPivLU<Matrix> lu(system);
            const Vector delta = lu.solve(rhs);
            if (!delta.allFinite()) fail(ErrorCode::SolveFailed, "implicit step produced non-finite values; try halving dt");
            result.w.set_block_vector(op, static_cast<int>(r), v + delta);
        }
    } else {
        if (!is_circle(op)) fail(ErrorCode::InvalidArgument, "nonlinear non-radial steps need the circle cross-section");
        result.w = coupled_step(w, cfg, generator, op);
    }

    // floor clamp in physical space
    if (result.w.is_radial(op)) {
        for (int k = 0; k < op.cross_section().components; ++k) {
            Vector v = result.w.block_vector(op, k);
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                if (v(i).real() < cfg.positivity_floor) {
                    v(i) = cfg.positivity_floor;
                    ++result.clamped;
                }
            }
            result.w.set_block_vector(op, k, v);
        }
    } else {
        Eigen::MatrixXcd phys = synthesize(op, result.w);
        std::vector<complex<double>> c = result.w.c_omega_part;
        for (auto& v : c)
            if (v.real() < cfg.positivity_floor) {
                v = cfg.positivity_floor;
                ++result.clamped;
            }
        for (Eigen::Index i = 0; i < phys.size(); ++i)
            if (phys(i).real() < cfg.positivity_floor) {
                phys(i) = cfg.positivity_floor;
                ++result.clamped;
            }
        if (result.clamped > 0) result.w = analyze(op, phys, c);
    }
    return result;
}

namespace {

StepDiagnostics diagnose(const ConeFunction& u, const FpmeConfig& cfg, const ConeOperator& op)
{
    StepDiagnostics d;
    const Eigen::MatrixXcd phys = synthesize(op, u);
    d.min_value = phys.real().minCoeff();
    d.sup_norm = phys.cwiseAbs().maxCoeff();
    for (const auto& c : u.c_omega_part) {
        d.min_value = std::min(d.min_value, c.real());
        d.sup_norm = std::max(d.sup_norm, std::abs(c));
    }
    d.h0gamma_norm = mellin_norm(u, 0, op.grid().gamma(), op);
    try {
        d.tip_alpha = tip_decay_fit(u, op.grid(), cfg.fit_x_a, cfg.fit_x_b).alpha;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::WindowEmpty) throw;
        d.tip_alpha = std::numeric_limits<double>::quiet_NaN();
    }
    return d;
}

} // namespace

TrajectoryRecord run(const ConeFunction& u0, const FpmeConfig& cfg, const ConeOperator& op)
{
    return run(u0, cfg, op, build_frac_generator(op, cfg.sigma));
}

TrajectoryRecord run(const ConeFunction& u0, const FpmeConfig& cfg, const ConeOperator& op, const FracGenerator& generator)
{
    cfg.validate();
    if (generator.sigma() != cfg.sigma) fail(ErrorCode::InvalidArgument, "generator sigma differs from the config");
    require_synthesizable(op, u0);
    if (!(min_real(op, u0) > 0.0)) fail(ErrorCode::PreconditionViolated, "initial data must be strictly positive");

    TrajectoryRecord rec;
    rec.stability_product = cfg.dt * generator.norm();
    const WeightWindow window = weight_window(op.cross_section());
    if (cfg.sigma <= window.sigma0) {
        std::ostringstream msg;
        msg << "sigma = " << cfg.sigma << " is not above sigma0 = " << window.sigma0;
        rec.warnings.push_back(msg.str());
    }

    const double inv_m = 1.0 / cfg.m;
    auto to_w = [&](complex<double> z) { return cfg.m == 1.0 ? z : std::pow(z.real(), cfg.m) + 0.0 * z; };
    auto to_u = [&](complex<double> z) { return cfg.m == 1.0 ? z : std::pow(z.real(), inv_m) + 0.0 * z; };

    auto record = [&](double t, const ConeFunction& w, int clamped) {
        ConeFunction u = cfg.m == 1.0 ? w : map_pointwise(op, w, to_u);
        StepDiagnostics d = diagnose(u, cfg, op);
        d.clamped = clamped;
        rec.times.push_back(t);
        rec.diagnostics.push_back(d);
        rec.snapshots.push_back(std::move(u));
    };

    ConeFunction w = cfg.m == 1.0 ? u0 : map_pointwise(op, u0, to_w);
    record(0.0, w, 0);
    const int steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
    int clamped_since = 0;
    for (int k = 1; k <= steps; ++k) {
        try {
            StepResult s = step_semi_implicit(w, cfg, generator, op);
            w = std::move(s.w);
            rec.clamp_count += s.clamped;
            clamped_since += s.clamped;
        } catch (const Error& e) {
            rec.failure = e.what();
            return rec;
        }
        rec.steps = k;
        if (k % cfg.snapshot_every == 0 || k == steps) {
            record(k * cfg.dt, w, clamped_since);
            clamped_since = 0;
        }
    }
    return rec;
}

namespace {

std::string fmt17(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record)
{
    out << "t,min_value,sup_norm,h0gamma_norm,tip_alpha\n";
    for (std::size_t k = 0; k < record.times.size(); ++k) {
        const StepDiagnostics& d = record.diagnostics[k];
        out << fmt17(record.times[k]) << ',' << fmt17(d.min_value) << ',' << fmt17(d.sup_norm) << ','
            << fmt17(d.h0gamma_norm) << ',' << fmt17(d.tip_alpha) << '\n';
    }
}

void write_snapshot_csv(std::ostream& out, const ConeOperator& op, const ConeFunction& u)
{
    const Eigen::MatrixXcd phys = synthesize(op, u);
    out << "x";
    for (Eigen::Index l = 0; l < phys.cols(); ++l) out << ",col" << l;
    out << '\n';
    for (Eigen::Index i = 0; i < phys.rows(); ++i) {
        out << fmt17(op.grid().x(static_cast<int>(i)));
        for (Eigen::Index l = 0; l < phys.cols(); ++l) out << ',' << fmt17(phys(i, l).real());
        out << '\n';
    }
}

namespace {

/// Radial multiplier as a diagonal over the first `max_blocks` blocks, all copies.
RealVector multiplier_diagonal(const ConeFunction& w_mult, const ConeOperator& op, int max_blocks)
{
    if (!w_mult.is_radial(op)) fail(ErrorCode::InvalidArgument, "the multiplier must be radial");
    const Vector full = w_mult.block_vector(op, 0);
    RealVector d(op.dim(max_blocks));
    Eigen::Index at = 0;
    const int nb = max_blocks < 0 ? static_cast<int>(op.blocks().size()) : std::min<int>(max_blocks, op.blocks().size());
    for (int b = 0; b < nb; ++b) {
        const ModeBlock& blk = op.blocks()[b];
        for (int c = 0; c < blk.multiplicity; ++c) {
            if (blk.augmented) {
                d.segment(at, full.size()) = full.real();
            } else {
                d.segment(at, op.grid().count()) = full.tail(op.grid().count()).real();
            }
            at += blk.laplacian.dim();
        }
    }
    return d;
}

DenseOperator real_power(const DenseOperator& a, double p)
{
    if (p == 0.0) return DenseOperator(Matrix::Identity(a.dim(), a.dim()), a.inner_weights());
    if (p == 1.0) return a;
    if (p == -1.0) return a.with_entries(shifted_inverse(a, 0.0));
    if (p > 0.0 && p < 1.0) return frac_power(a, {p, 0.0, PowerMethod::balakrishnan, ResolventBackend::spectral});
    if (p < 0.0 && p > -1.0) return inv_frac_power(a, {-p, 0.0, PowerMethod::balakrishnan, ResolventBackend::spectral});
    fail(ErrorCode::InvalidArgument, "exponents must lie in [-1, 1]");
}

struct LogFit {
    double c0 = 0.0, a = 0.0, b = 0.0;
};

LogFit fit_two(const std::vector<std::array<double, 3>>& samples)
{
    Eigen::MatrixXd x(samples.size(), 3);
    Eigen::VectorXd y(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        x(k, 0) = 1.0;
        x(k, 1) = std::log1p(samples[k][0]);
        x(k, 2) = std::log1p(samples[k][1]);
        y(k) = std::log(std::max(samples[k][2], 1e-300));
    }
    const Eigen::Vector3d beta = x.colPivHouseholderQr().solve(y);
    return {beta(0), beta(1), beta(2)};
}

} // namespace

CommutatorReport commutator_decay_scan(const ConeFunction& w_mult, const ConeOperator& op, double sigma, double nu,
                                       double rho, const CommutatorOptions& options)
{
    if (!(sigma > 0.0 && sigma < 1.0)) fail(ErrorCode::InvalidArgument, "sigma must lie in (0, 1)");
    if (!(options.c > 0.0)) fail(ErrorCode::InvalidArgument, "c must be positive");
    const DenseOperator lap = op.negative_laplacian(options.max_blocks);
    Matrix shifted = lap.entries();
    shifted.diagonal().array() += options.c;
    const DenseOperator a = lap.with_entries(std::move(shifted), "c - Delta");
    const RealVector w = multiplier_diagonal(w_mult, op, options.max_blocks);
    if (!(w.minCoeff() > 0.0)) fail(ErrorCode::PreconditionViolated, "the multiplier must be positive");

    const Matrix a_sigma = real_power(a, sigma).entries();
    const Matrix a_rho = real_power(a, rho).entries();
    const Matrix a_nu = real_power(a, -nu).entries();
    const Matrix commutator = w.asDiagonal() * a_sigma - a_sigma * w.asDiagonal();

    CommutatorReport report;
    report.commutator_norm = operator_norm(Matrix(a_rho * commutator * a_nu), a);
    report.alpha = nu / sigma;

    const DenseOperator gen = a.with_entries(a_sigma);
    for (double lm : options.lambda_moduli) {
        const Matrix resolvent = shifted_inverse(gen, std::polar(lm, options.theta));
        for (double mm : options.mu_moduli) {
            Matrix wm = w.cast<complex<double>>().asDiagonal();
            wm.diagonal().array() += std::polar(mm, options.theta);
            const Matrix winv = wm.diagonal().cwiseInverse().asDiagonal();
            const Matrix value = (a_sigma * winv - winv * a_sigma) * resolvent;
            report.samples.push_back({lm, mm, operator_norm(value, a)});
        }
    }
    if (report.commutator_norm == 0.0) {
        report.lambda_bound_holds = true;
        return report;
    }
    const LogFit fit = fit_two(report.samples);
    report.lambda_exponent = fit.a;
    report.mu_exponent = fit.b;
    report.lambda_bound_holds = fit.a <= -(1.0 - report.alpha) + 0.1;
    return report;
}

LinearizationReport linearization_sectoriality_probe(const ConeFunction& w_mult, const ConeOperator& op, double sigma,
                                                     const std::vector<double>& c_grid, double theta,
                                                     const SectorProbeOptions& probe, std::uint64_t seed)
{
    if (c_grid.empty()) fail(ErrorCode::InvalidArgument, "empty c grid");
    const RealVector w = multiplier_diagonal(w_mult, op, 1);
    if (!(w.minCoeff() > 0.0)) fail(ErrorCode::PreconditionViolated, "the multiplier must satisfy w >= alpha > 0");
    const FracGenerator gen(op, sigma);
    const DenseOperator l = gen.assembled(1);

    LinearizationReport report;
    report.c_values = c_grid;
    std::optional<DenseOperator> chosen;
    for (double c : c_grid) {
        Matrix m = w.cast<complex<double>>().asDiagonal() * l.entries();
        m.diagonal().array() += c;
        const DenseOperator shifted = l.with_entries(std::move(m), "W L_sigma + c");
        SectorProbeReport pr = sectorial_bound_probe(shifted, theta, probe);
        const double split = std::sqrt(probe.r_min * probe.r_max);
        double lower = 0.0;
        for (const auto& s : pr.samples)
            if (std::abs(s.lambda) <= split) lower = std::max(lower, s.bound_value);
        const double growth = lower > 0.0 ? pr.estimated_K / lower : std::numeric_limits<double>::infinity();
        report.growth.push_back(growth);
        if (!report.c_star && growth < 2.0 && !pr.not_sectorial_suspected) {
            report.c_star = c;
            chosen = shifted;
        }
        report.probes.push_back(std::move(pr));
    }
    if (!chosen) {
        Matrix m = w.cast<complex<double>>().asDiagonal() * l.entries();
        m.diagonal().array() += c_grid.back();
        chosen = l.with_entries(std::move(m));
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<DenseOperator> family;
    for (int k = 0; k < 8; ++k) {
        const double psi = (2.0 * unif(rng) - 1.0) * theta;
        const double r = std::exp(std::log(probe.r_min) + unif(rng) * (std::log(probe.r_max) - std::log(probe.r_min)));
        const complex<double> lambda = std::polar(r, psi);
        family.push_back(chosen->with_entries(lambda * shifted_inverse(*chosen, lambda)));
    }
    RBoundOptions ro;
    ro.seed = seed;
    ro.trials = 16;
    report.rbound = rademacher_rbound_estimate(family, ro);
    return report;
}

} // namespace conefrac
