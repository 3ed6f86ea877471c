#include "conefrac/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "conefrac/error.hpp"
#include "conefrac/report.hpp"
#include "conefrac/sectorial.hpp"

namespace conefrac {

using std::complex;
using std::numbers::pi;
namespace fs = std::filesystem;

RunConfig RunConfig::load(const std::optional<std::string>& path, const std::vector<std::string>& overrides)
{
    RunConfig cfg;
    if (path) cfg.values = KeyValueConfig::load(*path);
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) fail(ErrorCode::ConfigError, "override '" + o + "' is not key=value");
        cfg.values.set(o.substr(0, eq), o.substr(eq + 1));
    }
    cfg.output_dir = cfg.values.get_string("output_dir", cfg.output_dir);
    const long long seed = cfg.values.get_int("seed", 0);
    if (seed < 0) fail(ErrorCode::ConfigError, "seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    if (cfg.values.has("nodes")) cfg.nodes = static_cast<int>(cfg.values.get_int("nodes", 0));
    return cfg;
}

CrossSection RunConfig::cross_section(const std::string& section) const
{
    const std::string name = values.get_string(section + ".name", values.get_string("cross_section.name", "circle"));
    const long long modes = values.get_int(section + ".max_modes", values.get_int("cross_section.max_modes", CrossSection::default_max_modes));
    if (modes < 1) fail(ErrorCode::ConfigError, "max_modes must be >= 1");
    return CrossSection::named(name).truncated(static_cast<int>(modes));
}

ConeGrid RunConfig::grid() const
{
    const long long count = values.get_int("grid.count", 128);
    return ConeGrid(values.get_double("grid.x_min", 1e-6), static_cast<int>(count), values.get_double("grid.gamma", -0.5));
}

Extension RunConfig::extension() const
{
    const std::string e = values.get_string("grid.extension", "with_C_omega");
    if (e == "with_C_omega") return Extension::with_C_omega;
    if (e == "minimal") return Extension::minimal;
    fail(ErrorCode::ConfigError, "grid.extension must be with_C_omega or minimal");
}

namespace {

void require_open_unit(double sigma, const std::string& key)
{
    if (!(sigma > 0.0 && sigma < 1.0)) {
        std::ostringstream msg;
        msg << key << " = " << sigma << " must lie in (0, 1)";
        fail(ErrorCode::InvalidArgument, msg.str());
    }
}

} // namespace

PowerSpec RunConfig::power() const
{
    PowerSpec p;
    p.sigma = values.get_double("power.sigma", 0.5);
    require_open_unit(p.sigma, "power.sigma");
    p.shift_c = values.get_double("power.shift_c", 0.0);
    if (p.shift_c < 0.0) fail(ErrorCode::InvalidArgument, "power.shift_c must be >= 0");
    const std::string method = values.get_string("power.method", "balakrishnan");
    if (method == "balakrishnan") p.method = PowerMethod::balakrishnan;
    else if (method == "eigen_oracle") p.method = PowerMethod::eigen_oracle;
    else if (method == "resolvent_limit") p.method = PowerMethod::resolvent_limit;
    else fail(ErrorCode::ConfigError, "unknown power.method '" + method + "'");
    const std::string backend = values.get_string("power.backend", "dense_lu");
    if (backend == "dense_lu") p.backend = ResolventBackend::dense_lu;
    else if (backend == "spectral") p.backend = ResolventBackend::spectral;
    else fail(ErrorCode::ConfigError, "unknown power.backend '" + backend + "'");
    return p;
}

FpmeConfig RunConfig::fpme() const
{
    FpmeConfig f;
    f.sigma = values.get_double("fpme.sigma", f.sigma);
    require_open_unit(f.sigma, "fpme.sigma");
    f.m = values.get_double("fpme.m", f.m);
    f.dt = values.get_double("fpme.dt", f.dt);
    f.t_end = values.get_double("fpme.t_end", f.t_end);
    f.positivity_floor = values.get_double("fpme.positivity_floor", f.positivity_floor);
    f.snapshot_every = static_cast<int>(values.get_int("fpme.snapshot_every", f.snapshot_every));
    f.fit_x_a = values.get_double("fpme.fit_x_a", f.fit_x_a);
    f.fit_x_b = values.get_double("fpme.fit_x_b", f.fit_x_b);
    f.validate();
    return f;
}

int exit_code_for(const std::exception& e)
{
    if (const auto* err = dynamic_cast<const Error*>(&e)) return is_validation_error(err->code()) ? 2 : 3;
    return 3;
}

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name)
{
    fs::create_directories(cfg.output_dir);
    return (fs::path(cfg.output_dir) / name).string();
}

/// The operator used by the matrix-level commands: a CSV file, or c - Delta on
/// the first cone modes.
DenseOperator matrix_operator(const RunConfig& cfg)
{
    const std::string source = cfg.values.get_string("matrix.source", "cone");
    if (source == "file") {
        const std::string path = cfg.values.get_string("matrix.file", "");
        std::ifstream in(path);
        if (!in) fail(ErrorCode::IoError, "cannot open matrix file '" + path + "'");
        return DenseOperator(read_matrix_csv(in), std::nullopt, path);
    }
    if (source != "cone") fail(ErrorCode::ConfigError, "matrix.source must be cone or file");
    const ConeOperator op = assemble_cone_laplacian(cfg.cross_section(), cfg.grid(), cfg.extension());
    const int blocks = static_cast<int>(cfg.values.get_int("matrix.max_blocks", 1));
    const double shift = cfg.values.get_double("matrix.shift", 1.0);
    const DenseOperator lap = op.negative_laplacian(blocks);
    Matrix m = lap.entries();
    m.diagonal().array() += shift;
    return lap.with_entries(std::move(m), "c - Delta");
}

double default_lambda0(const RunConfig& cfg)
{
    if (cfg.values.get_string("matrix.source", "cone") == "cone") return -cfg.values.get_double("matrix.shift", 1.0);
    return 0.0;
}

std::vector<complex<double>> complex_list(const std::string& text)
{
    std::vector<complex<double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
    return out;
}

Json grid_json(const ConeGrid& g)
{
    return Json{{"x_min", g.x_min()}, {"count", g.count()}, {"gamma", g.gamma()}};
}

void cmd_assemble(const RunConfig& cfg, std::ostream& log)
{
    const CrossSection cs = cfg.cross_section();
    const WeightWindow window = weight_window(cs);
    const ConeGrid grid = cfg.grid();
    if (!window.contains(grid.gamma())) {
        std::ostringstream msg;
        msg << "gamma = " << grid.gamma() << " outside (n-3)/2 < gamma < min(mu_1 - 1, (n+1)/2) = (" << window.gamma_lo
            << ", " << window.gamma_hi << ")";
        fail(ErrorCode::InvalidArgument, msg.str());
    }
    const ConeOperator op = assemble_cone_laplacian(cs, grid, cfg.extension());
    const SpectrumReport spec = spectrum_check(op);
    Json mu = Json::array();
    const std::vector<double> mus = mu_exponents(cs);
    for (std::size_t j = 0; j < mus.size(); ++j)
        for (int c = 0; c < cs.multiplicities[j]; ++c) mu.push_back(mus[j]);
    Json q = Json::array();
    for (const auto& e : asymptotics_exponents(cs, grid.gamma())) q.push_back(e.q);
    Json out{{"cross_section", cs.name},
             {"n", cs.n},
             {"grid", grid_json(grid)},
             {"extension", cfg.extension() == Extension::with_C_omega ? "with_C_omega" : "minimal"},
             {"kernel_dim", spec.kernel_dim},
             {"min_eig", spec.min_eigenvalue},
             {"max_eig", spec.max_eigenvalue},
             {"gamma_window", Json::array({window.gamma_lo, window.gamma_hi})},
             {"sigma0", window.sigma0},
             {"mu_list", mu},
             {"q_list", q},
             {"spectrum", to_json(spec)}};
    write_json_file(out_path(cfg, "assemble.json"), out);
    log << "assemble: kernel_dim " << spec.kernel_dim << "\n";
}

DenseOperator random_normal(std::mt19937_64& rng, int dim, double lo, double hi)
{
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(std::log(lo), std::log(hi));
    Matrix z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z(i, j) = complex<double>(re, im);
        }
    const Matrix q = Eigen::HouseholderQR<Matrix>(z).householderQ();
    Vector d(dim);
    for (int i = 0; i < dim; ++i) d(i) = std::exp(unif(rng));
    return DenseOperator(q * d.asDiagonal() * q.adjoint());
}

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

void cmd_verify(const RunConfig& cfg, std::ostream& log)
{
    const PowerSpec power = cfg.power();
    const ConeGrid grid = cfg.grid();
    const CrossSection cs = cfg.cross_section();
    std::vector<Check> checks;
    auto add = [&](std::string name, double value, double tol, bool passed) {
        log << (passed ? "PASS " : "FAIL ") << name << " value=" << value << " tol=" << tol << "\n";
        checks.push_back({std::move(name), value, tol, passed});
    };
    std::mt19937_64 rng(cfg.seed);

    {
        double worst = 0.0;
        for (int k = 0; k < 4; ++k) {
            const DenseOperator a = random_normal(rng, 6 + 2 * k, 1e-2, 1e4);
            for (double s : {0.25, 0.5, 0.75}) {
                const Matrix f = frac_power(a, {s}).entries();
                const Matrix g = frac_power(a, {s, 0.0, PowerMethod::eigen_oracle}).entries();
                worst = std::max(worst, spectral_norm(Matrix(f - g)) / spectral_norm(g));
            }
        }
        add("frac_power_oracle", worst, 1e-8, worst <= 1e-8);
    }
    {
        double worst = 0.0;
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double s = power.sigma;
        for (int k = 0; k < 2; ++k) {
            const DenseOperator a = random_normal(rng, 8, 1e-2, 1e2);
            const Matrix as = frac_power(a, {s, 0.0, PowerMethod::eigen_oracle}).entries();
            for (int t = 0; t < 4; ++t) {
                const double angle = (2.0 * unif(rng) - 1.0) * 0.95 * pi * (1.0 - s);
                const complex<double> lambda = std::polar(std::exp(4.0 * unif(rng) - 2.0), angle);
                const Vector v = Vector::Ones(a.dim());
                const Vector x = frac_resolvent_apply(a, s, lambda, v);
                worst = std::max(worst, (x - shifted_solve(a.with_entries(as), lambda, v)).norm() / x.norm());
            }
        }
        add("frac_resolvent_identity", worst, 1e-7, worst <= 1e-7);
    }
    {
        const auto r = shift_comparison_probe(DenseOperator::diagonal({0.0, 1.0}), 0.5, {1e-4, 1e-3, 1e-2, 1e-1});
        add("shift_comparison_slope", std::abs(r.slope - 0.5), 0.02, std::abs(r.slope - 0.5) <= 0.02);
    }
    {
        const DenseOperator a = random_normal(rng, 6, 1e-1, 1e2);
        const DecayFit fit = power_resolvent_decay_fit(a, 0.5, 0.5 * pi);
        add("power_resolvent_decay", fit.exponent_fit, -0.45, fit.exponent_fit <= -0.45);
    }
    {
        double worst = 0.0;
        const DenseOperator d02 = DenseOperator::diagonal({0.0, 2.0});
        worst = std::max(worst, verify_laurent_identities(laurent_coefficients(d02, 0.0, 1, 2), d02).at("max"));
        const DenseOperator id = DenseOperator::identity(2);
        worst = std::max(worst, verify_laurent_identities(laurent_coefficients(id, 0.0, 1, 2), id).at("max"));
        Matrix nil = Matrix::Zero(2, 2);
        nil(0, 1) = 1.0;
        const DenseOperator n2(nil);
        worst = std::max(worst, verify_laurent_identities(laurent_coefficients(n2, 0.0, 2, 2, 1.0), n2).at("max"));
        add("laurent_identities", worst, 1e-8, worst <= 1e-8);
    }
    {
        RBoundOptions ro;
        ro.seed = cfg.seed;
        const auto est = rademacher_rbound_estimate(
            {DenseOperator::diagonal(Vector::Constant(4, 2.0)), DenseOperator::diagonal(Vector::Constant(4, 3.0)),
             DenseOperator::diagonal(Vector::Constant(4, 5.0))},
            ro);
        add("rbound_scalar_family", est.max_ratio, 5.0, est.max_ratio >= 4.9 && est.max_ratio <= 5.0 + 1e-9);
    }
    {
        const WeightWindow wc = weight_window(CrossSection::circle());
        const WeightWindow ws = weight_window(CrossSection::sphere());
        const double err = std::max({std::abs(wc.gamma_lo + 1), std::abs(wc.gamma_hi), std::abs(wc.sigma0 - 0.5),
                                     std::abs(ws.gamma_lo + 0.5), std::abs(ws.gamma_hi - 0.5), std::abs(ws.sigma0 - 0.5),
                                     std::abs(mu_exponents(CrossSection::sphere())[1] - 1.5)});
        add("weight_window", err, 1e-14, err <= 1e-14);
    }
    {
        const CrossSection small = cs.truncated(4);
        const SpectrumReport with = spectrum_check(assemble_cone_laplacian(small, grid, Extension::with_C_omega));
        const SpectrumReport without = spectrum_check(assemble_cone_laplacian(small, grid, Extension::minimal));
        const bool ok = with.ok() && without.ok() && with.kernel_dim == small.components && without.kernel_dim == 0;
        add("extension_dichotomy", with.kernel_dim - without.kernel_dim, small.components, ok);
    }
    {
        const ConeOperator op = assemble_cone_laplacian(cs.truncated(1), grid, Extension::with_C_omega);
        double worst = 0.0;
        for (int k : {1, 2, 4})
            if (4 * k < grid.count()) worst = std::max(worst, dilation_covariance_check(op, 1.0, k));
        add("dilation_covariance", worst, 1e-10, worst <= 1e-10);
    }
    {
        const ConeOperator op = assemble_cone_laplacian(cs.truncated(1), grid, Extension::with_C_omega);
        FpmeConfig f;
        f.sigma = power.sigma;
        f.m = 2.0;
        f.dt = 1e-3;
        f.t_end = 0.1;
        f.snapshot_every = 100;
        const ConeFunction u0 = ConeFunction::radial(op, Vector::Zero(grid.count()), 1.0);
        const TrajectoryRecord rec = run(u0, f, op);
        double drift = 0.0;
        const Eigen::MatrixXcd last = synthesize(op, rec.snapshots.back());
        drift = (last.array() - 1.0).abs().maxCoeff();
        add("fpme_steady_state", drift, 1e-10, drift <= 1e-10 && !rec.failure);
    }

    Json arr = Json::array();
    bool all = true;
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}});
        all = all && c.passed;
    }
    write_json_file(out_path(cfg, "verify.json"), Json{{"seed", cfg.seed}, {"checks", arr}, {"all_passed", all}});
    if (!all) fail(ErrorCode::SolveFailed, "verification suite reported failures");
}

void cmd_fracpow(const RunConfig& cfg, std::ostream& log)
{
    const DenseOperator a = matrix_operator(cfg);
    const PowerSpec p = cfg.power();
    std::optional<QuadratureRule> rule;
    if (cfg.nodes && p.method == PowerMethod::balakrishnan) {
        Matrix shifted = a.entries();
        shifted.diagonal().array() += p.shift_c;
        const auto [lo, hi] = default_power_rule(spectral_bounds(a.with_entries(shifted)), p.sigma, false).truncation();
        rule = half_line_rule(lo, hi, static_cast<std::size_t>(*cfg.nodes));
    }
    const DenseOperator result = frac_power(a, p, rule);
    Json out{{"sigma", p.sigma}, {"shift_c", p.shift_c}, {"dim", a.dim()}};
    try {
        const DenseOperator oracle = frac_power(a, {p.sigma, p.shift_c, PowerMethod::eigen_oracle});
        out["relative_error_vs_oracle"] = spectral_norm(Matrix(result.entries() - oracle.entries())) /
                                          std::max(spectral_norm(oracle.entries()), 1e-300);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DefectiveMatrix) throw;
        out["relative_error_vs_oracle"] = nullptr;
    }
    std::ofstream csv(out_path(cfg, "fracpow.csv"), std::ios::binary);
    write_matrix_csv(csv, result.entries());
    write_json_file(out_path(cfg, "fracpow.json"), out);
    log << "fracpow: dim " << a.dim() << "\n";
}

void cmd_resolvent(const RunConfig& cfg, std::ostream& log)
{
    const DenseOperator a = matrix_operator(cfg);
    const double sigma = cfg.power().sigma;
    const auto lambdas = complex_list(cfg.values.get_string("resolvent.lambdas", "1, 0+2j, -0.5+1j"));
    const Matrix as = frac_power(a, {sigma, 0.0, PowerMethod::eigen_oracle}).entries();
    const Vector v = Vector::Ones(a.dim());
    Json rows = Json::array();
    for (const auto& lambda : lambdas) {
        const Vector x = frac_resolvent_apply(a, sigma, lambda, v);
        const Vector ref = shifted_solve(a.with_entries(as), lambda, v);
        Json row{{"lambda", complex_json(lambda)}, {"relative_difference", (x - ref).norm() / ref.norm()}};
        const double psi = std::abs(std::arg(lambda));
        if (psi < pi * (1.0 - sigma) - 0.05 && psi > 0.0) {
            try {
                FracResolventOptions ray;
                ray.path = ResolventPath::sector_ray;
                const Vector y = frac_resolvent_apply(a, sigma, lambda, v, ray);
                row["path_agreement"] = (x - y).norm() / x.norm();
            } catch (const Error& e) {
                if (e.code() != ErrorCode::KernelPoleOnPath) throw;
                row["path_agreement"] = nullptr;
            }
        }
        rows.push_back(row);
    }
    write_json_file(out_path(cfg, "resolvent.json"), Json{{"sigma", sigma}, {"results", rows}});
    log << "resolvent: " << lambdas.size() << " points\n";
}

void cmd_sectorial(const RunConfig& cfg, std::ostream& log)
{
    const DenseOperator a = matrix_operator(cfg);
    const double theta = cfg.values.get_double("sectorial.theta", 0.75 * pi);
    SectorProbeOptions o;
    o.rays = static_cast<int>(cfg.values.get_int("sectorial.rays", o.rays));
    o.radial_samples = static_cast<int>(cfg.values.get_int("sectorial.radial_samples", o.radial_samples));
    o.r_min = cfg.values.get_double("sectorial.r_min", o.r_min);
    o.r_max = cfg.values.get_double("sectorial.r_max", o.r_max);
    const SectorProbeReport r = sectorial_bound_probe(a, theta, o);
    std::ofstream csv(out_path(cfg, "sectorial.csv"), std::ios::binary);
    write_sector_csv(csv, r);
    Json out = to_json(r);
    const double sigma = cfg.power().sigma;
    out["decay_fit"] = to_json(power_resolvent_decay_fit(a, sigma, cfg.values.get_double("sectorial.decay_theta", 0.5 * pi)));
    out["simple_pole"] = to_json(simple_pole_check(a.with_entries(Matrix(a.entries() + default_lambda0(cfg) * Matrix::Identity(a.dim(), a.dim())))));
    write_json_file(out_path(cfg, "sectorial.json"), out);
    log << "sectorial: estimated_K " << r.estimated_K << "\n";
}

void cmd_rbound(const RunConfig& cfg, std::ostream& log)
{
    const DenseOperator a = matrix_operator(cfg);
    const double sigma = cfg.power().sigma;
    const double theta = cfg.values.get_double("rbound.theta", 0.5 * pi);
    const int count = static_cast<int>(cfg.values.get_int("rbound.family_size", 8));
    const DenseOperator as = frac_power(a, {sigma, 0.0, PowerMethod::balakrishnan, ResolventBackend::spectral});
    const double opening = pi - (pi - theta) * sigma;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<DenseOperator> family;
    Json lambdas = Json::array();
    double sup = 0.0;
    for (int k = 0; k < count; ++k) {
        const double psi = (2.0 * unif(rng) - 1.0) * 0.95 * opening;
        const complex<double> lambda = std::polar(std::exp(-2.0 + 4.0 * unif(rng) * std::log(10.0)), psi);
        family.push_back(as.with_entries(lambda * shifted_inverse(as, lambda)));
        sup = std::max(sup, operator_norm(family.back()));
        lambdas.push_back(complex_json(lambda));
    }
    RBoundOptions ro;
    ro.seed = cfg.seed;
    ro.trials = static_cast<int>(cfg.values.get_int("rbound.trials", 32));
    const RBoundEstimate exact = rademacher_rbound_estimate(family, ro);
    ro.force_monte_carlo = true;
    const RBoundEstimate mc = rademacher_rbound_estimate(family, ro);
    write_json_file(out_path(cfg, "rbound.json"), Json{{"sigma", sigma},
                                                       {"lambdas", lambdas},
                                                       {"sup_norm", sup},
                                                       {"exhaustive", to_json(exact)},
                                                       {"monte_carlo", to_json(mc)}});
    log << "rbound: max_ratio " << exact.max_ratio << "\n";
}

void cmd_laurent(const RunConfig& cfg, std::ostream& log)
{
    const DenseOperator a = matrix_operator(cfg);
    const complex<double> lambda0 = cfg.values.has("laurent.lambda0") ? parse_complex(cfg.values.get_string("laurent.lambda0", "0"))
                                                                       : complex<double>(default_lambda0(cfg));
    const int order = static_cast<int>(cfg.values.get_int("laurent.order", 1));
    const int k_max = static_cast<int>(cfg.values.get_int("laurent.k_max", 2));
    const double radius = cfg.values.get_double("laurent.radius", 0.0);
    const int nodes = cfg.nodes ? *cfg.nodes : static_cast<int>(cfg.values.get_int("laurent.nodes", 128));
    const LaurentExpansion e = laurent_coefficients(a, lambda0, order, k_max, radius, nodes);
    Json norms = Json::object();
    for (const auto& [k, b] : e.coefficients) norms[std::to_string(k)] = operator_norm(b, a);
    const DenseOperator shifted = a.with_entries(Matrix(a.entries() + lambda0 * Matrix::Identity(a.dim(), a.dim())));
    write_json_file(out_path(cfg, "laurent.json"), Json{{"pole", complex_json(lambda0)},
                                                        {"order", order},
                                                        {"contour_radius", e.contour_radius},
                                                        {"contour_nodes", e.contour_nodes},
                                                        {"coefficient_norms", norms},
                                                        {"residuals", to_json(verify_laurent_identities(e, a))},
                                                        {"simple_pole", to_json(simple_pole_check(shifted))}});
    log << "laurent: radius " << e.contour_radius << "\n";
}

ConeFunction profile(const ConeOperator& op, double base, double amplitude, double power)
{
    Vector uh(op.grid().count());
    for (int i = 0; i < op.grid().count(); ++i) uh(i) = amplitude * std::pow(op.grid().x(i), power);
    return ConeFunction::radial(op, uh, base);
}

void cmd_commutator(const RunConfig& cfg, std::ostream& log)
{
    const double sigma = cfg.values.get_double("commutator.sigma", 0.5);
    require_open_unit(sigma, "commutator.sigma");
    const double nu = cfg.values.get_double("commutator.nu", 0.6);
    const double rho = cfg.values.get_double("commutator.rho", 0.05);
    CommutatorOptions o;
    o.c = cfg.values.get_double("commutator.c", 1.0);
    const CrossSection cs = cfg.cross_section().truncated(1);
    const ConeGrid grid = cfg.grid();
    Json runs = Json::array();
    std::vector<double> norms;
    for (int count : {grid.count() / 2, grid.count()}) {
        const ConeOperator op = assemble_cone_laplacian(cs, ConeGrid(grid.x_min(), count, grid.gamma()), Extension::with_C_omega);
        const CommutatorReport r = commutator_decay_scan(profile(op, 1.0, 0.5, 2.0), op, sigma, nu, rho, o);
        norms.push_back(r.commutator_norm);
        Json j = to_json(r);
        j["count"] = count;
        runs.push_back(j);
    }
    const double change = std::abs(norms[1] - norms[0]) / std::max(norms[1], 1e-300);
    write_json_file(out_path(cfg, "commutator.json"), Json{{"sigma", sigma}, {"nu", nu}, {"rho", rho}, {"runs", runs},
                                                           {"refinement_change", change}});
    log << "commutator: norm " << norms[1] << " change " << change << "\n";
}

struct FpmeSetup {
    ConeOperator op;
    ConeFunction u0;
    Json info;
};

FpmeSetup fpme_setup(const RunConfig& cfg, const std::string& section, const std::string& default_initial)
{
    const CrossSection cs = cfg.cross_section(section);
    const ConeOperator op = assemble_cone_laplacian(cs, cfg.grid(), Extension::with_C_omega);
    const std::string initial = cfg.values.get_string(section + ".initial", default_initial);
    const double amplitude = cfg.values.get_double(section + ".amplitude", 0.5);
    const double base = cfg.values.get_double(section + ".base", 1.0);
    Json info{{"initial", initial}, {"amplitude", amplitude}, {"base", base}};
    if (initial == "constant") return {op, ConeFunction::radial(op, Vector::Zero(op.grid().count()), base), info};
    if (initial == "bump") {
        const double power = cfg.values.get_double(section + ".bump_power", 1.0);
        info["bump_power"] = power;
        return {op, profile(op, base, amplitude, power), info};
    }
    if (initial == "eigenfunction") {
        const RadialMode mode = radial_mode(op, 1);
        ConeFunction u0 = ConeFunction::zero(op);
        u0.set_block_vector(op, 0, Vector(mode.block_vector.array() * amplitude + base));
        info["kappa"] = mode.kappa;
        return {op, u0, info};
    }
    fail(ErrorCode::ConfigError, section + ".initial must be constant, bump or eigenfunction");
}

void write_trajectory(const RunConfig& cfg, const std::string& prefix, const FpmeSetup& setup, const TrajectoryRecord& rec)
{
    {
        std::ofstream csv(out_path(cfg, prefix + "_trajectory.csv"), std::ios::binary);
        write_trajectory_csv(csv, rec);
    }
    fs::create_directories(fs::path(cfg.output_dir) / (prefix + "_snapshots"));
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
        std::ofstream csv(fs::path(cfg.output_dir) / (prefix + "_snapshots") / name, std::ios::binary);
        write_snapshot_csv(csv, setup.op, rec.snapshots[k]);
    }
}

Json trajectory_summary(const TrajectoryRecord& rec)
{
    Json warnings = Json::array();
    for (const auto& w : rec.warnings) warnings.push_back(w);
    const StepDiagnostics& last = rec.diagnostics.back();
    return Json{{"steps", rec.steps},
                {"snapshots", rec.times.size()},
                {"final_time", rec.times.back()},
                {"clamp_count", rec.clamp_count},
                {"stability_product", rec.stability_product},
                {"final_min_value", last.min_value},
                {"final_sup_norm", last.sup_norm},
                {"final_h0gamma_norm", last.h0gamma_norm},
                {"warnings", warnings},
                {"failure", rec.failure ? Json(*rec.failure) : Json(nullptr)}};
}

void cmd_fpme(const RunConfig& cfg, std::ostream& log)
{
    const FpmeConfig f = cfg.fpme();
    const FpmeSetup setup = fpme_setup(cfg, "fpme", "bump");
    const TrajectoryRecord rec = run(setup.u0, f, setup.op);
    write_trajectory(cfg, "fpme", setup, rec);
    Json summary = trajectory_summary(rec);
    summary["setup"] = setup.info;
    if (setup.info.contains("kappa") && !rec.failure) {
        // modal amplitude of the final state against the linear prediction
        const RadialMode mode = radial_mode(setup.op, 1);
        const auto& w = setup.op.blocks()[0].laplacian.inner_weights();
        const Vector phi = mode.block_vector;
        const Vector v = rec.snapshots.back().block_vector(setup.op, 0).array() - setup.info["base"].get<double>();
        const Vector wphi = w ? Vector(w->cast<std::complex<double>>().cwiseProduct(phi)) : phi;
        const double ratio = (wphi.dot(v) / wphi.dot(phi)).real() / setup.info["amplitude"].get<double>();
        summary["mode_ratio"] = ratio;
        summary["mode_ratio_linear"] = std::exp(-std::pow(mode.kappa, f.sigma) * rec.times.back());
    }
    summary["config"] = Json{{"sigma", f.sigma}, {"m", f.m}, {"dt", f.dt}, {"t_end", f.t_end}, {"grid", grid_json(setup.op.grid())}};
    write_json_file(out_path(cfg, "fpme.json"), summary);
    log << "fpme: " << rec.steps << " steps, clamps " << rec.clamp_count << "\n";
    if (rec.failure) fail(ErrorCode::SolveFailed, *rec.failure);
}

void cmd_decay(const RunConfig& cfg, std::ostream& log)
{
    FpmeConfig f;
    f.sigma = cfg.values.get_double("decay.sigma", 0.75);
    require_open_unit(f.sigma, "decay.sigma");
    f.m = cfg.values.get_double("decay.m", 2.0);
    f.dt = cfg.values.get_double("decay.dt", 1e-3);
    f.t_end = cfg.values.get_double("decay.t_end", 0.2);
    f.snapshot_every = static_cast<int>(cfg.values.get_int("decay.snapshot_every", 10));
    f.fit_x_a = cfg.values.get_double("decay.fit_x_a", f.fit_x_a);
    f.fit_x_b = cfg.values.get_double("decay.fit_x_b", f.fit_x_b);
    f.validate();
    const FpmeSetup setup = fpme_setup(cfg, "decay", "bump");
    const TrajectoryRecord rec = run(setup.u0, f, setup.op);
    if (rec.failure) fail(ErrorCode::SolveFailed, *rec.failure);
    std::size_t mid = 0;
    for (std::size_t k = 0; k < rec.times.size(); ++k)
        if (std::abs(rec.times[k] - 0.5 * f.t_end) < std::abs(rec.times[mid] - 0.5 * f.t_end)) mid = k;
    const TipDecayFit fit = tip_decay_fit(rec.snapshots[mid], setup.op.grid(), f.fit_x_a, f.fit_x_b);
    const CrossSection& cs = setup.op.cross_section();
    const double predicted = setup.op.grid().gamma() + 2.0 * f.sigma - 0.5 * (cs.n + 1);
    write_trajectory(cfg, "decay", setup, rec);
    write_json_file(out_path(cfg, "decay.json"), Json{{"time", rec.times[mid]},
                                                      {"alpha", fit.alpha},
                                                      {"r2", fit.r2},
                                                      {"fit_points", fit.points},
                                                      {"fit_window", Json::array({f.fit_x_a, f.fit_x_b})},
                                                      {"predicted_exponent", predicted},
                                                      {"meets_prediction", fit.alpha >= predicted - 0.1},
                                                      {"setup", setup.info},
                                                      {"trajectory", trajectory_summary(rec)}});
    log << "decay: alpha " << fit.alpha << " predicted " << predicted << "\n";
}

} // namespace

void dispatch(const std::string& command, const RunConfig& cfg, std::ostream& log)
{
    if (command == "assemble") return cmd_assemble(cfg, log);
    if (command == "verify") return cmd_verify(cfg, log);
    if (command == "fracpow") return cmd_fracpow(cfg, log);
    if (command == "resolvent") return cmd_resolvent(cfg, log);
    if (command == "sectorial") return cmd_sectorial(cfg, log);
    if (command == "rbound") return cmd_rbound(cfg, log);
    if (command == "laurent") return cmd_laurent(cfg, log);
    if (command == "commutator") return cmd_commutator(cfg, log);
    if (command == "fpme") return cmd_fpme(cfg, log);
    if (command == "decay") return cmd_decay(cfg, log);
    fail(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
}

} // namespace conefrac
