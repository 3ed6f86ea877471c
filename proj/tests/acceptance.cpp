// Acceptance suite: one PASS/FAIL line per criterion, each under its runtime budget.
// Usage: acceptance [criterion ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "conefrac/commands.hpp"
#include "conefrac/cone.hpp"
#include "conefrac/error.hpp"
#include "conefrac/fpme.hpp"
#include "conefrac/funcalc.hpp"
#include "conefrac/sectorial.hpp"
#include "support.hpp"

using namespace conefrac;
using conefrac::testing::random_normal;
using conefrac::testing::random_spd;
using conefrac::testing::rel_error;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("conefrac_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig run_config(const fs::path& out, std::vector<std::string> overrides = {})
{
    overrides.push_back("output_dir=" + out.string());
    return RunConfig::load(std::nullopt, overrides);
}

nlohmann::json read_json(const fs::path& p)
{
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

ConeOperator flat_cone(int count = 128, double gamma = -0.5, int modes = 1, Extension ext = Extension::with_C_omega)
{
    return assemble_cone_laplacian(CrossSection::circle(modes), ConeGrid(1e-6, count, gamma), ext);
}

Outcome oracle_equivalence()
{
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const DenseOperator a = random_normal(rng, 2 + k % 15, 1e-2, 1e4);
        for (double s : {0.25, 0.5, 0.75}) {
            const Matrix oracle = frac_power(a, {s, 0.0, PowerMethod::eigen_oracle}).entries();
            worst = std::max(worst, rel_error(frac_power(a, {s}).entries(), oracle));
        }
    }
    return {worst <= 1e-8, fmt("max relative error %.3g over 150 cases", worst)};
}

Outcome resolvent_identity()
{
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double identity = 0.0;
    double paths = 0.0;
    int compared = 0;
    FracResolventOptions half, ray;
    half.path = ResolventPath::half_line;
    ray.path = ResolventPath::sector_ray;
    for (int k = 0; k < 3; ++k) {
        const double s = std::array{0.25, 0.5, 0.75}[k];
        const DenseOperator a = random_normal(rng, 8, 1e-2, 1e3);
        const DenseOperator as = a.with_entries(frac_power(a, {s}).entries());
        const Vector v = Vector::Random(8);
        for (int t = 0; t < 20; ++t) {
            const double psi = (2.0 * unif(rng) - 1.0) * 0.95 * pi * (1.0 - s);
            const Complex lambda = std::polar(std::pow(10.0, 4.0 * unif(rng) - 2.0), psi);
            const Vector x = frac_resolvent_apply(a, s, lambda, v);
            identity = std::max(identity, (x - shifted_solve(as, lambda, v)).norm() / x.norm());
            const auto [lo, hi] = admissible_ray_window(s, lambda, 0.0);
            if (lo < hi) {
                const Vector xh = frac_resolvent_apply(a, s, lambda, v, half);
                const Vector xr = frac_resolvent_apply(a, s, lambda, v, ray);
                paths = std::max(paths, (xh - xr).norm() / xh.norm());
                ++compared;
            }
        }
    }
    return {identity <= 1e-7 && paths <= 1e-7 && compared > 0,
            fmt("identity %.3g over 60 points; half-line vs ray %.3g over %d points", identity, paths, compared)};
}

Outcome shift_scaling()
{
    double worst = 0.0;
    for (double s : {0.25, 0.5}) {
        const auto r = shift_comparison_probe(DenseOperator::diagonal({0, 1}), s, {1e-4, 1e-3, 1e-2, 1e-1});
        worst = std::max(worst, std::abs(r.slope - s));
    }
    return {worst <= 0.02, fmt("max |slope - sigma| %.3g", worst)};
}

Outcome power_resolvent_decay()
{
    std::mt19937_64 rng(404);
    double margin = -1e300;
    for (int k = 0; k < 10; ++k) {
        const DenseOperator a = random_spd(rng, 4 + k % 5, 1e-2, 1e2);
        for (double s : {0.25, 0.5, 0.75})
            for (double theta : {0.0, pi / 2}) {
                const DecayFit f = power_resolvent_decay_fit(a, s, theta);
                margin = std::max(margin, f.exponent_fit - (-(1.0 - s) + 0.05));
            }
    }
    return {margin <= 0.0, fmt("max slope - (-(1-sigma) + 0.05) = %.3g", margin)};
}

Outcome laurent_identities()
{
    Matrix nil = Matrix::Zero(2, 2);
    nil(0, 1) = 1.0;
    const DenseOperator d02 = DenseOperator::diagonal({0, 2});
    const DenseOperator id = DenseOperator::identity(2);
    const DenseOperator n2(nil);
    double small = 0.0;
    small = std::max(small, verify_laurent_identities(laurent_coefficients(d02, 0.0, 1, 2), d02).at("max"));
    small = std::max(small, verify_laurent_identities(laurent_coefficients(id, 0.0, 1, 2), id).at("max"));
    small = std::max(small, verify_laurent_identities(laurent_coefficients(n2, 0.0, 2, 2, 1.0), n2).at("max"));

    const DenseOperator cone = flat_cone().negative_laplacian(1);
    const LaurentExpansion e = laurent_coefficients(cone, 0.0, 1, 2);
    const auto res = verify_laurent_identities(e, cone);
    const double below = operator_norm(e.coefficients.at(-2), cone);
    const SimplePoleReport pole = simple_pole_check(cone);
    return {small <= 1e-8 && res.at("max") <= 1e-6 && below <= 1e-8 && pole.is_simple,
            fmt("examples %.3g; cone (dim %d) %.3g, B_-2 %.3g, simple pole %s", small, static_cast<int>(cone.dim()),
                res.at("max"), below, pole.is_simple ? "yes" : "no")};
}

Outcome rbound_mechanism()
{
    const double sigma = 0.5;
    const double theta = 0.75 * pi;
    const DenseOperator lap = flat_cone(64).negative_laplacian(1);
    const DenseOperator as = lap.with_entries(
        frac_power(lap, {sigma, 0.0, PowerMethod::resolvent_limit, ResolventBackend::spectral}).entries());
    const double opening = pi - (pi - theta) * sigma;
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<DenseOperator> family;
    double sup = 0.0;
    for (int k = 0; k < 8; ++k) {
        const Complex lambda = std::polar(std::pow(10.0, 4.0 * unif(rng) - 2.0), (2.0 * unif(rng) - 1.0) * 0.95 * opening);
        family.push_back(as.with_entries(lambda * shifted_inverse(as, lambda)));
        sup = std::max(sup, operator_norm(family.back()));
    }
    RBoundOptions o;
    o.seed = 606;
    o.trials = 32;
    const RBoundEstimate exact = rademacher_rbound_estimate(family, o);
    o.force_monte_carlo = true;
    const RBoundEstimate mc = rademacher_rbound_estimate(family, o);
    const double gap = std::abs(exact.max_ratio - mc.max_ratio) / exact.max_ratio;
    return {std::isfinite(exact.max_ratio) && exact.max_ratio <= sup + 1e-6 && gap <= 0.05,
            fmt("max_ratio %.6g, sup norm %.6g, exhaustive vs Monte Carlo %.3g", exact.max_ratio, sup, gap)};
}

Outcome geometry()
{
    const WeightWindow wc = weight_window(CrossSection::circle());
    const WeightWindow ws = weight_window(CrossSection::sphere());
    const double mu_c = mu_exponents(CrossSection::circle())[1];
    const double mu_s = mu_exponents(CrossSection::sphere())[1];
    std::vector<double> qc, qs;
    for (const auto& e : asymptotics_exponents(CrossSection::circle(), -0.5)) qc.push_back(e.q);
    for (const auto& e : asymptotics_exponents(CrossSection::sphere(), 0.0)) qs.push_back(e.q);
    const double err = std::max({std::abs(mu_c - 1.0), std::abs(mu_s - 1.5), std::abs(wc.gamma_lo + 1.0),
                                 std::abs(wc.gamma_hi), std::abs(ws.gamma_lo + 0.5), std::abs(ws.gamma_hi - 0.5),
                                 std::abs(wc.sigma0 - 0.5), std::abs(ws.sigma0 - 0.5)});
    const bool q_ok = qc == std::vector<double>{0.0, 1.0} && qs == std::vector<double>{0.0, 1.0};
    return {err <= 1e-14 && q_ok, fmt("max formula error %.3g, exponent sets %s", err, q_ok ? "match" : "differ")};
}

Outcome dilation()
{
    const ConeOperator op = assemble_cone_laplacian(CrossSection::circle(2), ConeGrid(1e-6, 256, -0.5),
                                                    Extension::with_C_omega);
    double worst = 0.0;
    for (int k : {1, 2, 4}) {
        worst = std::max(worst, dilation_covariance_check(op, 1.0, k));
        DilationOptions o;
        o.block = 1;
        worst = std::max(worst, dilation_covariance_check(op, Complex(0.5, 2.0), k, o));
    }
    return {worst <= 1e-10, fmt("max interior residual %.3g", worst)};
}

Outcome dichotomy()
{
    std::string detail;
    bool ok = true;
    for (double gamma : {-0.75, -0.5, -0.25}) {
        const SpectrumReport with = spectrum_check(flat_cone(128, gamma, 8, Extension::with_C_omega));
        const SpectrumReport without = spectrum_check(flat_cone(128, gamma, 8, Extension::minimal));
        ok = ok && with.ok() && without.ok() && with.kernel_dim == 1 && without.kernel_dim == 0;
        detail += fmt("gamma %.2f: %d/%d  ", gamma, with.kernel_dim, without.kernel_dim);
    }
    return {ok, detail + "(kernel with / without C_omega)"};
}

double mode_ratio(const ConeOperator& op, const RadialMode& mode, const ConeFunction& u, double base, double amp)
{
    const auto& w = op.blocks()[0].laplacian.inner_weights();
    const Vector phi = mode.block_vector;
    const Vector v = u.block_vector(op, 0).array() - base;
    const Vector wphi = w->cast<Complex>().cwiseProduct(phi);
    return (wphi.dot(v) / wphi.dot(phi)).real() / amp;
}

Outcome linear_mode()
{
    const ConeOperator op = flat_cone();
    const FracGenerator gen(op, 0.5);
    const RadialMode mode = radial_mode(op, 1);
    const double base = 1.0;
    const double amp = 0.1;
    const double t_end = 0.05;
    ConeFunction u0 = ConeFunction::zero(op);
    u0.set_block_vector(op, 0, Vector(mode.block_vector.array() * amp + base));
    const double exact = std::exp(-std::sqrt(mode.kappa) * t_end);
    auto final_ratio = [&](double dt) {
        FpmeConfig cfg;
        cfg.sigma = 0.5;
        cfg.m = 1.0;
        cfg.dt = dt;
        cfg.t_end = t_end;
        cfg.snapshot_every = 1000000;
        const TrajectoryRecord rec = run(u0, cfg, op, gen);
        if (rec.failure) throw Error(ErrorCode::SolveFailed, *rec.failure);
        return mode_ratio(op, mode, rec.snapshots.back(), base, amp);
    };
    const double fine = final_ratio(1e-4);
    const double coarse = final_ratio(2e-4);
    const double order = std::abs(coarse - exact) / std::abs(fine - exact);
    return {std::abs(fine - exact) <= 1e-3 && order >= 1.8 && order <= 2.2,
            fmt("kappa %.6g: |ratio - exp(-kappa^0.5 T)| = %.3g, error ratio dt 2e-4/1e-4 = %.4g", mode.kappa,
                std::abs(fine - exact), order)};
}

Outcome steady_state()
{
    const ConeOperator op = flat_cone();
    FpmeConfig cfg;
    cfg.sigma = 0.5;
    cfg.m = 2.0;
    cfg.dt = 1e-4;
    cfg.t_end = 0.1;
    cfg.snapshot_every = 100;
    const TrajectoryRecord flat = run(ConeFunction::radial(op, Vector::Zero(op.grid().count()), 1.0), cfg, op);
    double drift = 0.0;
    for (const auto& snap : flat.snapshots)
        drift = std::max(drift, (synthesize(op, snap).array() - 1.0).abs().maxCoeff());

    FpmeConfig reg;
    reg.sigma = 0.75;
    reg.m = 2.0;
    reg.dt = 1e-3;
    reg.t_end = 0.1;
    Vector bump(op.grid().count());
    for (int i = 0; i < op.grid().count(); ++i) bump(i) = op.grid().x(i);
    const TrajectoryRecord rec = run(ConeFunction::radial(op, bump, 1.0), reg, op);
    return {flat.steps == 1000 && drift <= 1e-10 && !flat.failure && rec.clamp_count == 0 && !rec.failure,
            fmt("drift %.3g over %d steps; porous bump clamps %d", drift, flat.steps, rec.clamp_count)};
}

Outcome tip_decay()
{
    const fs::path out = scratch("decay");
    std::ostringstream log;
    dispatch("decay", run_config(out), log);
    const auto j = read_json(out / "decay.json");
    const double alpha = j["alpha"];
    const double predicted = j["predicted_exponent"];
    return {alpha >= predicted - 0.1, fmt("alpha %.4g at t = %.3g, predicted %.3g", alpha, j["time"].get<double>(), predicted)};
}

Outcome commutator()
{
    const fs::path out = scratch("commutator");
    std::ostringstream log;
    dispatch("commutator", run_config(out), log);
    const auto j = read_json(out / "commutator.json");
    const double change = j["refinement_change"];
    bool finite = true;
    double mu_exp = -1e300;
    for (const auto& r : j["runs"]) {
        finite = finite && std::isfinite(r["commutator_norm"].get<double>());
        mu_exp = std::max(mu_exp, r["mu_exponent"].get<double>());
    }
    return {finite && change < 0.25 && mu_exp < -1.0,
            fmt("norm change 64->128 %.3g, mu exponent %.4g", change, mu_exp)};
}

Outcome reproducibility()
{
    const fs::path a = scratch("verify_a");
    const fs::path b = scratch("verify_b");
    std::ostringstream log;
    dispatch("verify", run_config(a, {"seed=42"}), log);
    dispatch("verify", run_config(b, {"seed=42"}), log);
    const std::string ja = slurp(a / "verify.json");
    return {!ja.empty() && ja == slurp(b / "verify.json"), fmt("verify.json %zu bytes, identical", ja.size())};
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {1, "fractional power matches eigen oracle", 10, oracle_equivalence},
        {2, "fractional resolvent identity and path agreement", 30, resolvent_identity},
        {3, "shift comparison scaling", 5, shift_scaling},
        {4, "power-resolvent decay", 20, power_resolvent_decay},
        {5, "Laurent identities and simple pole", 30, laurent_identities},
        {6, "R-bound of the fractional resolvent family", 60, rbound_mechanism},
        {7, "cone geometry formulas", 1, geometry},
        {8, "dilation covariance", 5, dilation},
        {9, "extension dichotomy", 10, dichotomy},
        {10, "FPME linear mode", 60, linear_mode},
        {11, "FPME steady state and positivity", 60, steady_state},
        {12, "tip decay rate", 60, tip_decay},
        {13, "commutator probe", 120, commutator},
        {14, "reproducibility", 1e9, reproducibility},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds <= c.budget_seconds;
        const bool passed = o.passed && in_time;
        failures += passed ? 0 : 1;
        std::cout << (passed ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail
                  << fmt(" [%.2fs", seconds) << (c.budget_seconds < 1e9 ? fmt(" / %gs]", c.budget_seconds) : "]")
                  << (in_time ? "" : " over budget") << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
