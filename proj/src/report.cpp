#include "conefrac/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "conefrac/error.hpp"

namespace conefrac {

Json complex_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json to_json(const SectorProbeReport& r)
{
    Json samples = Json::array();
    for (const auto& s : r.samples) samples.push_back({{"re", s.lambda.real()}, {"im", s.lambda.imag()}, {"value", s.bound_value}});
    Json skipped = Json::array();
    for (const auto& z : r.skipped) skipped.push_back(complex_json(z));
    return Json{{"theta", r.angle_theta},
                {"samples", samples},
                {"estimated_K", r.estimated_K},
                {"min_modulus_sampled", r.min_modulus_sampled},
                {"max_modulus_sampled", r.max_modulus_sampled},
                {"skipped", skipped},
                {"not_sectorial_suspected", r.not_sectorial_suspected}};
}

Json to_json(const RBoundEstimate& r)
{
    return Json{{"family_size", r.family_size},           {"trials", r.trials},
                {"vector_dim", r.vector_dim},             {"max_ratio", r.max_ratio},
                {"uniform_norm_bound", r.uniform_norm_bound}, {"max_single_ratio", r.max_single_ratio}};
}

Json to_json(const DecayFit& r) { return Json{{"C_fit", r.C_fit}, {"exponent_fit", r.exponent_fit}}; }

Json to_json(const ShiftComparisonReport& r)
{
    Json samples = Json::array();
    for (const auto& s : r.samples) samples.push_back({{"c", s.c}, {"measured", s.measured}, {"envelope", s.envelope}});
    return Json{{"samples", samples}, {"fitted_m", r.fitted_m}, {"slope", r.slope}, {"scaling_holds", r.scaling_holds}};
}

Json to_json(const SimplePoleReport& r)
{
    return Json{{"is_simple", r.is_simple}, {"sup_value", r.sup_value}, {"max_decade_growth", r.max_decade_growth}};
}

Json to_json(const SpectrumReport& r)
{
    Json blocks = Json::array();
    for (const auto& b : r.blocks) {
        const double lo = b.eigenvalues.empty() ? 0.0 : b.eigenvalues.front();
        const double hi = b.eigenvalues.empty() ? 0.0 : b.eigenvalues.back();
        blocks.push_back({{"j", b.j},
                          {"multiplicity", b.multiplicity},
                          {"min_eig", lo},
                          {"max_eig", hi},
                          {"kernel_count", b.kernel_count},
                          {"symmetry_defect", b.symmetry_defect}});
    }
    return Json{{"kernel_dim", r.kernel_dim},     {"expected_kernel_dim", r.expected_kernel_dim},
                {"min_eig", r.min_eigenvalue},    {"max_eig", r.max_eigenvalue},
                {"nonnegative", r.nonnegative},   {"symmetric", r.symmetric},
                {"blocks", blocks}};
}

Json to_json(const CommutatorReport& r)
{
    Json samples = Json::array();
    for (const auto& s : r.samples) samples.push_back({{"lambda_modulus", s[0]}, {"mu_modulus", s[1]}, {"value", s[2]}});
    return Json{{"commutator_norm", r.commutator_norm}, {"lambda_exponent", r.lambda_exponent},
                {"mu_exponent", r.mu_exponent},         {"alpha", r.alpha},
                {"lambda_bound_holds", r.lambda_bound_holds}, {"samples", samples}};
}

Json to_json(const LinearizationReport& r)
{
    Json probes = Json::array();
    for (std::size_t k = 0; k < r.c_values.size(); ++k)
        probes.push_back({{"c", r.c_values[k]},
                          {"estimated_K", r.probes[k].estimated_K},
                          {"growth", r.growth[k]},
                          {"not_sectorial_suspected", r.probes[k].not_sectorial_suspected}});
    Json out{{"probes", probes}, {"rbound", to_json(r.rbound)}};
    out["c_star"] = r.c_star ? Json(*r.c_star) : Json(nullptr);
    return out;
}

Json to_json(const std::map<std::string, double>& residuals)
{
    Json out = Json::object();
    for (const auto& [k, v] : residuals) out[k] = v;
    return out;
}

void write_sector_csv(std::ostream& out, const SectorProbeReport& r)
{
    out << "lambda_re,lambda_im,bound\n";
    char buf[128];
    for (const auto& s : r.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.lambda.real(), s.lambda.imag(), s.bound_value);
        out << buf;
    }
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    out << text;
    if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

} // namespace conefrac
