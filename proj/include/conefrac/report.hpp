#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "conefrac/cone.hpp"
#include "conefrac/fpme.hpp"
#include "conefrac/funcalc.hpp"
#include "conefrac/sectorial.hpp"

namespace conefrac {

using Json = nlohmann::ordered_json;

Json to_json(const SectorProbeReport& r);
Json to_json(const RBoundEstimate& r);
Json to_json(const DecayFit& r);
Json to_json(const ShiftComparisonReport& r);
Json to_json(const SimplePoleReport& r);
Json to_json(const SpectrumReport& r);
Json to_json(const CommutatorReport& r);
Json to_json(const LinearizationReport& r);
Json to_json(const std::map<std::string, double>& residuals);
Json complex_json(std::complex<double> z);

/// Header "lambda_re,lambda_im,bound", 17 significant digits.
void write_sector_csv(std::ostream& out, const SectorProbeReport& r);

/// Writes pretty-printed JSON with a trailing newline.
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& text);

} // namespace conefrac
