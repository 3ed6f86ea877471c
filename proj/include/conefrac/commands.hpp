#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "conefrac/cone.hpp"
#include "conefrac/config.hpp"
#include "conefrac/fpme.hpp"
#include "conefrac/funcalc.hpp"

namespace conefrac {

/// Everything a subcommand reads: the config file plus flag overrides.
struct RunConfig {
    KeyValueConfig values;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    std::optional<int> nodes;

    /// Reads `path` when given, then applies "key=value" overrides.
    static RunConfig load(const std::optional<std::string>& path, const std::vector<std::string>& overrides);

    [[nodiscard]] CrossSection cross_section(const std::string& section = "cross_section") const;
    [[nodiscard]] ConeGrid grid() const;
    [[nodiscard]] Extension extension() const;
    [[nodiscard]] PowerSpec power() const;
    [[nodiscard]] FpmeConfig fpme() const;
};

inline const std::vector<std::string> command_names{"assemble", "verify",     "fracpow", "resolvent", "sectorial",
                                                    "rbound",   "laurent",    "commutator", "fpme",   "decay"};

/// Runs one subcommand, writing its reports under cfg.output_dir. Errors are
/// thrown as conefrac::Error.
void dispatch(const std::string& command, const RunConfig& cfg, std::ostream& log);

/// 0 on success, 2 for configuration/validation problems, 3 for numerical failures.
int exit_code_for(const std::exception& e);

} // namespace conefrac
