#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "regopt/solver.hpp"

namespace regopt {

/// A full run configuration: market, institution, utility, constraint and
/// optional output settings.
struct RunConfig {
    MarketParams market{0.08, 0.03, 0.2, 1.0};
    Institution institution{100.0, 100.0};
    CrraUtility utility{0.5};
    RiskConstraint constraint = NoConstraint{};
    std::string out_format = "json"; ///< "json" or "csv"
    std::string out_path;            ///< empty = stdout
};

/// Thrown on malformed configuration; what() names the offending field.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

nlohmann::json solution_to_json(const Solution& sol);

/// Rebuilds the wealth profile from solution JSON (round trips boundaries and
/// branch parameters; "inf" encodes +infinity).
WealthProfile profile_from_json(const nlohmann::json& j);

/// Formats a double with 12 significant digits, locale independent.
std::string format_number(double v);

} // namespace regopt
