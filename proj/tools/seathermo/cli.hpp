#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "sea/core.hpp"
#include "sea/criteria.hpp"
#include "sea/dynamics.hpp"
#include "sea/statespace.hpp"

namespace sea::cli {

// Exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Bad configuration or flags; maps to kExitUsage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CanonicalInit {
  double beta = 0.0;
};
struct UniformInit {
  Support support;
};
using InitialSpec = std::variant<std::vector<double>, CanonicalInit, UniformInit>;

struct OutputSpec {
  std::string trajectory;
  std::string summary;
};

struct RunConfig {
  std::vector<double> spectrum;
  InitialSpec initial;
  double k = 1.0;
  double tau = 1.0;
  IntegratorConfig integrator;
  OutputSpec outputs;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Builds the initial state; explicit probability lists are validated in
/// lenient mode with a warning on `warn` if they needed rescaling.
StateDistribution build_initial(const RunConfig& config, const EnergySpectrum& spectrum,
                                std::ostream& warn);

/// %.17g: enough digits to round-trip any double.
std::string format_number(double x);

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

struct SimulationSummary {
  std::vector<double> final_state;
  double beta_of_e = 0.0;
  BetaLimit beta_limit = BetaLimit::finite;
  double linf_to_canonical = 0.0;
  double linf_to_canonical_initial = 0.0;
  double max_energy_drift = 0.0;
  double max_trace_drift = 0.0;
  double min_dsdt = 0.0;
};

/// Reference is the (partially) canonical state over the initial support at
/// the initial energy.
SimulationSummary summarize(const Trajectory& trajectory);
nlohmann::json to_json(const SimulationSummary& summary);

nlohmann::json to_json(const CriteriaReport& report);
std::string criteria_table(const CriteriaReport& report);

void write_curve_csv(std::ostream& os, const DiagramCurve& curve);
/// Standalone SVG with the S_max boundary, the S = 0 segment and axes.
std::string curve_svg(const DiagramCurve& curve);

/// JSON text with a trailing newline; keys are sorted lexicographically.
std::string dump(const nlohmann::json& j);

/// Runs the tool with `args` (excluding the program name). Output goes to
/// `out` unless a subcommand writes files; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sea::cli
