#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdris/montecarlo.hpp"

// JSON configuration and artifact serialization at double precision. All
// numeric output is round-trip exact so golden files are stable.
namespace bdris::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::PMax;
  std::vector<double> points;       // dBm for power axes, counts otherwise
  std::vector<Method> methods;      // defaults to the scenario method
};

struct LoadedScenario {
  ScenarioConfig<double> scenario;
  std::optional<SweepSpec> sweep;
};

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Parses a scenario from JSON text, filling unspecified fields with the
// built-in defaults. Power fields accept either a *_dbm or *_mw spelling;
// giving both is an error. Unknown keys are rejected with their path.
LoadedScenario parse_config_text(const std::string& text);
LoadedScenario parse_config_file(const std::string& path);

// parse_config_text on the given text (or "{}" when empty) after applying
// dotted-path key=value overrides, e.g. "powers.p_max_dbm=25".
LoadedScenario load_config(const std::string& text,
                           const std::vector<std::string>& overrides);

std::string config_to_json(const ScenarioConfig<double>& scenario,
                           const std::optional<SweepSpec>& sweep = std::nullopt);

// CSV with header (iteration,secrecy_rate,p_s_mw,interference_slack_mw).
std::string trace_to_csv(const ConvergenceTrace<double>& trace);

// CSV with header (axis_value,method,mean_secrecy_bps_hz,std_err,trials).
std::string sweep_to_csv(const SweepResult<double>& result);

// Full sweep artifact embedding the resolved scenario for provenance.
std::string sweep_to_json(const SweepResult<double>& result,
                          const ScenarioConfig<double>& scenario);

// Single-trial artifact embedding the resolved scenario for provenance.
std::string trial_summary_json(const TrialResult<double>& trial,
                               const ScenarioConfig<double>& scenario,
                               std::uint64_t trial_index);

}  // namespace bdris::io
