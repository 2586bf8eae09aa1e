#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sps/attack.hpp"
#include "sps/errors.hpp"
#include "sps/model.hpp"
#include "sps/protection.hpp"
#include "sps/simulation.hpp"

namespace sps {

/// One parse or validation problem, with the 1-based source line it refers
/// to (0 when no location applies).
struct ScenarioIssue {
  int line = 0;
  std::string field;
  std::string message;
};

/// Carries every issue found in a scenario document; parsing does not stop
/// at the first problem.
class ScenarioError : public Error {
 public:
  ScenarioError(std::string what, std::vector<ScenarioIssue> issues)
      : Error(std::move(what)), issues_(std::move(issues)) {}
  const std::vector<ScenarioIssue>& issues() const { return issues_; }

 private:
  std::vector<ScenarioIssue> issues_;
};

enum class InitialMode { Equilibrium, Explicit };

struct InitialCondition {
  InitialMode mode = InitialMode::Equilibrium;
  /// Used when mode == Explicit. Its t and i_l fields are ignored: runs start
  /// at t = 0 and the DC load always comes from the scenario's load section.
  SystemState explicit_state;
  // Optional additive offsets applied after the equilibrium solve.
  std::vector<double> perturb_delta_omega;  ///< per machine (empty = none)
  std::vector<double> perturb_theta;        ///< per machine (empty = none)

  friend bool operator==(const InitialCondition&, const InitialCondition&) = default;
};

enum class OutputKind {
  Timeseries,
  PhasePortrait,
  OmegaThetaPortrait,
  TripLog,
  AnalyticOverlay,
};

/// Declarative description of one experiment.
struct Scenario {
  std::string name;
  Model model;
  double i_l = 0.0;  ///< DC load current (exogenous)
  InitialCondition initial;
  std::vector<AttackSpec> attacks;
  std::vector<FaultSpec> faults;
  IntegratorConfig integrator;
  RelayConfig relays;
  SimOptions options;
  std::vector<OutputKind> outputs;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses and fully validates a scenario document (YAML). All problems are
/// aggregated into one ScenarioError with line references.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario(const std::filesystem::path& file);

/// Inverse of parse_scenario: parse_scenario(serialize_scenario(s)) == s for
/// every valid scenario.
std::string serialize_scenario(const Scenario& s);

/// Re-parses the document with the scalar at `path` replaced by `value`.
/// The path is dot-separated with 1-based sequence indices, e.g.
/// "attacks.1.gamma" or "load.i_l". Used by parameter sweeps.
Scenario scenario_with_override(const std::string& text, const std::string& path,
                                double value);

struct RunReport {
  std::vector<std::filesystem::path> files;
  double max_abs_delta_omega = 0.0;
  double max_abs_dvdc_pct = 0.0;
  std::size_t trip_count = 0;
  std::size_t alarm_count = 0;
  bool attack_success = false;  ///< true iff at least one relay tripped
};

/// Executes the scenario end to end: initial condition, simulation, relay
/// evaluation and every requested output file under out_dir. Files are
/// written atomically (write-then-rename).
RunReport run_scenario(const Scenario& scenario,
                       const std::filesystem::path& out_dir);

/// The simulated series plus everything derived from it; run_scenario's
/// working set, exposed for callers that want the data without files.
struct RunResult {
  SystemState initial;
  TimeSeries series;
  std::vector<TripEvent> trips;
  std::vector<TripEvent> alarms;
};

RunResult execute_scenario(const Scenario& scenario);

/// Closed-form rotor trajectories for one machine of the scenario, applied
/// piecewise over the attack windows that touch its rotor-side channels.
/// Columns: delta_omega_cf, theta_cf.
TimeSeries analytic_trajectory(const Scenario& scenario, std::size_t machine);

void emit_omega_theta_portrait(const TimeSeries& series, std::size_t machine,
                               std::ostream& out);

/// Writes a TimeSeries as CSV: a `#` comment line naming the tool version and
/// scenario, a header row with unit-annotated column names, then one row per
/// sample with 17 significant digits.
void write_timeseries_csv(const TimeSeries& series, const std::string& scenario_name,
                          std::ostream& out);

/// Atomic file write: content goes to a temporary sibling first.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace sps
