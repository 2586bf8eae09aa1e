// Command line front end: validate, run, analytic and sweep over scenario
// files. Exit codes: 0 success, 1 scenario error, 2 numerical failure.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sps/errors.hpp"
#include "sps/scenario.hpp"
#include "sps/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenario = 1;
constexpr int kExitNumerical = 2;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) {
    throw sps::ScenarioError("cannot open " + p.string(), {});
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void print_issues(const sps::ScenarioError& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  for (const auto& issue : e.issues()) {
    if (issue.line > 0) {
      std::fprintf(stderr, "  line %d: %s: %s\n", issue.line,
                   issue.field.c_str(), issue.message.c_str());
    } else {
      std::fprintf(stderr, "  %s: %s\n", issue.field.c_str(),
                   issue.message.c_str());
    }
  }
}

void print_report(const sps::Scenario& sc, const sps::RunReport& rep) {
  std::printf("scenario:            %s\n", sc.name.c_str());
  std::printf("max |delta_omega|:   %.6e p.u.\n", rep.max_abs_delta_omega);
  std::printf("max |dV_dc|/V_dc*:   %.4f %%\n", rep.max_abs_dvdc_pct);
  std::printf("trips:               %zu\n", rep.trip_count);
  std::printf("alarms:              %zu\n", rep.alarm_count);
  std::printf("attack success:      %s\n", rep.attack_success ? "true" : "false");
  for (const auto& f : rep.files) {
    std::printf("wrote %s\n", f.string().c_str());
  }
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int run_cmd(const std::string& file, const std::string& out_dir) {
  const sps::Scenario sc = sps::load_scenario(file);
  const sps::RunReport rep = sps::run_scenario(sc, out_dir);
  print_report(sc, rep);
  return kExitOk;
}

int validate_cmd(const std::string& file) {
  const sps::Scenario sc = sps::load_scenario(file);
  std::printf("%s: valid (%zu machines, %zu attack(s), %zu fault(s))\n",
              sc.name.c_str(), sc.model.machine_count(), sc.attacks.size(),
              sc.faults.size());
  return kExitOk;
}

int analytic_cmd(const std::string& file, const std::string& out_dir) {
  const sps::Scenario sc = sps::load_scenario(file);
  std::filesystem::create_directories(out_dir);

  std::ostringstream os;
  os << "# " << sps::kToolName << " " << sps::kToolVersion
     << " scenario=" << sc.name << "\n";
  std::vector<sps::TimeSeries> per_machine;
  os << "time_s";
  for (std::size_t m = 0; m < sc.model.machine_count(); ++m) {
    per_machine.push_back(sps::analytic_trajectory(sc, m));
    for (const auto& [name, _] : per_machine.back().columns) {
      os << ',' << name;
    }
  }
  os << '\n';
  if (!per_machine.empty()) {
    for (std::size_t k = 0; k < per_machine[0].times.size(); ++k) {
      os << fmt17(per_machine[0].times[k]);
      for (const auto& ts : per_machine) {
        for (const auto& [_, values] : ts.columns) {
          os << ',' << fmt17(values[k]);
        }
      }
      os << '\n';
    }
  }
  const auto path =
      std::filesystem::path(out_dir) / (sc.name + "_analytic.csv");
  sps::write_file_atomic(path, os.str());
  std::printf("wrote %s\n", path.string().c_str());
  return kExitOk;
}

int sweep_cmd(const std::string& file, const std::string& param,
              const std::string& values_csv, const std::string& out_dir) {
  const std::string text = read_file(file);
  std::vector<double> values;
  std::string tok;
  std::istringstream vs(values_csv);
  while (std::getline(vs, tok, ',')) {
    values.push_back(std::stod(tok));
  }
  if (values.empty()) {
    throw sps::ScenarioError("sweep needs at least one value", {});
  }

  std::filesystem::create_directories(out_dir);
  std::ostringstream os;
  os << "# " << sps::kToolName << " " << sps::kToolVersion << " sweep=" << param
     << "\n";
  os << "value,max_abs_delta_omega_pu,max_abs_dvdc_pct,trip_count,attack_success\n";
  std::string base_name;
  for (const double v : values) {
    const sps::Scenario sc = sps::scenario_with_override(text, param, v);
    base_name = sc.name;
    const sps::RunResult res = sps::execute_scenario(sc);
    double max_dw = 0.0;
    for (std::size_t m = 1; m <= res.series.n_machines; ++m) {
      for (double x :
           res.series.column("delta_omega_" + std::to_string(m) + "_pu")) {
        max_dw = std::max(max_dw, std::abs(x));
      }
    }
    double max_dv = 0.0;
    const char* vdc_name = res.series.dc_units == sps::DcUnits::PerUnit
                               ? "v_dc_pu"
                               : "v_dc_V";
    for (double x : res.series.column(vdc_name)) {
      max_dv = std::max(max_dv, std::abs(x - res.series.v_dc_ref) /
                                    res.series.v_dc_ref * 100.0);
    }
    os << fmt17(v) << ',' << fmt17(max_dw) << ',' << fmt17(max_dv) << ','
       << res.trips.size() << ',' << (res.trips.empty() ? 0 : 1) << '\n';
  }
  const auto path =
      std::filesystem::path(out_dir) / (base_name + "_sweep.csv");
  sps::write_file_atomic(path, os.str());
  std::printf("wrote %s\n", path.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("MVDC shipboard power system transient toolkit (") +
               sps::kToolVersion + ")"};
  app.require_subcommand(1);

  std::string file, out_dir = "out", format = "csv", param, values;
  unsigned seed = 0;  // reserved; the simulation is deterministic

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("file", file, "scenario file")->required();
    if (with_out) {
      cmd->add_option("--out-dir", out_dir, "output directory");
      cmd->add_option("--format", format, "output format")
          ->check(CLI::IsMember({"csv"}));
      cmd->add_option("--seed", seed, "reserved (runs are deterministic)");
    }
  };

  CLI::App* c_run = app.add_subcommand("run", "simulate a scenario end to end");
  add_common(c_run, true);
  CLI::App* c_analytic =
      app.add_subcommand("analytic", "emit the closed-form rotor trajectories");
  add_common(c_analytic, true);
  CLI::App* c_validate =
      app.add_subcommand("validate", "parse and validate a scenario");
  add_common(c_validate, false);
  CLI::App* c_sweep =
      app.add_subcommand("sweep", "re-run a scenario over parameter values");
  add_common(c_sweep, true);
  c_sweep->add_option("--param", param, "dot path of the value to vary")
      ->required();
  c_sweep
      ->add_option("--values", values,
                   "comma-separated list of values for --param")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(c_run)) {
      return run_cmd(file, out_dir);
    }
    if (app.got_subcommand(c_analytic)) {
      return analytic_cmd(file, out_dir);
    }
    if (app.got_subcommand(c_validate)) {
      return validate_cmd(file);
    }
    if (app.got_subcommand(c_sweep)) {
      return sweep_cmd(file, param, values, out_dir);
    }
  } catch (const sps::ScenarioError& e) {
    print_issues(e);
    return kExitScenario;
  } catch (const sps::Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
