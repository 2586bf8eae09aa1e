#include "sps/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "sps/analytic.hpp"
#include "sps/errors.hpp"
#include "sps/version.hpp"

namespace sps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int mark_line(const YAML::Node& n) {
  return n.IsDefined() && n.Mark().line >= 0 ? n.Mark().line + 1 : 0;
}

struct Ctx {
  std::vector<ScenarioIssue> issues;

  void add(const YAML::Node& n, std::string field, std::string msg) {
    issues.push_back({mark_line(n), std::move(field), std::move(msg)});
  }
  bool ok() const { return issues.empty(); }
};

bool parse_double_scalar(const std::string& s, double& out) {
  if (s == ".inf" || s == ".Inf" || s == "inf" || s == "infinity") {
    out = kInf;
    return true;
  }
  if (s == "-.inf" || s == "-.Inf" || s == "-inf" || s == "-infinity") {
    out = -kInf;
    return true;
  }
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

double get_double(Ctx& ctx, const YAML::Node& parent, const std::string& key,
                  double fallback, bool required = false) {
  const YAML::Node n = parent[key];
  if (!n.IsDefined()) {
    if (required) {
      ctx.add(parent, key, "required field is missing");
    }
    return fallback;
  }
  double v = fallback;
  if (!n.IsScalar() || !parse_double_scalar(n.Scalar(), v)) {
    ctx.add(n, key, "expected a number");
    return fallback;
  }
  return v;
}

std::size_t get_size(Ctx& ctx, const YAML::Node& parent, const std::string& key,
                     std::size_t fallback) {
  const double v = get_double(ctx, parent, key, static_cast<double>(fallback));
  if (v < 0.0 || v != std::floor(v)) {
    ctx.add(parent[key], key, "expected a non-negative integer");
    return fallback;
  }
  return static_cast<std::size_t>(v);
}

bool get_bool(Ctx& ctx, const YAML::Node& parent, const std::string& key,
              bool fallback) {
  const YAML::Node n = parent[key];
  if (!n.IsDefined()) {
    return fallback;
  }
  try {
    return n.as<bool>();
  } catch (...) {
    ctx.add(n, key, "expected true or false");
    return fallback;
  }
}

std::string get_string(Ctx& ctx, const YAML::Node& parent, const std::string& key,
                       const std::string& fallback, bool required = false) {
  const YAML::Node n = parent[key];
  if (!n.IsDefined()) {
    if (required) {
      ctx.add(parent, key, "required field is missing");
    }
    return fallback;
  }
  if (!n.IsScalar()) {
    ctx.add(n, key, "expected a string");
    return fallback;
  }
  return n.Scalar();
}

void check_keys(Ctx& ctx, const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsDefined() || !node.IsMap()) {
    return;
  }
  for (const auto& kv : node) {
    const std::string key = kv.first.Scalar();
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      ctx.add(kv.first, where + "." + key, "unknown key");
    }
  }
}

Eigen::MatrixXd parse_matrix(Ctx& ctx, const YAML::Node& n,
                             const std::string& field) {
  if (!n.IsDefined() || !n.IsSequence()) {
    ctx.add(n, field, "expected a sequence of rows");
    return {};
  }
  const auto rows = static_cast<Eigen::Index>(n.size());
  Eigen::MatrixXd m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const YAML::Node row = n[static_cast<std::size_t>(i)];
    if (!row.IsSequence()) {
      ctx.add(row, field, "expected a row sequence");
      return {};
    }
    if (i == 0) {
      m.resize(rows, static_cast<Eigen::Index>(row.size()));
    }
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) {
      ctx.add(row, field, "ragged matrix rows");
      return {};
    }
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      double v = 0.0;
      const YAML::Node cell = row[static_cast<std::size_t>(k)];
      if (!cell.IsScalar() || !parse_double_scalar(cell.Scalar(), v)) {
        ctx.add(cell, field, "expected a number");
        return {};
      }
      m(i, k) = v;
    }
  }
  return m;
}

std::vector<double> parse_vector(Ctx& ctx, const YAML::Node& n,
                                 const std::string& field) {
  std::vector<double> out;
  if (!n.IsDefined() || !n.IsSequence()) {
    ctx.add(n, field, "expected a sequence of numbers");
    return out;
  }
  for (const auto& cell : n) {
    double v = 0.0;
    if (!cell.IsScalar() || !parse_double_scalar(cell.Scalar(), v)) {
      ctx.add(cell, field, "expected a number");
      return {};
    }
    out.push_back(v);
  }
  return out;
}

TimeVaryingTerm parse_beta(Ctx& ctx, const YAML::Node& n,
                           const std::string& field) {
  TimeVaryingTerm beta;
  if (!n.IsDefined()) {
    return beta;
  }
  check_keys(ctx, n, field,
             {"kind", "slope", "amplitude", "frequency_hz", "phase_rad"});
  const std::string kind = get_string(ctx, n, "kind", "zero");
  if (kind == "zero") {
    beta.kind = TimeVaryingTerm::Kind::Zero;
  } else if (kind == "ramp") {
    beta.kind = TimeVaryingTerm::Kind::Ramp;
    beta.slope = get_double(ctx, n, "slope", 0.0, true);
  } else if (kind == "sinusoid") {
    beta.kind = TimeVaryingTerm::Kind::Sinusoid;
    beta.amplitude = get_double(ctx, n, "amplitude", 0.0, true);
    beta.frequency_hz = get_double(ctx, n, "frequency_hz", 0.0, true);
    beta.phase_rad = get_double(ctx, n, "phase_rad", 0.0);
  } else {
    ctx.add(n, field + ".kind", "unknown waveform '" + kind +
                                    "' (expected zero, ramp or sinusoid)");
  }
  return beta;
}

struct WindowPair {
  double t_start = 0.0;
  double t_end = kInf;
};

WindowPair parse_window(Ctx& ctx, const YAML::Node& n, const std::string& field) {
  WindowPair w;
  if (!n.IsDefined() || !n.IsSequence() || n.size() != 2) {
    ctx.add(n, field, "expected [t_start, t_end]");
    return w;
  }
  double a = 0.0, b = 0.0;
  if (!n[0].IsScalar() || !parse_double_scalar(n[0].Scalar(), a) ||
      !n[1].IsScalar() || !parse_double_scalar(n[1].Scalar(), b)) {
    ctx.add(n, field, "window bounds must be numbers (t_end may be .inf)");
    return w;
  }
  w.t_start = a;
  w.t_end = b;
  if (!(a < b)) {
    ctx.add(n, field, "t_start must be < t_end");
  }
  if (a < 0.0) {
    ctx.add(n, field, "t_start must be >= 0");
  }
  return w;
}

const char* target_name(AttackTarget t) {
  switch (t) {
    case AttackTarget::RotorSpeedDeviation:
      return "rotor_speed_deviation";
    case AttackTarget::ElectricalPower:
      return "electrical_power";
    case AttackTarget::BusVoltageD:
      return "bus_voltage_d";
    case AttackTarget::BusVoltageQ:
      return "bus_voltage_q";
  }
  return "?";
}

const char* output_name(OutputKind k) {
  switch (k) {
    case OutputKind::Timeseries:
      return "timeseries";
    case OutputKind::PhasePortrait:
      return "phase_portrait";
    case OutputKind::OmegaThetaPortrait:
      return "omega_theta_portrait";
    case OutputKind::TripLog:
      return "trip_log";
    case OutputKind::AnalyticOverlay:
      return "analytic_overlay";
  }
  return "?";
}

const char* relay_name(RelayType r) {
  switch (r) {
    case RelayType::OverFreq:
      return "over_freq";
    case RelayType::UnderFreq:
      return "under_freq";
    case RelayType::Rocof:
      return "rocof";
    case RelayType::OverVdc:
      return "over_vdc";
    case RelayType::UnderVdc:
      return "under_vdc";
  }
  return "?";
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string header_comment(const std::string& scenario_name) {
  return std::string("# ") + kToolName + " " + kToolVersion +
         " scenario=" + scenario_name + "\n";
}

MachineState parse_machine_state(Ctx& ctx, const YAML::Node& n,
                                 const std::string& field) {
  MachineState m;
  check_keys(ctx, n, field,
             {"theta", "delta_omega", "x_gov", "x_exc", "p_m", "v_int", "i_sd",
              "i_sq", "v_bd", "v_bq", "i_od", "i_oq", "phi_d", "phi_q"});
  m.theta = get_double(ctx, n, "theta", 0.0);
  m.delta_omega = get_double(ctx, n, "delta_omega", 0.0);
  m.x_gov = get_double(ctx, n, "x_gov", 0.0);
  m.x_exc = get_double(ctx, n, "x_exc", 0.0);
  m.p_m = get_double(ctx, n, "p_m", 0.0);
  m.v_int = get_double(ctx, n, "v_int", 0.0);
  m.i_sd = get_double(ctx, n, "i_sd", 0.0);
  m.i_sq = get_double(ctx, n, "i_sq", 0.0);
  m.v_bd = get_double(ctx, n, "v_bd", 0.0);
  m.v_bq = get_double(ctx, n, "v_bq", 0.0);
  m.i_od = get_double(ctx, n, "i_od", 0.0);
  m.i_oq = get_double(ctx, n, "i_oq", 0.0);
  m.phi_d = get_double(ctx, n, "phi_d", 0.0);
  m.phi_q = get_double(ctx, n, "phi_q", 0.0);
  return m;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError("scenario parse error",
                        {{e.mark.line + 1, "", e.msg}});
  }
  if (!root.IsMap()) {
    throw ScenarioError("scenario parse error",
                        {{1, "", "document must be a key/value map"}});
  }

  Ctx ctx;
  Scenario sc;

  check_keys(ctx, root, "scenario",
             {"name", "model", "load", "initial", "options", "attacks", "faults",
              "integrator", "relays", "outputs"});

  sc.name = get_string(ctx, root, "name", "", true);

  // --- model ---
  const YAML::Node model = root["model"];
  if (!model.IsDefined() || !model.IsMap()) {
    ctx.add(root, "model", "required section is missing");
  } else {
    check_keys(ctx, model, "model",
               {"frequency_hz", "dc_units", "generators", "network", "converter"});

    const double f_hz = get_double(ctx, model, "frequency_hz", 60.0);

    const std::string units = get_string(ctx, model, "dc_units", "", true);
    if (units == "per_unit") {
      sc.model.dc_units = DcUnits::PerUnit;
    } else if (units == "physical") {
      sc.model.dc_units = DcUnits::Physical;
    } else if (!units.empty()) {
      ctx.add(model["dc_units"], "model.dc_units",
              "must be 'per_unit' or 'physical'");
    }

    const YAML::Node gens = model["generators"];
    if (!gens.IsDefined() || !gens.IsSequence() || gens.size() == 0) {
      ctx.add(model, "model.generators", "at least one generator is required");
    } else {
      std::size_t idx = 0;
      for (const auto& gn : gens) {
        const std::string field = "model.generators[" + std::to_string(idx + 1) + "]";
        check_keys(ctx, gn, field,
                   {"h", "d", "omega_s", "kp_gov", "ki_gov", "kp_exc", "ki_exc",
                    "v_b_ref", "t_m", "t_v"});
        GeneratorParams g;
        g.index = idx;
        g.set_frequency(f_hz);
        g.h = get_double(ctx, gn, "h", g.h, true);
        g.d = get_double(ctx, gn, "d", g.d, true);
        g.omega_s = get_double(ctx, gn, "omega_s", g.omega_s);
        g.kp_gov = get_double(ctx, gn, "kp_gov", g.kp_gov);
        g.ki_gov = get_double(ctx, gn, "ki_gov", g.ki_gov);
        g.kp_exc = get_double(ctx, gn, "kp_exc", g.kp_exc);
        g.ki_exc = get_double(ctx, gn, "ki_exc", g.ki_exc);
        g.v_b_ref = get_double(ctx, gn, "v_b_ref", g.v_b_ref);
        g.t_m = get_double(ctx, gn, "t_m", g.t_m);
        g.t_v = get_double(ctx, gn, "t_v", g.t_v);
        sc.model.generators.push_back(g);
        ++idx;
      }
    }

    const YAML::Node net = model["network"];
    if (!net.IsDefined() || !net.IsMap()) {
      ctx.add(model, "model.network", "required section is missing");
    } else {
      check_keys(ctx, net, "model.network", {"g", "b", "v_mag"});
      sc.model.network.g = parse_matrix(ctx, net["g"], "model.network.g");
      sc.model.network.b = parse_matrix(ctx, net["b"], "model.network.b");
      const auto vm = parse_vector(ctx, net["v_mag"], "model.network.v_mag");
      sc.model.network.v_mag =
          Eigen::Map<const Eigen::VectorXd>(vm.data(),
                                            static_cast<Eigen::Index>(vm.size()));
      sc.model.network.n = sc.model.generators.size();
    }

    const YAML::Node conv = model["converter"];
    if (!conv.IsDefined() || !conv.IsMap()) {
      ctx.add(model, "model.converter", "required section is missing");
    } else {
      check_keys(ctx, conv, "model.converter",
                 {"r_s", "l_s", "c_s", "r_f", "l_f", "kpd_i", "kid_i", "kpq_i",
                  "kiq_i", "kp_v", "ki_v", "c_dc", "s_c", "v_dc_ref"});
      auto& c = sc.model.converter;
      c.r_s = get_double(ctx, conv, "r_s", c.r_s);
      c.l_s = get_double(ctx, conv, "l_s", c.l_s);
      c.c_s = get_double(ctx, conv, "c_s", c.c_s);
      c.r_f = get_double(ctx, conv, "r_f", c.r_f);
      c.l_f = get_double(ctx, conv, "l_f", c.l_f);
      c.kpd_i = get_double(ctx, conv, "kpd_i", c.kpd_i);
      c.kid_i = get_double(ctx, conv, "kid_i", c.kid_i);
      c.kpq_i = get_double(ctx, conv, "kpq_i", c.kpq_i);
      c.kiq_i = get_double(ctx, conv, "kiq_i", c.kiq_i);
      c.kp_v = get_double(ctx, conv, "kp_v", c.kp_v);
      c.ki_v = get_double(ctx, conv, "ki_v", c.ki_v);
      c.c_dc = get_double(ctx, conv, "c_dc", c.c_dc, true);
      c.s_c = get_double(ctx, conv, "s_c", c.s_c);
      c.v_dc_ref = get_double(ctx, conv, "v_dc_ref", c.v_dc_ref, true);
    }
  }

  // --- load ---
  const YAML::Node load = root["load"];
  if (load.IsDefined()) {
    check_keys(ctx, load, "load", {"i_l"});
    sc.i_l = get_double(ctx, load, "i_l", 0.0);
  }

  const std::size_t n_machines = sc.model.generators.size();

  // --- initial ---
  const YAML::Node init = root["initial"];
  if (init.IsDefined()) {
    check_keys(ctx, init, "initial", {"mode", "state", "perturb"});
    const std::string mode = get_string(ctx, init, "mode", "equilibrium");
    if (mode == "equilibrium") {
      sc.initial.mode = InitialMode::Equilibrium;
    } else if (mode == "explicit") {
      sc.initial.mode = InitialMode::Explicit;
      const YAML::Node stn = init["state"];
      if (!stn.IsDefined() || !stn.IsMap()) {
        ctx.add(init, "initial.state", "explicit mode requires a state section");
      } else {
        check_keys(ctx, stn, "initial.state", {"machines", "phi_v", "v_dc"});
        SystemState st;
        const YAML::Node ms = stn["machines"];
        if (!ms.IsDefined() || !ms.IsSequence()) {
          ctx.add(stn, "initial.state.machines", "expected a sequence");
        } else {
          std::size_t i = 0;
          for (const auto& mn : ms) {
            st.machines.push_back(parse_machine_state(
                ctx, mn, "initial.state.machines[" + std::to_string(i + 1) + "]"));
            ++i;
          }
        }
        st.phi_v = get_double(ctx, stn, "phi_v", 0.0);
        st.v_dc = get_double(ctx, stn, "v_dc", sc.model.converter.v_dc_ref);
        if (!(st.v_dc > 0.0)) {
          ctx.add(stn, "initial.state.v_dc", "must be > 0");
        }
        if (st.machines.size() != n_machines) {
          ctx.add(stn, "initial.state.machines",
                  "state must describe every machine");
        }
        sc.initial.explicit_state = st;
      }
    } else {
      ctx.add(init["mode"], "initial.mode", "must be 'equilibrium' or 'explicit'");
    }
    const YAML::Node pert = init["perturb"];
    if (pert.IsDefined()) {
      check_keys(ctx, pert, "initial.perturb", {"delta_omega", "theta"});
      if (pert["delta_omega"].IsDefined()) {
        sc.initial.perturb_delta_omega =
            parse_vector(ctx, pert["delta_omega"], "initial.perturb.delta_omega");
        if (sc.initial.perturb_delta_omega.size() != n_machines) {
          ctx.add(pert["delta_omega"], "initial.perturb.delta_omega",
                  "one entry per machine required");
        }
      }
      if (pert["theta"].IsDefined()) {
        sc.initial.perturb_theta =
            parse_vector(ctx, pert["theta"], "initial.perturb.theta");
        if (sc.initial.perturb_theta.size() != n_machines) {
          ctx.add(pert["theta"], "initial.perturb.theta",
                  "one entry per machine required");
        }
      }
    }
  }

  // --- options ---
  const YAML::Node opts = root["options"];
  if (opts.IsDefined()) {
    check_keys(ctx, opts, "options",
               {"shared_sensor", "pe_mode", "pe_frozen", "open_breaker"});
    sc.options.shared_sensor = get_bool(ctx, opts, "shared_sensor", true);
    const std::string pe = get_string(ctx, opts, "pe_mode", "network");
    if (pe == "network") {
      sc.options.pe_mode = PeMode::Network;
    } else if (pe == "frozen") {
      sc.options.pe_mode = PeMode::Frozen;
    } else {
      ctx.add(opts["pe_mode"], "options.pe_mode", "must be 'network' or 'frozen'");
    }
    if (opts["pe_frozen"].IsDefined()) {
      sc.options.pe_frozen =
          parse_vector(ctx, opts["pe_frozen"], "options.pe_frozen");
      if (sc.options.pe_frozen.size() != n_machines) {
        ctx.add(opts["pe_frozen"], "options.pe_frozen",
                "one entry per machine required");
      }
    }
    sc.options.open_breaker = get_bool(ctx, opts, "open_breaker", false);
  }

  // --- integrator ---
  const YAML::Node integ = root["integrator"];
  if (integ.IsDefined()) {
    check_keys(ctx, integ, "integrator", {"method", "dt", "t_end", "record_every"});
    const std::string method = get_string(ctx, integ, "method", "rk4");
    if (method == "rk4") {
      sc.integrator.method = IntegrationMethod::RK4;
    } else if (method == "euler") {
      sc.integrator.method = IntegrationMethod::Euler;
    } else {
      ctx.add(integ["method"], "integrator.method", "must be 'rk4' or 'euler'");
    }
    sc.integrator.dt = get_double(ctx, integ, "dt", sc.integrator.dt);
    sc.integrator.t_end = get_double(ctx, integ, "t_end", sc.integrator.t_end);
    sc.integrator.record_every =
        get_size(ctx, integ, "record_every", sc.integrator.record_every);
    if (!(sc.integrator.dt > 0.0)) {
      ctx.add(integ["dt"], "integrator.dt", "must be > 0");
    }
    if (!(sc.integrator.t_end > 0.0)) {
      ctx.add(integ["t_end"], "integrator.t_end", "must be > 0");
    }
    if (sc.integrator.record_every == 0) {
      ctx.add(integ["record_every"], "integrator.record_every", "must be >= 1");
    }
  }

  // --- attacks ---
  const YAML::Node attacks = root["attacks"];
  if (attacks.IsDefined()) {
    if (!attacks.IsSequence()) {
      ctx.add(attacks, "attacks", "expected a sequence");
    } else {
      std::size_t idx = 0;
      for (const auto& an : attacks) {
        const std::string field = "attacks[" + std::to_string(idx + 1) + "]";
        check_keys(ctx, an, field,
                   {"target", "machine", "alpha", "gamma", "beta", "window"});
        AttackSpec a;
        const std::string target = get_string(ctx, an, "target", "", true);
        if (target == "rotor_speed_deviation") {
          a.target = AttackTarget::RotorSpeedDeviation;
        } else if (target == "electrical_power") {
          a.target = AttackTarget::ElectricalPower;
        } else if (target == "bus_voltage_d") {
          a.target = AttackTarget::BusVoltageD;
        } else if (target == "bus_voltage_q") {
          a.target = AttackTarget::BusVoltageQ;
        } else if (!target.empty()) {
          ctx.add(an["target"], field + ".target",
                  "unknown target '" + target + "'");
        }
        const std::size_t machine = get_size(ctx, an, "machine", 1);
        if (machine < 1 || machine > n_machines) {
          ctx.add(an["machine"], field + ".machine",
                  "machine id out of range 1.." + std::to_string(n_machines));
        } else {
          a.machine = machine - 1;
        }
        a.alpha = get_double(ctx, an, "alpha", 0.0);
        a.gamma = get_double(ctx, an, "gamma", 0.0);
        a.beta = parse_beta(ctx, an["beta"], field + ".beta");
        const WindowPair w = parse_window(ctx, an["window"], field + ".window");
        a.t_start = w.t_start;
        a.t_end = w.t_end;
        if (a.t_start > sc.integrator.t_end) {
          ctx.add(an["window"], field + ".window",
                  "window starts after the simulation horizon");
        }
        sc.attacks.push_back(a);
        ++idx;
      }
      // Static overlap check per (target, machine).
      for (std::size_t i = 0; i < sc.attacks.size(); ++i) {
        for (std::size_t j = i + 1; j < sc.attacks.size(); ++j) {
          const auto& a = sc.attacks[i];
          const auto& b = sc.attacks[j];
          if (a.target == b.target && a.machine == b.machine &&
              a.t_start < b.t_end && b.t_start < a.t_end) {
            ctx.add(attacks, "attacks",
                    "attacks " + std::to_string(i + 1) + " and " +
                        std::to_string(j + 1) +
                        " overlap on the same channel of machine " +
                        std::to_string(a.machine + 1));
          }
        }
      }
    }
  }

  // --- faults ---
  const YAML::Node faults = root["faults"];
  if (faults.IsDefined()) {
    if (!faults.IsSequence()) {
      ctx.add(faults, "faults", "expected a sequence");
    } else {
      std::size_t idx = 0;
      for (const auto& fn : faults) {
        const std::string field = "faults[" + std::to_string(idx + 1) + "]";
        check_keys(ctx, fn, field, {"window", "i_l_scale", "g_scale", "b_scale"});
        FaultSpec f;
        const WindowPair w = parse_window(ctx, fn["window"], field + ".window");
        f.t_start = w.t_start;
        f.t_end = w.t_end;
        if (f.t_start > sc.integrator.t_end) {
          ctx.add(fn["window"], field + ".window",
                  "window starts after the simulation horizon");
        }
        f.i_l_scale = get_double(ctx, fn, "i_l_scale", 1.0);
        for (const char* which : {"g_scale", "b_scale"}) {
          const YAML::Node sn = fn[which];
          if (!sn.IsDefined()) {
            continue;
          }
          if (!sn.IsSequence()) {
            ctx.add(sn, field + "." + which, "expected a sequence");
            continue;
          }
          for (const auto& en : sn) {
            check_keys(ctx, en, field + "." + which, {"row", "col", "factor"});
            FaultSpec::EntryScale e;
            const std::size_t row = get_size(ctx, en, "row", 1);
            const std::size_t col = get_size(ctx, en, "col", 1);
            if (row < 1 || row > n_machines || col < 1 || col > n_machines) {
              ctx.add(en, field + "." + which, "entry index out of range");
              continue;
            }
            e.row = row - 1;
            e.col = col - 1;
            e.factor = get_double(ctx, en, "factor", 1.0, true);
            (std::string(which) == "g_scale" ? f.g_scale : f.b_scale).push_back(e);
          }
        }
        sc.faults.push_back(f);
        ++idx;
      }
    }
  }

  // --- relays ---
  const YAML::Node relays = root["relays"];
  if (relays.IsDefined()) {
    check_keys(ctx, relays, "relays",
               {"freq_band_pct", "freq_tight_band_pct", "rocof_limit_hz_per_s",
                "vdc_band_pct", "dwell_s", "rocof_window_s"});
    auto& r = sc.relays;
    r.freq_band_pct = get_double(ctx, relays, "freq_band_pct", r.freq_band_pct);
    r.freq_tight_band_pct =
        get_double(ctx, relays, "freq_tight_band_pct", r.freq_tight_band_pct);
    r.rocof_limit = get_double(ctx, relays, "rocof_limit_hz_per_s", r.rocof_limit);
    r.vdc_band_pct = get_double(ctx, relays, "vdc_band_pct", r.vdc_band_pct);
    r.dwell = get_double(ctx, relays, "dwell_s", r.dwell);
    r.rocof_window = get_double(ctx, relays, "rocof_window_s", r.rocof_window);
    if (!(r.freq_band_pct > 0.0) || !(r.freq_tight_band_pct > 0.0) ||
        !(r.rocof_limit > 0.0) || !(r.vdc_band_pct > 0.0)) {
      ctx.add(relays, "relays", "all bands must be > 0");
    }
    if (r.dwell < 0.0) {
      ctx.add(relays["dwell_s"], "relays.dwell_s", "must be >= 0");
    }
    if (!(r.rocof_window > 0.0)) {
      ctx.add(relays["rocof_window_s"], "relays.rocof_window_s", "must be > 0");
    }
  }

  // --- outputs ---
  const YAML::Node outputs = root["outputs"];
  if (!outputs.IsDefined() || !outputs.IsSequence() || outputs.size() == 0) {
    ctx.add(outputs.IsDefined() ? outputs : root, "outputs",
            "at least one output must be requested");
  } else {
    for (const auto& on : outputs) {
      const std::string o = on.IsScalar() ? on.Scalar() : "";
      if (o == "timeseries") {
        sc.outputs.push_back(OutputKind::Timeseries);
      } else if (o == "phase_portrait") {
        sc.outputs.push_back(OutputKind::PhasePortrait);
      } else if (o == "omega_theta_portrait") {
        sc.outputs.push_back(OutputKind::OmegaThetaPortrait);
      } else if (o == "trip_log") {
        sc.outputs.push_back(OutputKind::TripLog);
      } else if (o == "analytic_overlay") {
        sc.outputs.push_back(OutputKind::AnalyticOverlay);
      } else {
        ctx.add(on, "outputs", "unknown output '" + o + "'");
      }
    }
  }

  // Structural model invariants, attributed to the model section.
  if (ctx.ok()) {
    const ValidationReport report = validate_model(sc.model);
    for (const auto& v : report.violations) {
      ctx.add(root["model"], "model", v);
    }
  }

  if (!ctx.ok()) {
    std::ostringstream os;
    os << "scenario has " << ctx.issues.size() << " problem(s)";
    throw ScenarioError(os.str(), std::move(ctx.issues));
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error("cannot open scenario file " + file.string());
  }
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str());
}

namespace {

YAML::Node window_node(double t_start, double t_end) {
  YAML::Node n;
  n.SetStyle(YAML::EmitterStyle::Flow);
  n.push_back(t_start);
  if (std::isinf(t_end)) {
    n.push_back(".inf");
  } else {
    n.push_back(t_end);
  }
  return n;
}

YAML::Node beta_node(const TimeVaryingTerm& b) {
  YAML::Node n;
  n.SetStyle(YAML::EmitterStyle::Flow);
  switch (b.kind) {
    case TimeVaryingTerm::Kind::Zero:
      n["kind"] = "zero";
      break;
    case TimeVaryingTerm::Kind::Ramp:
      n["kind"] = "ramp";
      n["slope"] = b.slope;
      break;
    case TimeVaryingTerm::Kind::Sinusoid:
      n["kind"] = "sinusoid";
      n["amplitude"] = b.amplitude;
      n["frequency_hz"] = b.frequency_hz;
      n["phase_rad"] = b.phase_rad;
      break;
  }
  return n;
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  YAML::Node root;
  root["name"] = s.name;

  YAML::Node model;
  model["frequency_hz"] =
      s.model.generators.empty() ? 60.0 : s.model.generators[0].f_nominal;
  model["dc_units"] =
      s.model.dc_units == DcUnits::PerUnit ? "per_unit" : "physical";
  for (const auto& g : s.model.generators) {
    YAML::Node gn;
    gn.SetStyle(YAML::EmitterStyle::Flow);
    gn["h"] = g.h;
    gn["d"] = g.d;
    gn["omega_s"] = g.omega_s;
    gn["kp_gov"] = g.kp_gov;
    gn["ki_gov"] = g.ki_gov;
    gn["kp_exc"] = g.kp_exc;
    gn["ki_exc"] = g.ki_exc;
    gn["v_b_ref"] = g.v_b_ref;
    gn["t_m"] = g.t_m;
    gn["t_v"] = g.t_v;
    model["generators"].push_back(gn);
  }
  YAML::Node net;
  for (Eigen::Index i = 0; i < s.model.network.g.rows(); ++i) {
    YAML::Node grow, brow;
    grow.SetStyle(YAML::EmitterStyle::Flow);
    brow.SetStyle(YAML::EmitterStyle::Flow);
    for (Eigen::Index k = 0; k < s.model.network.g.cols(); ++k) {
      grow.push_back(s.model.network.g(i, k));
      brow.push_back(s.model.network.b(i, k));
    }
    net["g"].push_back(grow);
    net["b"].push_back(brow);
  }
  YAML::Node vmag;
  vmag.SetStyle(YAML::EmitterStyle::Flow);
  for (Eigen::Index i = 0; i < s.model.network.v_mag.size(); ++i) {
    vmag.push_back(s.model.network.v_mag(i));
  }
  net["v_mag"] = vmag;
  model["network"] = net;

  YAML::Node conv;
  conv.SetStyle(YAML::EmitterStyle::Flow);
  const auto& c = s.model.converter;
  conv["r_s"] = c.r_s;
  conv["l_s"] = c.l_s;
  conv["c_s"] = c.c_s;
  conv["r_f"] = c.r_f;
  conv["l_f"] = c.l_f;
  conv["kpd_i"] = c.kpd_i;
  conv["kid_i"] = c.kid_i;
  conv["kpq_i"] = c.kpq_i;
  conv["kiq_i"] = c.kiq_i;
  conv["kp_v"] = c.kp_v;
  conv["ki_v"] = c.ki_v;
  conv["c_dc"] = c.c_dc;
  conv["s_c"] = c.s_c;
  conv["v_dc_ref"] = c.v_dc_ref;
  model["converter"] = conv;
  root["model"] = model;

  root["load"]["i_l"] = s.i_l;

  YAML::Node init;
  init["mode"] =
      s.initial.mode == InitialMode::Equilibrium ? "equilibrium" : "explicit";
  if (s.initial.mode == InitialMode::Explicit) {
    YAML::Node stn;
    for (const auto& m : s.initial.explicit_state.machines) {
      YAML::Node mn;
      mn.SetStyle(YAML::EmitterStyle::Flow);
      mn["theta"] = m.theta;
      mn["delta_omega"] = m.delta_omega;
      mn["x_gov"] = m.x_gov;
      mn["x_exc"] = m.x_exc;
      mn["p_m"] = m.p_m;
      mn["v_int"] = m.v_int;
      mn["i_sd"] = m.i_sd;
      mn["i_sq"] = m.i_sq;
      mn["v_bd"] = m.v_bd;
      mn["v_bq"] = m.v_bq;
      mn["i_od"] = m.i_od;
      mn["i_oq"] = m.i_oq;
      mn["phi_d"] = m.phi_d;
      mn["phi_q"] = m.phi_q;
      stn["machines"].push_back(mn);
    }
    stn["phi_v"] = s.initial.explicit_state.phi_v;
    stn["v_dc"] = s.initial.explicit_state.v_dc;
    init["state"] = stn;
  }
  if (!s.initial.perturb_delta_omega.empty()) {
    YAML::Node p;
    p.SetStyle(YAML::EmitterStyle::Flow);
    for (double v : s.initial.perturb_delta_omega) {
      p.push_back(v);
    }
    init["perturb"]["delta_omega"] = p;
  }
  if (!s.initial.perturb_theta.empty()) {
    YAML::Node p;
    p.SetStyle(YAML::EmitterStyle::Flow);
    for (double v : s.initial.perturb_theta) {
      p.push_back(v);
    }
    init["perturb"]["theta"] = p;
  }
  root["initial"] = init;

  YAML::Node opts;
  opts["shared_sensor"] = s.options.shared_sensor;
  opts["pe_mode"] = s.options.pe_mode == PeMode::Network ? "network" : "frozen";
  if (!s.options.pe_frozen.empty()) {
    YAML::Node p;
    p.SetStyle(YAML::EmitterStyle::Flow);
    for (double v : s.options.pe_frozen) {
      p.push_back(v);
    }
    opts["pe_frozen"] = p;
  }
  opts["open_breaker"] = s.options.open_breaker;
  root["options"] = opts;

  if (!s.attacks.empty()) {
    for (const auto& a : s.attacks) {
      YAML::Node an;
      an["target"] = target_name(a.target);
      an["machine"] = a.machine + 1;
      an["alpha"] = a.alpha;
      an["gamma"] = a.gamma;
      an["beta"] = beta_node(a.beta);
      an["window"] = window_node(a.t_start, a.t_end);
      root["attacks"].push_back(an);
    }
  }
  if (!s.faults.empty()) {
    for (const auto& f : s.faults) {
      YAML::Node fn;
      fn["window"] = window_node(f.t_start, f.t_end);
      fn["i_l_scale"] = f.i_l_scale;
      for (const char* which : {"g_scale", "b_scale"}) {
        const auto& list =
            std::string(which) == "g_scale" ? f.g_scale : f.b_scale;
        for (const auto& e : list) {
          YAML::Node en;
          en.SetStyle(YAML::EmitterStyle::Flow);
          en["row"] = e.row + 1;
          en["col"] = e.col + 1;
          en["factor"] = e.factor;
          fn[which].push_back(en);
        }
      }
      root["faults"].push_back(fn);
    }
  }

  YAML::Node integ;
  integ["method"] =
      s.integrator.method == IntegrationMethod::RK4 ? "rk4" : "euler";
  integ["dt"] = s.integrator.dt;
  integ["t_end"] = s.integrator.t_end;
  integ["record_every"] = s.integrator.record_every;
  root["integrator"] = integ;

  YAML::Node relays;
  relays["freq_band_pct"] = s.relays.freq_band_pct;
  relays["freq_tight_band_pct"] = s.relays.freq_tight_band_pct;
  relays["rocof_limit_hz_per_s"] = s.relays.rocof_limit;
  relays["vdc_band_pct"] = s.relays.vdc_band_pct;
  relays["dwell_s"] = s.relays.dwell;
  relays["rocof_window_s"] = s.relays.rocof_window;
  root["relays"] = relays;

  YAML::Node outs;
  outs.SetStyle(YAML::EmitterStyle::Flow);
  for (const auto k : s.outputs) {
    outs.push_back(output_name(k));
  }
  root["outputs"] = outs;

  YAML::Emitter em;
  em.SetDoublePrecision(17);
  em.SetFloatPrecision(9);
  em << root;
  return std::string(em.c_str()) + "\n";
}

Scenario scenario_with_override(const std::string& text, const std::string& path,
                                double value) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError("scenario parse error", {{e.mark.line + 1, "", e.msg}});
  }

  std::vector<std::string> tokens;
  std::string tok;
  for (char c : path) {
    if (c == '.') {
      tokens.push_back(tok);
      tok.clear();
    } else {
      tok += c;
    }
  }
  tokens.push_back(tok);

  // Walk to the parent of the final token. Node handles share state and
  // operator= assigns content, so rebinding must go through reset().
  YAML::Node node;
  node.reset(root);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const std::string& key = tokens[i];
    if (!key.empty() && key.find_first_not_of("0123456789") == std::string::npos) {
      const std::size_t idx = std::stoull(key);
      if (!node.IsSequence() || idx < 1 || idx > node.size()) {
        throw Error("sweep path: index '" + key + "' out of range in '" + path +
                    "'");
      }
      node.reset(node[idx - 1]);
    } else {
      YAML::Node next = node[key];
      if (!next.IsDefined()) {
        throw Error("sweep path: no key '" + key + "' in '" + path + "'");
      }
      node.reset(next);
    }
  }
  const std::string& leaf = tokens.back();
  if (!node.IsMap() || !node[leaf].IsDefined()) {
    throw Error("sweep path: no scalar '" + leaf + "' in '" + path + "'");
  }
  node[leaf] = fmt17(value);

  YAML::Emitter em;
  em.SetDoublePrecision(17);
  em << root;
  return parse_scenario(std::string(em.c_str()) + "\n");
}

namespace {

SystemState initial_state(const Scenario& sc) {
  SystemState st;
  if (sc.initial.mode == InitialMode::Equilibrium) {
    st = find_equilibrium(sc.model, sc.i_l, sc.options);
  } else {
    st = sc.initial.explicit_state;
    st.t = 0.0;
  }
  st.i_l = sc.i_l;
  for (std::size_t i = 0; i < sc.initial.perturb_delta_omega.size(); ++i) {
    st.machines[i].delta_omega += sc.initial.perturb_delta_omega[i];
  }
  for (std::size_t i = 0; i < sc.initial.perturb_theta.size(); ++i) {
    st.machines[i].theta += sc.initial.perturb_theta[i];
  }
  return st;
}

}  // namespace

RunResult execute_scenario(const Scenario& sc) {
  RunResult out;
  out.initial = initial_state(sc);
  out.series = simulate(out.initial, sc.model, sc.attacks, sc.faults,
                        sc.integrator, sc.options, &sc.relays);
  out.trips = evaluate_relays(out.series, sc.relays);
  out.alarms = evaluate_alarms(out.series, sc.relays);
  return out;
}

TimeSeries analytic_trajectory(const Scenario& sc, std::size_t machine) {
  if (machine >= sc.model.machine_count()) {
    throw DimensionMismatch("analytic_trajectory: machine index out of range");
  }
  const auto& gen = sc.model.generators[machine];

  // Initial rotor state mirrors the simulated initial condition.
  double dw0 = 0.0, th0 = 0.0;
  if (sc.initial.mode == InitialMode::Explicit) {
    dw0 = sc.initial.explicit_state.machines[machine].delta_omega;
    th0 = sc.initial.explicit_state.machines[machine].theta;
  }
  if (machine < sc.initial.perturb_delta_omega.size()) {
    dw0 += sc.initial.perturb_delta_omega[machine];
  }
  if (machine < sc.initial.perturb_theta.size()) {
    th0 += sc.initial.perturb_theta[machine];
  }

  // Constant power trajectory for the amplification term: the frozen value if
  // configured, otherwise the pre-disturbance network power. A constant
  // trajectory folds the amplification into the constant bias, keeping the
  // exact convolution kernels applicable.
  double pe0 = 0.0;
  {
    std::vector<double> theta0(sc.model.machine_count(), 0.0);
    if (sc.initial.mode == InitialMode::Explicit) {
      for (std::size_t i = 0; i < theta0.size(); ++i) {
        theta0[i] = sc.initial.explicit_state.machines[i].theta;
      }
    }
    for (std::size_t i = 0; i < sc.initial.perturb_theta.size(); ++i) {
      theta0[i] += sc.initial.perturb_theta[i];
    }
    if (sc.options.pe_mode == PeMode::Frozen && !sc.options.pe_frozen.empty()) {
      pe0 = sc.options.pe_frozen[machine];
    } else {
      pe0 = electrical_power(theta0, sc.model.network)[machine];
    }
  }

  // Segment boundaries wherever the active rotor-channel attack set changes.
  std::vector<double> cuts{0.0, sc.integrator.t_end};
  std::vector<const AttackSpec*> rotor_attacks;
  for (const auto& a : sc.attacks) {
    if (a.machine != machine) {
      continue;
    }
    if (a.target != AttackTarget::RotorSpeedDeviation &&
        a.target != AttackTarget::ElectricalPower) {
      continue;
    }
    rotor_attacks.push_back(&a);
    if (a.t_start > 0.0 && a.t_start < sc.integrator.t_end) {
      cuts.push_back(a.t_start);
    }
    if (std::isfinite(a.t_end) && a.t_end < sc.integrator.t_end) {
      cuts.push_back(a.t_end);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double dt_rec =
      sc.integrator.dt * static_cast<double>(sc.integrator.record_every);
  const auto n_rec = static_cast<std::size_t>(
      std::llround(sc.integrator.t_end / dt_rec));

  TimeSeries ts;
  ts.n_machines = sc.model.machine_count();
  ts.f_nominal = gen.f_nominal;
  ts.v_dc_ref = sc.model.converter.v_dc_ref;
  ts.dc_units = sc.model.dc_units;
  std::vector<double> dw_col, th_col;

  double seg_dw0 = dw0, seg_th0 = th0;
  std::size_t sample = 0;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double t_o = cuts[seg];
    const double t_hi = cuts[seg + 1];

    GovernorAttackCoeffs coeffs;
    for (const auto* a : rotor_attacks) {
      if (!(a->t_start <= t_o && t_o < a->t_end)) {
        continue;
      }
      if (a->target == AttackTarget::RotorSpeedDeviation) {
        coeffs.alpha1 = a->alpha;
        coeffs.gamma1 = a->gamma;
        coeffs.beta1 = a->beta;
        coeffs.beta1_onset = a->t_start;
      } else {
        coeffs.gamma2 = a->gamma + a->alpha * pe0;  // constant P_e folds in
        coeffs.beta2 = a->beta;
        coeffs.beta2_onset = a->t_start;
      }
    }
    const LambdaCoefficients lc = lambda_coefficients(gen, coeffs);

    while (sample <= n_rec) {
      const double t = static_cast<double>(sample) * dt_rec;
      const bool last_segment = seg + 2 == cuts.size();
      if (t > t_hi || (!last_segment && t >= t_hi)) {
        break;
      }
      ts.times.push_back(t);
      dw_col.push_back(delta_omega_closed_form(lc, t_o, seg_dw0, t));
      th_col.push_back(theta_closed_form(lc, t_o, seg_th0, seg_dw0, gen.phi, t));
      ++sample;
    }
    const double dw_end = delta_omega_closed_form(lc, t_o, seg_dw0, t_hi);
    const double th_end =
        theta_closed_form(lc, t_o, seg_th0, seg_dw0, gen.phi, t_hi);
    seg_dw0 = dw_end;
    seg_th0 = th_end;
  }

  ts.add_column("delta_omega_cf_" + std::to_string(machine + 1) + "_pu",
                std::move(dw_col));
  ts.add_column("theta_cf_" + std::to_string(machine + 1) + "_rad",
                std::move(th_col));
  return ts;
}

void write_timeseries_csv(const TimeSeries& series,
                          const std::string& scenario_name, std::ostream& out) {
  out << header_comment(scenario_name);
  out << "time_s";
  for (const auto& [name, _] : series.columns) {
    out << ',' << name;
  }
  out << '\n';
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    out << fmt17(series.times[k]);
    for (const auto& [_, values] : series.columns) {
      out << ',' << fmt17(values[k]);
    }
    out << '\n';
  }
}

void emit_omega_theta_portrait(const TimeSeries& series, std::size_t machine,
                               std::ostream& out) {
  const std::string suffix = std::to_string(machine + 1);
  const auto& theta = series.column("theta_" + suffix + "_rad");
  const auto& dw = series.column("delta_omega_" + suffix + "_pu");
  out << "theta_rad,omega_pu\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    // omega in p.u. of synchronous speed
    out << fmt17(theta[k]) << ',' << fmt17(1.0 + dw[k]) << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot write " + tmp.string());
    }
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

RunReport run_scenario(const Scenario& sc, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const RunResult res = execute_scenario(sc);
  const TimeSeries& series = res.series;

  RunReport report;
  report.trip_count = res.trips.size();
  report.alarm_count = res.alarms.size();
  report.attack_success = !res.trips.empty();

  for (std::size_t m = 1; m <= series.n_machines; ++m) {
    const auto& dw = series.column("delta_omega_" + std::to_string(m) + "_pu");
    for (double v : dw) {
      report.max_abs_delta_omega = std::max(report.max_abs_delta_omega,
                                            std::abs(v));
    }
  }
  {
    const char* vdc_name =
        series.dc_units == DcUnits::PerUnit ? "v_dc_pu" : "v_dc_V";
    for (double v : series.column(vdc_name)) {
      report.max_abs_dvdc_pct =
          std::max(report.max_abs_dvdc_pct,
                   std::abs(v - series.v_dc_ref) / series.v_dc_ref * 100.0);
    }
  }

  auto emit = [&](const std::string& stem, const std::string& content) {
    const auto path = out_dir / (sc.name + "_" + stem + ".csv");
    write_file_atomic(path, content);
    report.files.push_back(path);
  };

  for (const OutputKind kind : sc.outputs) {
    switch (kind) {
      case OutputKind::Timeseries: {
        // Append the relay-facing slope estimate per machine.
        TimeSeries full = series;
        for (std::size_t m = 1; m <= series.n_machines; ++m) {
          const auto& f = series.column("freq_" + std::to_string(m) + "_hz");
          full.add_column("rocof_" + std::to_string(m) + "_hzps",
                          rocof_series(series.times, f, sc.relays.rocof_window));
        }
        std::ostringstream os;
        write_timeseries_csv(full, sc.name, os);
        emit("timeseries", os.str());
        break;
      }
      case OutputKind::TripLog: {
        std::ostringstream os;
        os << header_comment(sc.name);
        os << "kind,relay,target,t_trip_s,value,threshold\n";
        for (const auto& tr : res.trips) {
          os << "trip," << relay_name(tr.relay) << ','
             << (tr.relay == RelayType::OverVdc || tr.relay == RelayType::UnderVdc
                     ? std::string("dc_bus")
                     : "machine_" + std::to_string(tr.target + 1))
             << ',' << fmt17(tr.t_trip) << ',' << fmt17(tr.value) << ','
             << fmt17(tr.threshold) << '\n';
        }
        for (const auto& al : res.alarms) {
          os << "alarm," << relay_name(al.relay) << ",machine_"
             << std::to_string(al.target + 1) << ',' << fmt17(al.t_trip) << ','
             << fmt17(al.value) << ',' << fmt17(al.threshold) << '\n';
        }
        emit("trips", os.str());
        break;
      }
      case OutputKind::PhasePortrait: {
        const auto pts = phase_portrait(series, sc.relays, 0);
        std::ostringstream os;
        os << header_comment(sc.name);
        os << "rocof_hzps,dvdc_pct,inside\n";
        for (const auto& p : pts) {
          os << fmt17(p.rocof) << ',' << fmt17(p.dvdc_pct) << ','
             << (p.inside ? 1 : 0) << '\n';
        }
        emit("phase_portrait", os.str());
        break;
      }
      case OutputKind::OmegaThetaPortrait: {
        std::ostringstream os;
        os << header_comment(sc.name);
        emit_omega_theta_portrait(series, 0, os);
        emit("omega_theta", os.str());
        break;
      }
      case OutputKind::AnalyticOverlay: {
        std::ostringstream os;
        os << header_comment(sc.name);
        os << "time_s";
        std::vector<TimeSeries> per_machine;
        for (std::size_t m = 0; m < series.n_machines; ++m) {
          per_machine.push_back(analytic_trajectory(sc, m));
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
        emit("analytic", os.str());
        break;
      }
    }
  }
  return report;
}

}  // namespace sps
