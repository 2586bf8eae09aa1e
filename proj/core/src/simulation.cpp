#include "sps/simulation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sps/errors.hpp"
#include "sps/protection.hpp"

namespace sps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void scale_symmetric(Eigen::MatrixXd& m,
                     const std::vector<FaultSpec::EntryScale>& scales) {
  for (const auto& e : scales) {
    const auto r = static_cast<Eigen::Index>(e.row);
    const auto c = static_cast<Eigen::Index>(e.col);
    m(r, c) *= e.factor;
    if (r != c) {
      m(c, r) *= e.factor;
    }
  }
}

std::vector<double> theta_of(const SystemState& s) {
  std::vector<double> th(s.machine_count());
  for (std::size_t i = 0; i < th.size(); ++i) {
    th[i] = s.machines[i].theta;
  }
  return th;
}

// Disconnect schedule: machine i is out of service from time open_at[i] on.
using OpenSchedule = std::vector<double>;

bool is_open(const OpenSchedule& sched, std::size_t machine, double t) {
  return !sched.empty() && t >= sched[machine];
}

SystemState derivative_impl(const SystemState& state, const Model& model,
                            std::span<const AttackSpec> attacks, double t,
                            const SimOptions& options,
                            std::span<const FaultSpec> faults,
                            const OpenSchedule& open_sched) {
  const std::size_t n = state.machine_count();
  if (n != model.machine_count()) {
    throw DimensionMismatch("state and model machine counts disagree");
  }
  if (!(state.v_dc > 0.0)) {
    throw NonpositiveVdc("V_DC = " + std::to_string(state.v_dc) + " at t = " +
                         std::to_string(t));
  }

  EffectiveModel eff = inject_faults(model, faults, t);
  if (!open_sched.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (is_open(open_sched, i, t)) {
        eff.g.row(static_cast<Eigen::Index>(i)).setZero();
        eff.g.col(static_cast<Eigen::Index>(i)).setZero();
        eff.b.row(static_cast<Eigen::Index>(i)).setZero();
        eff.b.col(static_cast<Eigen::Index>(i)).setZero();
      }
    }
  }
  NetworkModel net_eff{model.network.n, eff.g, eff.b, model.network.v_mag};

  std::vector<double> pe_true;
  if (options.pe_mode == PeMode::Frozen) {
    if (options.pe_frozen.size() != n) {
      throw DimensionMismatch(
          "pe_mode=frozen requires one frozen value per machine");
    }
    pe_true = options.pe_frozen;
  } else {
    pe_true = electrical_power(theta_of(state), net_eff);
  }

  const MeasurementSet meas = corrupted_measurements(state, pe_true, attacks, t);

  SystemState d;
  d.t = 1.0;
  d.machines.resize(n);
  d.i_l = 0.0;

  const auto& c = model.converter;
  const double i_od_ref =
      c.kp_v * (c.v_dc_ref - state.v_dc) + c.ki_v * state.phi_v;
  const double i_oq_ref = 0.0;

  double p_c_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& gen = model.generators[i];
    const auto& ms = state.machines[i];
    auto& dm = d.machines[i];

    const bool open = is_open(open_sched, i, t);

    const double dw_swing = meas.delta_omega[i];
    const double dw_gov =
        options.shared_sensor ? meas.delta_omega[i] : ms.delta_omega;
    const double vb_meas = bus_voltage_magnitude(meas.v_bd[i], meas.v_bq[i]);
    const DerivedInputs di = derived_inputs(ms, gen, dw_gov, vb_meas);

    dm.theta = gen.phi * ms.delta_omega;
    dm.delta_omega = gen.omega_s / (2.0 * gen.h) *
                     (ms.p_m - meas.p_e[i] - gen.d * dw_swing);
    dm.x_gov = -dw_gov;
    dm.p_m = (di.p_f - ms.p_m) / gen.t_m;

    if (open) {
      // Breaker open: the converter chain and the exciter hold their state;
      // the rotor and governor keep running on the islanded machine.
      dm.x_exc = 0.0;
      dm.v_int = 0.0;
      dm.i_sd = dm.i_sq = 0.0;
      dm.v_bd = dm.v_bq = 0.0;
      dm.i_od = dm.i_oq = 0.0;
      dm.phi_d = dm.phi_q = 0.0;
      continue;
    }

    dm.x_exc = gen.v_b_ref - vb_meas;
    dm.v_int = (di.e_f - ms.v_int) / gen.t_v;

    const double omega = gen.omega_s + ms.delta_omega;
    dm.i_sd = (-c.r_s * ms.i_sd + omega * c.l_s * ms.i_sq - ms.v_bd + di.v_sd) /
              c.l_s;
    dm.i_sq = (-omega * c.l_s * ms.i_sd - c.r_s * ms.i_sq - ms.v_bq + di.v_sq) /
              c.l_s;
    dm.v_bd = (ms.i_sd + omega * c.c_s * ms.v_bq - ms.i_od) / c.c_s;
    dm.v_bq = (ms.i_sq - omega * c.c_s * ms.v_bd - ms.i_oq) / c.c_s;

    const double v_bd_star = c.kpd_i * (i_od_ref - ms.i_od) + c.kid_i * ms.phi_d;
    const double v_bq_star = c.kpq_i * (i_oq_ref - ms.i_oq) + c.kiq_i * ms.phi_q;
    dm.i_od = (-c.r_f * ms.i_od + v_bd_star) / c.l_f;
    dm.i_oq = (-c.r_f * ms.i_oq + v_bq_star) / c.l_f;
    dm.phi_d = i_od_ref - ms.i_od;
    dm.phi_q = i_oq_ref - ms.i_oq;

    // Converter power sees the corrupted bus-voltage measurements.
    p_c_sum += 1.5 * (ms.i_od * (meas.v_bd[i] - v_bd_star) +
                      ms.i_oq * (meas.v_bq[i] - v_bq_star));
  }

  d.phi_v = c.v_dc_ref - state.v_dc;
  const double i_l_eff = state.i_l * eff.i_l_scale;
  d.v_dc = (p_c_sum - state.v_dc * i_l_eff) / (c.c_dc * state.v_dc);

  for (const auto& dm : d.machines) {
    const double probe = dm.theta + dm.delta_omega + dm.x_gov + dm.x_exc +
                         dm.p_m + dm.v_int + dm.i_sd + dm.i_sq + dm.v_bd +
                         dm.v_bq + dm.i_od + dm.i_oq + dm.phi_d + dm.phi_q;
    if (!std::isfinite(probe)) {
      throw NonfiniteState("non-finite derivative at t = " + std::to_string(t));
    }
  }
  if (!std::isfinite(d.phi_v) || !std::isfinite(d.v_dc)) {
    throw NonfiniteState("non-finite derivative at t = " + std::to_string(t));
  }
  return d;
}

void axpy(SystemState& y, double a, const SystemState& x) {
  const std::size_t n = y.machines.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& m = y.machines[i];
    const auto& s = x.machines[i];
    m.theta += a * s.theta;
    m.delta_omega += a * s.delta_omega;
    m.x_gov += a * s.x_gov;
    m.x_exc += a * s.x_exc;
    m.p_m += a * s.p_m;
    m.v_int += a * s.v_int;
    m.i_sd += a * s.i_sd;
    m.i_sq += a * s.i_sq;
    m.v_bd += a * s.v_bd;
    m.v_bq += a * s.v_bq;
    m.i_od += a * s.i_od;
    m.i_oq += a * s.i_oq;
    m.phi_d += a * s.phi_d;
    m.phi_q += a * s.phi_q;
  }
  y.phi_v += a * x.phi_v;
  y.v_dc += a * x.v_dc;
}

void check_finite_state(const SystemState& s, double t) {
  for (const auto& m : s.machines) {
    const double probe = m.theta + m.delta_omega + m.x_gov + m.x_exc + m.p_m +
                         m.v_int + m.i_sd + m.i_sq + m.v_bd + m.v_bq + m.i_od +
                         m.i_oq + m.phi_d + m.phi_q;
    if (!std::isfinite(probe)) {
      throw NonfiniteState("non-finite state at t = " + std::to_string(t));
    }
  }
  if (!std::isfinite(s.phi_v) || !std::isfinite(s.v_dc)) {
    throw NonfiniteState("non-finite state at t = " + std::to_string(t));
  }
}

struct Recorder {
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // one vector per column
  std::vector<std::string> names;

  void init(const Model& model) {
    const std::size_t n = model.machine_count();
    const char* vdc_name =
        model.dc_units == DcUnits::PerUnit ? "v_dc_pu" : "v_dc_V";
    const char* il_name =
        model.dc_units == DcUnits::PerUnit ? "i_l_pu" : "i_l_A";
    for (std::size_t i = 1; i <= n; ++i) {
      const std::string k = std::to_string(i);
      for (const char* stem :
           {"theta_", "delta_omega_", "x_gov_", "x_exc_", "p_m_", "v_int_",
            "i_sd_", "i_sq_", "v_bd_", "v_bq_", "i_od_", "i_oq_", "phi_d_",
            "phi_q_"}) {
        names.push_back(stem + k + suffix_for(stem));
      }
    }
    names.emplace_back("phi_v");
    names.emplace_back(vdc_name);
    names.emplace_back(il_name);
    for (std::size_t i = 1; i <= n; ++i) {
      const std::string k = std::to_string(i);
      names.push_back("p_e_" + k + "_pu");
      names.push_back("p_f_" + k + "_pu");
      names.push_back("e_f_" + k + "_pu");
      names.push_back("freq_" + k + "_hz");
    }
    values.assign(names.size(), {});
  }

  static std::string suffix_for(const std::string& stem) {
    if (stem == "theta_") return "_rad";
    if (stem == "x_gov_" || stem == "x_exc_" || stem == "phi_d_" ||
        stem == "phi_q_") {
      return "";
    }
    return "_pu";
  }

  void record(const SystemState& s, const Model& model,
              std::span<const AttackSpec> attacks, const SimOptions& options,
              std::span<const FaultSpec> faults, const OpenSchedule& sched,
              double t) {
    times.push_back(t);
    std::size_t col = 0;
    for (const auto& m : s.machines) {
      for (double v : {m.theta, m.delta_omega, m.x_gov, m.x_exc, m.p_m, m.v_int,
                       m.i_sd, m.i_sq, m.v_bd, m.v_bq, m.i_od, m.i_oq, m.phi_d,
                       m.phi_q}) {
        values[col++].push_back(v);
      }
    }
    values[col++].push_back(s.phi_v);
    values[col++].push_back(s.v_dc);
    values[col++].push_back(s.i_l);

    // Derived signals, with the same measurement corruption the controllers saw.
    const std::size_t n = s.machine_count();
    EffectiveModel eff = inject_faults(model, faults, t);
    if (!sched.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        if (is_open(sched, i, t)) {
          eff.g.row(static_cast<Eigen::Index>(i)).setZero();
          eff.g.col(static_cast<Eigen::Index>(i)).setZero();
          eff.b.row(static_cast<Eigen::Index>(i)).setZero();
          eff.b.col(static_cast<Eigen::Index>(i)).setZero();
        }
      }
    }
    NetworkModel net_eff{model.network.n, eff.g, eff.b, model.network.v_mag};
    std::vector<double> pe = options.pe_mode == PeMode::Frozen
                                 ? options.pe_frozen
                                 : electrical_power(theta_of(s), net_eff);
    const MeasurementSet meas = corrupted_measurements(s, pe, attacks, t);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& gen = model.generators[i];
      const double dw_gov =
          options.shared_sensor ? meas.delta_omega[i] : s.machines[i].delta_omega;
      const double vb = bus_voltage_magnitude(meas.v_bd[i], meas.v_bq[i]);
      const DerivedInputs di = derived_inputs(s.machines[i], gen, dw_gov, vb);
      values[col++].push_back(pe[i]);
      values[col++].push_back(di.p_f);
      values[col++].push_back(di.e_f);
      values[col++].push_back(gen.f_nominal *
                              (gen.omega_s + s.machines[i].delta_omega) /
                              gen.omega_s);
    }
  }

  TimeSeries finish(const Model& model) {
    TimeSeries ts;
    ts.times = std::move(times);
    ts.n_machines = model.machine_count();
    ts.f_nominal = model.generators.empty() ? 60.0 : model.generators[0].f_nominal;
    ts.v_dc_ref = model.converter.v_dc_ref;
    ts.dc_units = model.dc_units;
    for (std::size_t i = 0; i < names.size(); ++i) {
      ts.add_column(std::move(names[i]), std::move(values[i]));
    }
    return ts;
  }
};

TimeSeries simulate_with_schedule(const SystemState& initial, const Model& model,
                                  std::span<const AttackSpec> attacks,
                                  std::span<const FaultSpec> faults,
                                  const IntegratorConfig& integ,
                                  const SimOptions& options,
                                  const OpenSchedule& sched) {
  if (!(integ.dt > 0.0) || !(integ.t_end > 0.0) || integ.record_every == 0) {
    throw Error("integrator config requires dt > 0, t_end > 0, record_every >= 1");
  }
  check_finite_state(initial, initial.t);

  SimOptions opts = options;
  if (opts.pe_mode == PeMode::Frozen && opts.pe_frozen.empty()) {
    opts.pe_frozen = electrical_power(theta_of(initial), model.network);
  }

  const auto n_steps =
      static_cast<std::size_t>(std::llround(integ.t_end / integ.dt));
  const double t0 = initial.t;

  auto deriv = [&](const SystemState& s, double t) {
    return derivative_impl(s, model, attacks, t, opts, faults, sched);
  };

  Recorder rec;
  rec.init(model);
  SystemState state = initial;
  rec.record(state, model, attacks, opts, faults, sched, t0);

  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * integ.dt;
    const double dt = integ.dt;

    if (integ.method == IntegrationMethod::Euler) {
      const SystemState k1 = deriv(state, t);
      axpy(state, dt, k1);
    } else {
      const SystemState k1 = deriv(state, t);
      SystemState s2 = state;
      axpy(s2, 0.5 * dt, k1);
      s2.t = t + 0.5 * dt;
      const SystemState k2 = deriv(s2, t + 0.5 * dt);
      SystemState s3 = state;
      axpy(s3, 0.5 * dt, k2);
      s3.t = t + 0.5 * dt;
      const SystemState k3 = deriv(s3, t + 0.5 * dt);
      SystemState s4 = state;
      axpy(s4, dt, k3);
      s4.t = t + dt;
      const SystemState k4 = deriv(s4, t + dt);
      axpy(state, dt / 6.0, k1);
      axpy(state, dt / 3.0, k2);
      axpy(state, dt / 3.0, k3);
      axpy(state, dt / 6.0, k4);
    }

    const double t_next = t0 + static_cast<double>(k + 1) * integ.dt;
    state.t = t_next;
    check_finite_state(state, t_next);
    if (!(state.v_dc > 0.0)) {
      throw NonpositiveVdc("V_DC <= 0 at t = " + std::to_string(t_next));
    }
    if ((k + 1) % integ.record_every == 0 || k + 1 == n_steps) {
      rec.record(state, model, attacks, opts, faults, sched, t_next);
    }
  }
  return rec.finish(model);
}

}  // namespace

EffectiveModel inject_fault(const Model& model, const FaultSpec& fault,
                            double t) {
  EffectiveModel eff{model.network.g, model.network.b, 1.0};
  if (fault.active(t)) {
    eff.i_l_scale *= fault.i_l_scale;
    scale_symmetric(eff.g, fault.g_scale);
    scale_symmetric(eff.b, fault.b_scale);
  }
  return eff;
}

EffectiveModel inject_faults(const Model& model, std::span<const FaultSpec> faults,
                             double t) {
  EffectiveModel eff{model.network.g, model.network.b, 1.0};
  for (const auto& f : faults) {
    if (f.active(t)) {
      eff.i_l_scale *= f.i_l_scale;
      scale_symmetric(eff.g, f.g_scale);
      scale_symmetric(eff.b, f.b_scale);
    }
  }
  return eff;
}

SystemState state_derivative(const SystemState& state, const Model& model,
                             std::span<const AttackSpec> attacks, double t,
                             const SimOptions& options,
                             std::span<const FaultSpec> faults) {
  SimOptions opts = options;
  if (opts.pe_mode == PeMode::Frozen && opts.pe_frozen.empty()) {
    opts.pe_frozen = electrical_power(theta_of(state), model.network);
  }
  return derivative_impl(state, model, attacks, t, opts, faults, {});
}

TimeSeries simulate(const SystemState& initial, const Model& model,
                    std::span<const AttackSpec> attacks,
                    std::span<const FaultSpec> faults,
                    const IntegratorConfig& integ, const SimOptions& options,
                    const RelayConfig* relays) {
  const std::size_t n = model.machine_count();
  OpenSchedule sched;

  if (!options.open_breaker) {
    return simulate_with_schedule(initial, model, attacks, faults, integ,
                                  options, sched);
  }
  if (relays == nullptr) {
    throw Error("open_breaker requires a relay configuration");
  }

  // Re-simulate with the machine disconnected from its first trip onwards,
  // until no still-connected machine trips.
  sched.assign(n, kInf);
  for (std::size_t round_ = 0; round_ <= n; ++round_) {
    TimeSeries series = simulate_with_schedule(initial, model, attacks, faults,
                                               integ, options, sched);
    const auto trips = evaluate_relays(series, *relays);
    const TripEvent* first = nullptr;
    for (const auto& tr : trips) {
      if (tr.relay == RelayType::OverVdc || tr.relay == RelayType::UnderVdc) {
        continue;  // bus relays do not select a machine to open
      }
      if (tr.t_trip < sched[tr.target] &&
          (first == nullptr || tr.t_trip < first->t_trip)) {
        first = &tr;
      }
    }
    if (first == nullptr) {
      return series;
    }
    sched[first->target] = first->t_trip;
  }
  throw Error("breaker scheduling did not settle");
}

SystemState find_equilibrium(const Model& model, double i_l,
                             const SimOptions& options) {
  const auto report = validate_model(model);
  if (!report.ok()) {
    throw Error("find_equilibrium: invalid model: " + report.violations.front());
  }
  const std::size_t n = model.machine_count();
  const auto& c = model.converter;

  // Flat start; rotor angles stay pinned at their guess values, so the
  // unknown vector has 13 entries per machine plus the two shared states.
  SystemState st;
  st.t = 0.0;
  st.i_l = i_l;
  st.machines.resize(n);
  st.phi_v = 0.0;
  st.v_dc = c.v_dc_ref;

  std::vector<double> pe0 =
      electrical_power(std::vector<double>(n, 0.0), model.network);
  const double i_od_guess =
      n > 0 ? std::max(0.0, 2.0 * c.v_dc_ref * i_l /
                                (3.0 * static_cast<double>(n)))
            : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& m = st.machines[i];
    const auto& gen = model.generators[i];
    m.theta = 0.0;
    m.delta_omega = 0.0;
    m.x_gov = gen.ki_gov != 0.0 ? pe0[i] / gen.ki_gov : 0.0;
    m.x_exc = gen.ki_exc != 0.0 ? gen.v_b_ref / gen.ki_exc : 0.0;
    m.p_m = pe0[i];
    m.v_int = gen.v_b_ref;
    m.i_sd = i_od_guess;
    m.i_sq = 0.0;
    m.v_bd = gen.v_b_ref;
    m.v_bq = 0.0;
    m.i_od = i_od_guess;
    m.i_oq = 0.0;
    m.phi_d = c.kid_i != 0.0 ? c.r_f * i_od_guess / c.kid_i : 0.0;
    m.phi_q = 0.0;
  }
  st.phi_v = c.ki_v != 0.0 ? i_od_guess / c.ki_v : 0.0;

  constexpr std::size_t kPerMachine = 13;
  const std::size_t dim = kPerMachine * n + 2;

  auto pack = [&](const SystemState& s) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    Eigen::Index j = 0;
    for (const auto& m : s.machines) {
      x(j++) = m.delta_omega;
      x(j++) = m.x_gov;
      x(j++) = m.x_exc;
      x(j++) = m.p_m;
      x(j++) = m.v_int;
      x(j++) = m.i_sd;
      x(j++) = m.i_sq;
      x(j++) = m.v_bd;
      x(j++) = m.v_bq;
      x(j++) = m.i_od;
      x(j++) = m.i_oq;
      x(j++) = m.phi_d;
      x(j++) = m.phi_q;
    }
    x(j++) = s.phi_v;
    x(j++) = s.v_dc;
    return x;
  };
  auto unpack = [&](const Eigen::VectorXd& x) {
    SystemState s = st;
    Eigen::Index j = 0;
    for (auto& m : s.machines) {
      m.delta_omega = x(j++);
      m.x_gov = x(j++);
      m.x_exc = x(j++);
      m.p_m = x(j++);
      m.v_int = x(j++);
      m.i_sd = x(j++);
      m.i_sq = x(j++);
      m.v_bd = x(j++);
      m.v_bq = x(j++);
      m.i_od = x(j++);
      m.i_oq = x(j++);
      m.phi_d = x(j++);
      m.phi_q = x(j++);
    }
    s.phi_v = x(j++);
    s.v_dc = x(j++);
    return s;
  };
  auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const SystemState s = unpack(x);
    SystemState d;
    try {
      d = state_derivative(s, model, {}, 0.0, options);
    } catch (const Error&) {
      return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), 1e30);
    }
    Eigen::VectorXd r(static_cast<Eigen::Index>(dim));
    Eigen::Index j = 0;
    for (const auto& m : d.machines) {
      r(j++) = m.delta_omega;
      r(j++) = m.x_gov;
      r(j++) = m.x_exc;
      r(j++) = m.p_m;
      r(j++) = m.v_int;
      r(j++) = m.i_sd;
      r(j++) = m.i_sq;
      r(j++) = m.v_bd;
      r(j++) = m.v_bq;
      r(j++) = m.i_od;
      r(j++) = m.i_oq;
      r(j++) = m.phi_d;
      r(j++) = m.phi_q;
    }
    r(j++) = d.phi_v;
    r(j++) = d.v_dc;
    return r;
  };

  Eigen::VectorXd x = pack(st);
  Eigen::VectorXd r = residual(x);
  double rnorm = r.lpNorm<Eigen::Infinity>();
  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 500;

  for (int iter = 0; iter < kMaxIter && rnorm > kTol; ++iter) {
    // Central-difference Jacobian; the system is small.
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(dim),
                        static_cast<Eigen::Index>(dim));
    for (Eigen::Index col = 0; col < static_cast<Eigen::Index>(dim); ++col) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(col)));
      Eigen::VectorXd xp = x, xm = x;
      xp(col) += h;
      xm(col) -= h;
      jac.col(col) = (residual(xp) - residual(xm)) / (2.0 * h);
    }
    Eigen::VectorXd dx = jac.colPivHouseholderQr().solve(-r);
    if (!dx.allFinite()) {
      break;
    }

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::VectorXd x_try = x + step * dx;
      const Eigen::VectorXd r_try = residual(x_try);
      const double rn_try = r_try.lpNorm<Eigen::Infinity>();
      if (rn_try < rnorm) {
        x = x_try;
        r = r_try;
        rnorm = rn_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      break;
    }
  }

  if (rnorm > 1e-9) {
    throw NoConvergence("find_equilibrium: residual " + std::to_string(rnorm) +
                            " after damped Newton iteration",
                        rnorm);
  }
  return unpack(x);
}

}  // namespace sps
