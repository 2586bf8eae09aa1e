#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace sps {

/// Per-machine physical constants and controller gains. All AC quantities
/// are p.u. on the machine base; time constants in seconds.
struct GeneratorParams {
  std::size_t index = 0;
  double h = 3.0;           ///< inertia constant, s
  double d = 2.0;           ///< damping constant, p.u.
  double omega_s = 1.0;     ///< synchronous speed reference, p.u.
  double f_nominal = 60.0;  ///< system frequency, Hz (50 or 60)
  double phi = 2.0 * std::numbers::pi * 60.0;  ///< angle-rate constant 2*pi*f, rad/s
  double kp_gov = 5.0;      ///< governor proportional gain
  double ki_gov = 10.0;     ///< governor integral gain
  double kp_exc = 0.5;      ///< exciter proportional gain
  double ki_exc = 2.0;      ///< exciter integral gain
  double v_b_ref = 1.0;     ///< bus voltage setpoint, p.u.
  double t_m = 0.5;         ///< prime-mover lag, s
  double t_v = 0.3;         ///< internal-voltage lag, s

  /// Sets f_nominal and keeps phi = 2*pi*f exact.
  void set_frequency(double f_hz) {
    f_nominal = f_hz;
    phi = 2.0 * std::numbers::pi * f_hz;
  }

  friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

/// Kron-reduced machine-to-machine network: conductance G, susceptance B
/// (both symmetric) and internal voltage magnitudes.
struct NetworkModel {
  std::size_t n = 0;
  Eigen::MatrixXd g;      ///< N x N conductance, p.u.
  Eigen::MatrixXd b;      ///< N x N susceptance, p.u.
  Eigen::VectorXd v_mag;  ///< internal voltage magnitude per machine, p.u.

  friend bool operator==(const NetworkModel& a, const NetworkModel& b_) {
    return a.n == b_.n && a.g == b_.g && a.b == b_.b && a.v_mag == b_.v_mag;
  }
};

/// Declares whether the DC-side quantities of a model are physical units
/// (volts, farads, VA) or p.u.; echoed into every emitted file.
enum class DcUnits { PerUnit, Physical };

/// Converter and DC-link constants, shared by all machines.
struct ConverterParams {
  double r_s = 0.2;     ///< source resistance, p.u.
  double l_s = 0.1;     ///< source inductance, p.u.
  double c_s = 0.05;    ///< source-side capacitance, p.u.
  double r_f = 0.05;    ///< filter resistance, p.u.
  double l_f = 0.05;    ///< filter inductance, p.u.
  double kpd_i = 0.5;   ///< d-axis current controller, proportional
  double kid_i = 5.0;   ///< d-axis current controller, integral
  double kpq_i = 0.5;   ///< q-axis current controller, proportional
  double kiq_i = 5.0;   ///< q-axis current controller, integral
  double kp_v = 0.3;    ///< DC-voltage regulator, proportional
  double ki_v = 2.0;    ///< DC-voltage regulator, integral
  double c_dc = 1.0;    ///< DC-side capacitance (unit per DcUnits)
  double s_c = 1.0;     ///< converter power rating (unit per DcUnits)
  double v_dc_ref = 1.0;  ///< DC-link voltage setpoint (unit per DcUnits)

  friend bool operator==(const ConverterParams&, const ConverterParams&) = default;
};

/// Complete plant description shared by the simulator and the analytic paths.
struct Model {
  std::vector<GeneratorParams> generators;
  NetworkModel network;
  ConverterParams converter;
  DcUnits dc_units = DcUnits::PerUnit;

  std::size_t machine_count() const { return generators.size(); }

  friend bool operator==(const Model&, const Model&) = default;
};

/// Dynamic states of one machine and its converter chain.
struct MachineState {
  double theta = 0.0;        ///< rotor angle, rad
  double delta_omega = 0.0;  ///< rotor-speed deviation from omega_s, p.u.
  double x_gov = 0.0;        ///< governor integrator
  double x_exc = 0.0;        ///< exciter integrator
  double p_m = 0.0;          ///< mechanical power, p.u.
  double v_int = 0.0;        ///< field-voltage-driven internal voltage, p.u.
  double i_sd = 0.0, i_sq = 0.0;  ///< source currents, p.u.
  double v_bd = 0.0, v_bq = 0.0;  ///< bus voltages, p.u.
  double i_od = 0.0, i_oq = 0.0;  ///< output currents, p.u.
  double phi_d = 0.0, phi_q = 0.0;  ///< current-controller integrators

  friend bool operator==(const MachineState&, const MachineState&) = default;
};

/// Full system state at one instant. i_l is exogenous (set by the scenario,
/// scaled by active faults); it is carried here so the state is self-contained.
struct SystemState {
  double t = 0.0;
  std::vector<MachineState> machines;
  double phi_v = 0.0;  ///< DC-voltage regulator integrator (shared)
  double v_dc = 0.0;   ///< DC-link voltage (unit per model DcUnits)
  double i_l = 0.0;    ///< DC load current (exogenous)

  std::size_t machine_count() const { return machines.size(); }

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Result of validate_model; empty == valid.
struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every structural invariant of the model; returns all violations
/// rather than failing fast.
ValidationReport validate_model(const Model& model);

/// Electrical power injected by each machine for the given rotor angles:
///   P_e[i] = sum_k |V_i||V_k| (G_ik cos(th_i - th_k) + B_ik sin(th_i - th_k)).
/// Depends on angle differences only.
std::vector<double> electrical_power(std::span<const double> theta,
                                     const NetworkModel& net);

/// Algebraic controller outputs for one machine, computed from the (possibly
/// attacked) measurements the controllers actually see.
struct DerivedInputs {
  double p_f = 0.0;   ///< governor fuel index, p.u.
  double e_f = 0.0;   ///< exciter field voltage, p.u.
  double v_sd = 0.0;  ///< source voltage d-component (= internal voltage), p.u.
  double v_sq = 0.0;  ///< source voltage q-component (frame aligned: 0)
};

/// meas_delta_omega / meas_v_b are the measurement values delivered to the
/// governor and exciter; pass the true state values when no attack is active.
DerivedInputs derived_inputs(const MachineState& ms, const GeneratorParams& gen,
                             double meas_delta_omega, double meas_v_b);

/// Bus voltage magnitude seen by the exciter.
inline double bus_voltage_magnitude(double v_bd, double v_bq) {
  return std::sqrt(v_bd * v_bd + v_bq * v_bq);
}

}  // namespace sps
