#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "sps/model.hpp"

namespace sps {

/// Measurement channels a false-data injection can corrupt.
enum class AttackTarget {
  RotorSpeedDeviation,  ///< delta-omega seen by governor / swing damping
  ElectricalPower,      ///< P_e seen by the swing update
  BusVoltageD,          ///< v_bd seen by the exciter and DC-power terms
  BusVoltageQ,          ///< v_bq seen by the exciter and DC-power terms
};

/// Time-varying injection component, evaluated at (t - t_start).
struct TimeVaryingTerm {
  enum class Kind { Zero, Ramp, Sinusoid };

  Kind kind = Kind::Zero;
  double slope = 0.0;         ///< Ramp: signal units per second
  double amplitude = 0.0;     ///< Sinusoid
  double frequency_hz = 0.0;  ///< Sinusoid
  double phase_rad = 0.0;     ///< Sinusoid

  double operator()(double elapsed) const;

  static TimeVaryingTerm zero() { return {}; }
  static TimeVaryingTerm ramp(double slope_per_s) {
    TimeVaryingTerm t;
    t.kind = Kind::Ramp;
    t.slope = slope_per_s;
    return t;
  }
  static TimeVaryingTerm sinusoid(double amplitude, double frequency_hz,
                                  double phase_rad = 0.0) {
    TimeVaryingTerm t;
    t.kind = Kind::Sinusoid;
    t.amplitude = amplitude;
    t.frequency_hz = frequency_hz;
    t.phase_rad = phase_rad;
    return t;
  }

  friend bool operator==(const TimeVaryingTerm&, const TimeVaryingTerm&) = default;
};

/// One false-data injection: x_hat = x + alpha*x + beta(t - t_start) + gamma,
/// active on the half-open window [t_start, t_end). t_end may be +inf for a
/// persistent attack.
struct AttackSpec {
  AttackTarget target = AttackTarget::RotorSpeedDeviation;
  std::size_t machine = 0;  ///< 0-based machine index
  double alpha = 0.0;       ///< amplification coefficient
  double gamma = 0.0;       ///< constant bias, units of the target signal
  TimeVaryingTerm beta;
  double t_start = 0.0;
  double t_end = std::numeric_limits<double>::infinity();

  bool active(double t) const { return t >= t_start && t < t_end; }

  friend bool operator==(const AttackSpec&, const AttackSpec&) = default;
};

/// Corrupts one measurement with the given injection; identity outside the
/// attack window.
double apply_fdia(double true_value, const AttackSpec& spec, double t);

/// The complete measurement vector the controllers see at time t.
struct MeasurementSet {
  std::vector<double> delta_omega;  ///< per machine
  std::vector<double> p_e;          ///< per machine
  std::vector<double> v_bd;         ///< per machine
  std::vector<double> v_bq;         ///< per machine
};

/// Applies every active attack to the true state; channels without an active
/// attack pass through. pe_true supplies the true electrical power (it is not
/// part of SystemState). Throws OverlappingAttacks if two specs target the
/// same (target, machine) pair at the same instant.
MeasurementSet corrupted_measurements(const SystemState& state,
                                      std::span<const double> pe_true,
                                      std::span<const AttackSpec> attacks,
                                      double t);

}  // namespace sps
