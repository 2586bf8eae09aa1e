#include "sps/attack.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "sps/errors.hpp"

namespace sps {

double TimeVaryingTerm::operator()(double elapsed) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Ramp:
      return slope * elapsed;
    case Kind::Sinusoid:
      return amplitude *
             std::sin(2.0 * std::numbers::pi * frequency_hz * elapsed + phase_rad);
  }
  return 0.0;
}

double apply_fdia(double true_value, const AttackSpec& spec, double t) {
  if (!spec.active(t)) {
    return true_value;
  }
  return true_value + spec.alpha * true_value + spec.beta(t - spec.t_start) +
         spec.gamma;
}

MeasurementSet corrupted_measurements(const SystemState& state,
                                      std::span<const double> pe_true,
                                      std::span<const AttackSpec> attacks,
                                      double t) {
  const std::size_t n = state.machine_count();
  if (pe_true.size() != n) {
    throw DimensionMismatch("corrupted_measurements: pe_true size mismatch");
  }

  MeasurementSet meas;
  meas.delta_omega.resize(n);
  meas.p_e.assign(pe_true.begin(), pe_true.end());
  meas.v_bd.resize(n);
  meas.v_bq.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    meas.delta_omega[i] = state.machines[i].delta_omega;
    meas.v_bd[i] = state.machines[i].v_bd;
    meas.v_bq[i] = state.machines[i].v_bq;
  }

  // One active spec per (target, machine) pair.
  constexpr std::size_t kTargets = 4;
  std::vector<const AttackSpec*> owner(kTargets * n, nullptr);

  for (const auto& spec : attacks) {
    if (!spec.active(t)) {
      continue;
    }
    if (spec.machine >= n) {
      throw DimensionMismatch("attack targets machine " +
                              std::to_string(spec.machine + 1) + " of " +
                              std::to_string(n));
    }
    const std::size_t slot =
        static_cast<std::size_t>(spec.target) * n + spec.machine;
    if (owner[slot] != nullptr) {
      throw OverlappingAttacks(
          "two attacks target the same channel of machine " +
          std::to_string(spec.machine + 1) + " at t=" + std::to_string(t));
    }
    owner[slot] = &spec;

    double* channel = nullptr;
    switch (spec.target) {
      case AttackTarget::RotorSpeedDeviation:
        channel = &meas.delta_omega[spec.machine];
        break;
      case AttackTarget::ElectricalPower:
        channel = &meas.p_e[spec.machine];
        break;
      case AttackTarget::BusVoltageD:
        channel = &meas.v_bd[spec.machine];
        break;
      case AttackTarget::BusVoltageQ:
        channel = &meas.v_bq[spec.machine];
        break;
    }
    *channel = apply_fdia(*channel, spec, t);
  }
  return meas;
}

}  // namespace sps
