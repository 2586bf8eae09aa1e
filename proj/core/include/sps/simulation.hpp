#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sps/attack.hpp"
#include "sps/model.hpp"
#include "sps/timeseries.hpp"

namespace sps {

enum class IntegrationMethod { RK4, Euler };

struct IntegratorConfig {
  IntegrationMethod method = IntegrationMethod::RK4;
  double dt = 1e-4;              ///< step, s
  double t_end = 10.0;           ///< horizon, s
  std::size_t record_every = 1;  ///< output decimation

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// Source of the electrical power consumed by the swing update: the Kron
/// network, or values frozen at the start of the run (linear-benchmark mode).
enum class PeMode { Network, Frozen };

struct SimOptions {
  bool shared_sensor = true;  ///< governor reads the same corrupted speed as the swing damping
  PeMode pe_mode = PeMode::Network;
  std::vector<double> pe_frozen;  ///< per machine; empty = freeze at initial state
  bool open_breaker = false;      ///< disconnect a machine when one of its relays trips

  friend bool operator==(const SimOptions&, const SimOptions&) = default;
};

/// A window-scoped disturbance: scales the DC load current and/or selected
/// network admittance entries while active. Entry scales are applied
/// symmetrically so G and B stay symmetric.
struct FaultSpec {
  struct EntryScale {
    std::size_t row = 0, col = 0;
    double factor = 1.0;
    friend bool operator==(const EntryScale&, const EntryScale&) = default;
  };

  double t_start = 0.0;
  double t_end = 0.0;  ///< half-open window [t_start, t_end)
  double i_l_scale = 1.0;
  std::vector<EntryScale> g_scale;
  std::vector<EntryScale> b_scale;

  bool active(double t) const { return t >= t_start && t < t_end; }

  friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

/// Model view with all faults active at time t applied.
struct EffectiveModel {
  Eigen::MatrixXd g, b;
  double i_l_scale = 1.0;
};

/// Applies one fault's scaling if it is active at t.
EffectiveModel inject_fault(const Model& model, const FaultSpec& fault, double t);

/// Applies every active fault (factors compose multiplicatively).
EffectiveModel inject_faults(const Model& model, std::span<const FaultSpec> faults,
                             double t);

/// Full derivative of the system state under attack-corrupted measurements.
/// True values drive the physical branches; corrupted values enter only the
/// swing power/damping terms, the governor and exciter errors, and the
/// converter power terms of the DC-link balance.
/// Throws NonpositiveVdc / NonfiniteState.
SystemState state_derivative(const SystemState& state, const Model& model,
                             std::span<const AttackSpec> attacks, double t,
                             const SimOptions& options = {},
                             std::span<const FaultSpec> faults = {});

struct RelayConfig;  // protection.hpp

/// Fixed-step integration of the full plant. Deterministic: identical inputs
/// produce identical output. Recorded columns include the raw states and the
/// derived p_e, p_f, e_f and frequency signals.
/// `relays` is only consulted when options.open_breaker is set.
TimeSeries simulate(const SystemState& initial, const Model& model,
                    std::span<const AttackSpec> attacks,
                    std::span<const FaultSpec> faults,
                    const IntegratorConfig& integ,
                    const SimOptions& options = {},
                    const RelayConfig* relays = nullptr);

/// Attack-free equilibrium for the given DC load current, found by damped
/// Newton iteration on the state derivative (rotor angles held at their
/// initial-guess values; states with no influence on any derivative are
/// pinned). Throws NoConvergence when the infinity-norm residual cannot be
/// driven below 1e-9 within 500 iterations.
SystemState find_equilibrium(const Model& model, double i_l,
                             const SimOptions& options = {});

}  // namespace sps
