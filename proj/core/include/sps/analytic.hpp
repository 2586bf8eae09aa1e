#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "sps/attack.hpp"
#include "sps/model.hpp"

namespace sps {

/// Injection coefficients on the two rotor-side measurement channels:
/// channel 1 corrupts the speed deviation, channel 2 the electrical power.
/// Each beta is evaluated at (t - onset).
struct GovernorAttackCoeffs {
  double alpha1 = 0.0;
  TimeVaryingTerm beta1;
  double gamma1 = 0.0;
  double beta1_onset = 0.0;
  double alpha2 = 0.0;
  TimeVaryingTerm beta2;
  double gamma2 = 0.0;
  double beta2_onset = 0.0;
};

/// Coefficients of the attacked linear swing mode
///   d(dw)/dt = (lambda1 + lambda2) dw + lambda3 + lambda4(t).
/// lambda4 keeps its ingredients in structured form so the convolution with
/// the decay kernel can be evaluated in closed form whenever the power
/// channel carries no amplification (alpha2 == 0).
struct LambdaCoefficients {
  double lambda1 = 0.0;  ///< -D / (2H/omega_s); < 0 for any valid machine
  double lambda2 = 0.0;  ///< -D*alpha1 / (2H/omega_s)
  double lambda3 = 0.0;  ///< -(D*gamma1 + gamma2) / (2H/omega_s)

  double beta1_scale = 0.0;  ///< -D / (2H/omega_s)
  double beta2_scale = 0.0;  ///< -1 / (2H/omega_s)
  double pe_scale = 0.0;     ///< -alpha2 / (2H/omega_s)
  TimeVaryingTerm beta1, beta2;
  double beta1_onset = 0.0, beta2_onset = 0.0;
  std::function<double(double)> pe_traj;  ///< required when pe_scale != 0

  double lambda4(double t) const;
  bool exact_kernels_available() const { return pe_scale == 0.0; }
};

/// Builds the swing-mode coefficients for one machine under the given
/// injection. pe_traj is only consulted when alpha2 != 0 (the solution is
/// then semi-analytic: the power trajectory must be supplied externally).
LambdaCoefficients lambda_coefficients(const GeneratorParams& gen,
                                       const GovernorAttackCoeffs& attack,
                                       std::function<double(double)> pe_traj = {});

/// Rotor-speed deviation at time t >= t_o for initial deviation dw0 at t_o:
///   dw(t) = dw0 e^{L s} + Int_{t_o}^{t} lambda4(tau) e^{L (t-tau)} dtau
///           + (lambda3/L)(e^{L s} - 1),   L = lambda1 + lambda2, s = t - t_o.
/// The convolution uses exact antiderivatives for Zero/Ramp/Sinusoid terms and
/// adaptive quadrature (relative tolerance quad_rel_tol) otherwise.
/// Throws DegenerateEigenvalue when L == 0.
double delta_omega_closed_form(const LambdaCoefficients& lc, double t_o,
                               double dw0, double t,
                               double quad_rel_tol = 1e-9);

/// Rotor angle at time t >= t_o; satisfies d(theta)/dt = phi * dw(t) and
/// theta(t_o) = th0 exactly. Same kernel policy as delta_omega_closed_form.
double theta_closed_form(const LambdaCoefficients& lc, double t_o, double th0,
                         double dw0, double phi, double t,
                         double quad_rel_tol = 1e-9);

/// The three canonical operating cases for the analytic steady state.
enum class CaseStudy {
  Nominal,       ///< no injection
  ConstantBias,  ///< constant bias on the swing power balance
  Amplification, ///< amplification of the speed-deviation measurement
};

/// Long-run behaviour of rotor speed and angle for one case.
struct SteadyState {
  std::optional<double> delta_omega;  ///< empty when unbounded
  double theta_drift_rate = 0.0;      ///< rad/s secular drift (0 = finite limit)
  std::optional<double> theta_limit;  ///< set when theta converges
  std::string description;
};

/// coeff is the case's single nonzero injection coefficient: ignored for
/// Nominal, the constant bias gamma for ConstantBias, alpha1 for
/// Amplification. Throws UnstableAmplification when the attacked mode is not
/// decaying (alpha1 <= -1).
SteadyState case_steady_state(CaseStudy cs, const GeneratorParams& gen,
                              double coeff, double dw0, double th0);

/// Bus-side electrical snapshot used by the DC-link increment.
struct BusSnapshot {
  std::vector<double> v_bd, v_bq;  ///< per machine, p.u.
  std::vector<double> i_od, i_oq;  ///< per machine, p.u.
  double v_dc = 0.0;
};

/// Injection coefficients on one machine's bus-voltage measurements:
/// channel 3 corrupts the d-axis, channel 4 the q-axis.
struct VoltageAttackCoeffs {
  double alpha3 = 0.0;
  TimeVaryingTerm beta3;
  double gamma3 = 0.0;
  double beta3_onset = 0.0;
  double alpha4 = 0.0;
  TimeVaryingTerm beta4;
  double gamma4 = 0.0;
  double beta4_onset = 0.0;
};

/// Additional DC-link voltage slope caused by corrupting the bus-voltage
/// measurements inside the converter power terms:
///   (3 / (2 C_dc V_dc)) * sum_i [ (a3 v_bd + b3(t) + g3) i_od
///                               + (a4 v_bq + b4(t) + g4) i_oq ].
/// Throws NonpositiveVdc when the snapshot voltage is not positive.
double dc_attack_increment(const BusSnapshot& snap, const ConverterParams& conv,
                           std::span<const VoltageAttackCoeffs> attacks,
                           double t);

/// Rotor-speed deviation implied by a DC-link voltage deviation dv under the
/// AC/DC power-balance relation:
///   dw = (C_dc omega_s / (4 H S_c)) ((dv + V_dc*)^2 - V_dc*^2).
/// Strictly increasing on dv > -V_dc*; throws InvalidVoltage outside that
/// domain.
double omega_from_vdc(double dv, const ConverterParams& conv,
                      const GeneratorParams& gen);

}  // namespace sps
