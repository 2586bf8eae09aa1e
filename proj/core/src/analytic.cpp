#include "sps/analytic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "sps/errors.hpp"

namespace sps {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// conv kernels: Int_0^s g(u) e^{L (s - u)} du for the three waveform shapes,
// with g shifted so u = 0 is the solution start, not the attack onset.

double conv_const(double L, double s) { return (std::expm1(L * s)) / L; }

double conv_ramp(double L, double s) {
  // Int_0^s u e^{L (s - u)} du
  const double em = std::expm1(L * s);  // e^{Ls} - 1
  return s * em / L - ((em + 1.0) * (L * s - 1.0) + 1.0) / (L * L);
}

double conv_sin(double L, double s, double nu, double psi) {
  // Int_0^s sin(nu u + psi) e^{L (s - u)} du
  const double den = L * L + nu * nu;
  const double els = std::exp(L * s);
  return (-L * std::sin(nu * s + psi) - nu * std::cos(nu * s + psi) +
          els * (L * std::sin(psi) + nu * std::cos(psi))) /
         den;
}

// Plain integrals Int_0^s g(u) du for the theta response.

double plain_ramp(double s) { return 0.5 * s * s; }

double plain_sin(double s, double nu, double psi) {
  if (nu == 0.0) {
    return std::sin(psi) * s;
  }
  return (std::cos(psi) - std::cos(nu * s + psi)) / nu;
}

// One scaled waveform term of lambda4; shift = t_o - onset re-references the
// waveform to the solution start.
struct KernelPair {
  double conv = 0.0;   // Int g e^{L(s-u)}
  double plain = 0.0;  // Int g
};

KernelPair term_kernels(double scale, const TimeVaryingTerm& beta, double shift,
                        double L, double s) {
  KernelPair k;
  switch (beta.kind) {
    case TimeVaryingTerm::Kind::Zero:
      break;
    case TimeVaryingTerm::Kind::Ramp: {
      // slope * (u + shift)
      k.conv = scale * beta.slope * (conv_ramp(L, s) + shift * conv_const(L, s));
      k.plain = scale * beta.slope * (plain_ramp(s) + shift * s);
      break;
    }
    case TimeVaryingTerm::Kind::Sinusoid: {
      const double nu = two_pi * beta.frequency_hz;
      const double psi = beta.phase_rad + nu * shift;
      k.conv = scale * beta.amplitude * conv_sin(L, s, nu, psi);
      k.plain = scale * beta.amplitude * plain_sin(s, nu, psi);
      break;
    }
  }
  return k;
}

double quad_integrate(const std::function<double(double)>& f, double a, double b,
                      double rel_tol) {
  if (a == b) {
    return 0.0;
  }
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 15, rel_tol);
}

// Both integrals of lambda4 against the solution window [t_o, t].
KernelPair lambda4_kernels(const LambdaCoefficients& lc, double L, double t_o,
                           double t, double rel_tol) {
  const double s = t - t_o;
  if (lc.exact_kernels_available()) {
    const auto k1 =
        term_kernels(lc.beta1_scale, lc.beta1, t_o - lc.beta1_onset, L, s);
    const auto k2 =
        term_kernels(lc.beta2_scale, lc.beta2, t_o - lc.beta2_onset, L, s);
    return {k1.conv + k2.conv, k1.plain + k2.plain};
  }
  if (!lc.pe_traj) {
    throw Error(
        "lambda4 contains an electrical-power term but no trajectory was "
        "supplied");
  }
  KernelPair k;
  k.conv = quad_integrate(
      [&](double tau) { return lc.lambda4(tau) * std::exp(L * (t - tau)); }, t_o,
      t, rel_tol);
  k.plain = quad_integrate([&](double tau) { return lc.lambda4(tau); }, t_o, t,
                           rel_tol);
  return k;
}

double stable_rate_or_throw(const LambdaCoefficients& lc) {
  const double L = lc.lambda1 + lc.lambda2;
  if (L == 0.0) {
    throw DegenerateEigenvalue(
        "lambda1 + lambda2 == 0: the solution form divides by the combined "
        "decay rate");
  }
  return L;
}

}  // namespace

double LambdaCoefficients::lambda4(double t) const {
  double v = beta1_scale * beta1(t - beta1_onset) +
             beta2_scale * beta2(t - beta2_onset);
  if (pe_scale != 0.0) {
    if (!pe_traj) {
      throw Error("lambda4 requires a P_e trajectory when alpha2 != 0");
    }
    v += pe_scale * pe_traj(t);
  }
  return v;
}

LambdaCoefficients lambda_coefficients(const GeneratorParams& gen,
                                       const GovernorAttackCoeffs& attack,
                                       std::function<double(double)> pe_traj) {
  if (!(gen.h > 0.0)) {
    throw Error("lambda_coefficients requires H > 0");
  }
  const double factor = gen.omega_s / (2.0 * gen.h);  // 1 / (2H/omega_s)

  LambdaCoefficients lc;
  lc.lambda1 = -gen.d * factor;
  lc.lambda2 = -gen.d * attack.alpha1 * factor;
  lc.lambda3 = -(gen.d * attack.gamma1 + attack.gamma2) * factor;
  lc.beta1_scale = -gen.d * factor;
  lc.beta2_scale = -factor;
  lc.pe_scale = -attack.alpha2 * factor;
  lc.beta1 = attack.beta1;
  lc.beta2 = attack.beta2;
  lc.beta1_onset = attack.beta1_onset;
  lc.beta2_onset = attack.beta2_onset;
  lc.pe_traj = std::move(pe_traj);
  return lc;
}

double delta_omega_closed_form(const LambdaCoefficients& lc, double t_o,
                               double dw0, double t, double quad_rel_tol) {
  const double L = stable_rate_or_throw(lc);
  if (t < t_o) {
    throw Error("delta_omega_closed_form requires t >= t_o");
  }
  const double s = t - t_o;
  const double decay = std::exp(L * s);
  const auto k = lambda4_kernels(lc, L, t_o, t, quad_rel_tol);
  return dw0 * decay + k.conv + (lc.lambda3 / L) * (decay - 1.0);
}

double theta_closed_form(const LambdaCoefficients& lc, double t_o, double th0,
                         double dw0, double phi, double t,
                         double quad_rel_tol) {
  const double L = stable_rate_or_throw(lc);
  if (t < t_o) {
    throw Error("theta_closed_form requires t >= t_o");
  }
  const double s = t - t_o;
  const double em = std::expm1(L * s);  // e^{Ls} - 1
  const auto k = lambda4_kernels(lc, L, t_o, t, quad_rel_tol);
  // The (e^{Ls} - 1) factor keeps theta(t_o) equal to the initial angle; the
  // secular part grows at -lambda3 phi / L per second.
  return th0 + phi * ((dw0 * L + lc.lambda3) / (L * L)) * em -
         phi * lc.lambda3 * s / L + (phi / L) * (k.conv - k.plain);
}

SteadyState case_steady_state(CaseStudy cs, const GeneratorParams& gen,
                              double coeff, double dw0, double th0) {
  if (!(gen.h > 0.0) || !(gen.d > 0.0)) {
    throw Error("case_steady_state requires H > 0 and D > 0");
  }
  const double factor = gen.omega_s / (2.0 * gen.h);
  const double lambda1 = -gen.d * factor;

  SteadyState ss;
  switch (cs) {
    case CaseStudy::Nominal: {
      ss.delta_omega = 0.0;
      ss.theta_drift_rate = 0.0;
      ss.theta_limit = th0 - gen.phi * dw0 / lambda1;
      ss.description = "rotor speed returns to synchronous, angle settles";
      break;
    }
    case CaseStudy::ConstantBias: {
      // Bias entering the swing power balance: dw settles at -gamma/D and the
      // angle drifts without bound.
      const double dw_ss = -coeff / gen.d;
      ss.delta_omega = dw_ss;
      ss.theta_drift_rate = gen.phi * dw_ss;
      ss.theta_limit = std::nullopt;
      ss.description =
          "rotor speed offset persists; rotor angle magnitude grows with time";
      break;
    }
    case CaseStudy::Amplification: {
      const double rate = lambda1 * (1.0 + coeff);
      if (rate >= 0.0) {
        throw UnstableAmplification(
            "amplification alpha1 <= -1: attacked swing mode does not decay; "
            "rotor speed diverges");
      }
      ss.delta_omega = 0.0;
      ss.theta_drift_rate = 0.0;
      ss.theta_limit = th0 - gen.phi * dw0 / rate;
      ss.description =
          "rotor speed returns to synchronous; angle settles at a shifted value";
      break;
    }
  }
  return ss;
}

double dc_attack_increment(const BusSnapshot& snap, const ConverterParams& conv,
                           std::span<const VoltageAttackCoeffs> attacks,
                           double t) {
  const std::size_t n = snap.v_bd.size();
  if (snap.v_bq.size() != n || snap.i_od.size() != n || snap.i_oq.size() != n) {
    throw DimensionMismatch("dc_attack_increment: snapshot arrays disagree");
  }
  if (attacks.size() != n) {
    throw DimensionMismatch(
        "dc_attack_increment: one coefficient set per machine required");
  }
  if (!(snap.v_dc > 0.0)) {
    throw NonpositiveVdc("dc_attack_increment requires V_DC > 0");
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = attacks[i];
    const double inj_d =
        a.alpha3 * snap.v_bd[i] + a.beta3(t - a.beta3_onset) + a.gamma3;
    const double inj_q =
        a.alpha4 * snap.v_bq[i] + a.beta4(t - a.beta4_onset) + a.gamma4;
    sum += inj_d * snap.i_od[i] + inj_q * snap.i_oq[i];
  }
  return 3.0 / (2.0 * conv.c_dc * snap.v_dc) * sum;
}

double omega_from_vdc(double dv, const ConverterParams& conv,
                      const GeneratorParams& gen) {
  if (!(dv > -conv.v_dc_ref)) {
    throw InvalidVoltage("omega_from_vdc requires dV > -V_DC_ref (got dV=" +
                         std::to_string(dv) + ")");
  }
  const double k = conv.c_dc * gen.omega_s / (4.0 * gen.h * conv.s_c);
  const double v = dv + conv.v_dc_ref;
  return k * (v * v - conv.v_dc_ref * conv.v_dc_ref);
}

}  // namespace sps
