// End-to-end acceptance suite. Each check prints one line; the process exits
// nonzero if any check fails. Run from anywhere; the scenario directory is
// baked in at configure time and can be overridden as argv[1].
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sps/analytic.hpp"
#include "sps/errors.hpp"
#include "sps/protection.hpp"
#include "sps/scenario.hpp"
#include "sps/simulation.hpp"

using namespace sps;

namespace {

int g_failures = 0;

void report(int id, const std::string& what, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id,
              what.c_str(), detail.c_str());
  if (!pass) {
    ++g_failures;
  }
}

std::filesystem::path g_scenarios = SPS_SCENARIO_DIR;

Scenario load(const std::string& name) {
  return load_scenario(g_scenarios / (name + ".scenario"));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

double max_abs_column_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

// --- criterion 1: closed form vs numerical oracle on the linear benchmark ---
void criterion_1() {
  Scenario sc = load("benchmark");
  sc.integrator.record_every = 1;  // compare at every integration step
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult res = execute_scenario(sc);
  const TimeSeries cf = analytic_trajectory(sc, 0);
  const auto t1 = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(t1 - t0).count();

  const double worst = max_abs_column_diff(res.series.column("delta_omega_1_pu"),
                                           cf.column("delta_omega_cf_1_pu"));
  const bool sized = res.series.times.size() == cf.times.size() &&
                     res.series.times.size() ==
                         static_cast<std::size_t>(
                             std::llround(sc.integrator.t_end /
                                          sc.integrator.dt)) +
                             1;
  report(1, "closed form vs numerical oracle, dt=1e-4 over [0,10] s",
         sized && worst <= 1e-6 && seconds <= 5.0,
         "max |dw_num - dw_cf| = " + fmt(worst) + ", runtime " + fmt(seconds) +
             " s");
}

// --- criterion 2: case-study steady states from the simulation ---
void criterion_2() {
  {
    Scenario sc = load("case_nominal");
    const RunResult res = execute_scenario(sc);
    const double dw_end = res.series.column("delta_omega_1_pu").back();
    report(2, "nominal case returns to synchronous speed at t=60 s",
           std::abs(dw_end) <= 1e-8, "|dw(60)| = " + fmt(std::abs(dw_end)));
  }
  {
    Scenario sc = load("case_constant_bias");
    const double gamma = sc.attacks.at(0).gamma;
    const double d = sc.model.generators[0].d;
    const RunResult res = execute_scenario(sc);
    const double dw_end = res.series.column("delta_omega_1_pu").back();
    const double target = -gamma / d;
    report(2, "constant-bias case settles at -gamma/D at t=60 s",
           std::abs(dw_end - target) <= 1e-4,
           "dw(60) = " + fmt(dw_end) + ", -gamma/D = " + fmt(target));
    const auto ss = case_steady_state(CaseStudy::ConstantBias,
                                      sc.model.generators[0], gamma, 0.0, 0.0);
    report(2, "constant-bias angle drifts at phi * dw_ss",
           ss.delta_omega.has_value() &&
               std::abs(*ss.delta_omega - target) <= 1e-12 &&
               !ss.theta_limit.has_value(),
           "drift rate " + fmt(ss.theta_drift_rate) + " rad/s");
  }
  {
    Scenario sc = load("case_amplification");
    const double alpha = sc.attacks.at(0).alpha;
    const RunResult res = execute_scenario(sc);
    const double dw_end = res.series.column("delta_omega_1_pu").back();
    const auto& th = res.series.column("theta_1_rad");
    const auto ss =
        case_steady_state(CaseStudy::Amplification, sc.model.generators[0],
                          alpha, 0.02, res.initial.machines[0].theta);
    const double th_pred = ss.theta_limit.value_or(1e9);
    report(2,
           "amplification case (-1 < alpha < 0) returns to synchronous speed",
           std::abs(dw_end) <= 1e-6, "|dw(60)| = " + fmt(std::abs(dw_end)));
    report(2, "amplification case settles at a finite shifted angle",
           std::abs(th.back() - th_pred) <= 1e-3 &&
               std::abs(th.back() - th[th.size() - 2]) <= 1e-5,
           "theta(60) = " + fmt(th.back()) + ", predicted " + fmt(th_pred));
  }
}

// --- criterion 3: integrator order via step halving ---
void criterion_3() {
  Scenario sc = load("benchmark");
  sc.integrator.t_end = 5.0;
  const SystemState init = [&] {
    Scenario eq_sc = sc;
    return execute_scenario(eq_sc).initial;
  }();

  auto run = [&](double dt, std::size_t every) {
    IntegratorConfig ic;
    ic.dt = dt;
    ic.t_end = 5.0;
    ic.record_every = every;
    return simulate(init, sc.model, sc.attacks, sc.faults, ic, sc.options);
  };
  const TimeSeries a = run(0.05, 1);
  const TimeSeries b = run(0.025, 2);
  const TimeSeries c = run(0.0125, 4);
  const double e1 = max_abs_column_diff(a.column("delta_omega_1_pu"),
                                        b.column("delta_omega_1_pu"));
  const double e2 = max_abs_column_diff(b.column("delta_omega_1_pu"),
                                        c.column("delta_omega_1_pu"));
  const double ratio = e1 / e2;
  report(3, "step-halving error ratio on the smooth no-relay scenario",
         ratio >= 8.0, "ratio = " + fmt(ratio) + " (ideal 16)");
}

// --- criterion 4: relay thresholds and trip timing on synthetic series ---
TimeSeries synthetic_series(double dt, std::size_t n, std::vector<double> freq,
                            std::vector<double> vdc) {
  TimeSeries ts;
  ts.n_machines = 1;
  ts.f_nominal = 60.0;
  ts.v_dc_ref = 1.0;
  ts.dc_units = DcUnits::PerUnit;
  for (std::size_t k = 0; k < n; ++k) {
    ts.times.push_back(static_cast<double>(k) * dt);
  }
  ts.add_column("freq_1_hz", std::move(freq));
  ts.add_column("v_dc_pu", std::move(vdc));
  return ts;
}

void criterion_4() {
  const double dt = 0.01;
  const std::size_t n = 1001;
  RelayConfig cfg;  // 5% / 0.02 Hz/s / 10% / dwell 0.1 / window 0.1

  {  // frequency ramp through 63.0 Hz
    std::vector<double> f(n), v(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      f[k] = 60.0 + 0.5 * (k * dt);
    }
    RelayConfig quiet = cfg;
    quiet.rocof_limit = 1e9;
    const auto trips = evaluate_relays(synthetic_series(dt, n, f, v), quiet);
    const bool one = trips.size() == 1 && trips[0].relay == RelayType::OverFreq;
    const double t_first = 6.0;  // crosses 63.0 exactly at t = 6 (strictly after)
    const bool timed =
        one && std::abs(trips[0].t_trip - (t_first + cfg.dwell)) <= dt + 1e-9;
    report(4, "over-frequency relay trips once at 63 Hz + dwell",
           one && timed,
           one ? "t_trip = " + fmt(trips[0].t_trip) : "trips = " +
                                                          std::to_string(trips.size()));
  }
  {  // quadratic frequency puts the slope estimate through 0.02 Hz/s
    const double a = 0.01;
    std::vector<double> f(n), v(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = k * dt;
      f[k] = 60.0 + 0.5 * a * t * t;
    }
    const auto trips = evaluate_relays(synthetic_series(dt, n, f, v), cfg);
    const bool one = trips.size() == 1 && trips[0].relay == RelayType::Rocof;
    const double t_first = cfg.rocof_limit / a + cfg.rocof_window / 2.0;
    const bool timed =
        one && std::abs(trips[0].t_trip - (t_first + cfg.dwell)) <= dt + 1e-9;
    report(4, "ROCOF relay trips once as the slope crosses 0.02 Hz/s",
           one && timed,
           one ? "t_trip = " + fmt(trips[0].t_trip)
               : "trips = " + std::to_string(trips.size()));
  }
  {  // DC sag through -10% and swell through +10%
    std::vector<double> f(n, 60.0), v(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = k * dt;
      if (t >= 2.0) {
        v[k] = 0.85;
      }
    }
    auto trips = evaluate_relays(synthetic_series(dt, n, f, v), cfg);
    const bool under = trips.size() == 1 &&
                       trips[0].relay == RelayType::UnderVdc &&
                       std::abs(trips[0].t_trip - (2.0 + cfg.dwell)) <= dt + 1e-9;
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = k * dt >= 3.0 ? 1.12 : 1.0;
    }
    trips = evaluate_relays(synthetic_series(dt, n, f, v), cfg);
    const bool over = trips.size() == 1 &&
                      trips[0].relay == RelayType::OverVdc &&
                      std::abs(trips[0].t_trip - (3.0 + cfg.dwell)) <= dt + 1e-9;
    report(4, "DC-voltage relays trip once per direction at the 10% band",
           under && over,
           std::string("under=") + (under ? "ok" : "bad") + " over=" +
               (over ? "ok" : "bad"));
  }
}

// --- criterion 5: sign of the attacked DC-link increment ---
void criterion_5() {
  std::mt19937 rng(20240809);
  std::uniform_real_distribution<double> mag(0.01, 2.0);
  ConverterParams conv;
  std::size_t failures = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    BusSnapshot snap;
    for (int i = 0; i < 2; ++i) {
      snap.v_bd.push_back(mag(rng));
      snap.v_bq.push_back(mag(rng));
      snap.i_od.push_back(mag(rng));
      snap.i_oq.push_back(mag(rng));
    }
    snap.v_dc = mag(rng);
    std::vector<VoltageAttackCoeffs> att(2);
    for (auto& a : att) {
      a.alpha3 = mag(rng);
      a.gamma3 = mag(rng);
      a.alpha4 = mag(rng);
      a.gamma4 = mag(rng);
    }
    if (!(dc_attack_increment(snap, conv, att, 0.0) > 0.0)) {
      ++failures;
    }
    for (auto& a : att) {
      a.alpha3 = -a.alpha3;
      a.gamma3 = -a.gamma3;
      a.alpha4 = -a.alpha4;
      a.gamma4 = -a.gamma4;
    }
    if (!(dc_attack_increment(snap, conv, att, 0.0) < 0.0)) {
      ++failures;
    }
  }
  report(5, "DC-link increment sign follows the injection sign (1000 draws)",
         failures == 0, std::to_string(failures) + " failures");
}

// --- criterion 6: rotor speed vs DC voltage relation ---
void criterion_6() {
  ConverterParams conv;
  GeneratorParams gen;
  bool increasing = true;
  double prev = -1e300;
  for (int k = 0; k < 1000; ++k) {
    const double dv = -0.5 * conv.v_dc_ref +
                      static_cast<double>(k) / 999.0 * conv.v_dc_ref;
    const double w = omega_from_vdc(dv, conv, gen);
    if (!(w > prev)) {
      increasing = false;
    }
    prev = w;
  }
  const bool zero_at_ref = omega_from_vdc(0.0, conv, gen) == 0.0;
  report(6, "speed/DC-voltage relation strictly increasing, exact zero at ref",
         increasing && zero_at_ref,
         std::string("increasing=") + (increasing ? "yes" : "no") +
             ", dw(0)=" + fmt(omega_from_vdc(0.0, conv, gen)));
}

// --- criterion 7: angle rate consistency for the three case studies ---
void criterion_7() {
  GeneratorParams gen;
  gen.d = 2.0;
  gen.h = 3.0;
  gen.set_frequency(60.0);
  const double phi = gen.phi;
  const double h = 1e-5;

  struct Case {
    const char* name;
    GovernorAttackCoeffs coeffs;
    double dw0;
  };
  std::vector<Case> cases(3);
  cases[0] = {"nominal", {}, 0.02};
  cases[1].name = "constant bias";
  cases[1].coeffs.gamma2 = 0.01;
  cases[1].dw0 = 0.0;
  cases[2].name = "amplification";
  cases[2].coeffs.alpha1 = -0.4;
  cases[2].dw0 = 0.02;

  bool all_ok = true;
  double worst_rel = 0.0;
  for (const auto& cs : cases) {
    const auto lc = lambda_coefficients(gen, cs.coeffs);
    for (int k = 0; k < 100; ++k) {
      const double t = 0.1 + 9.9 * static_cast<double>(k) / 99.0;
      const double fd =
          (theta_closed_form(lc, 0.0, 0.0, cs.dw0, phi, t + h) -
           theta_closed_form(lc, 0.0, 0.0, cs.dw0, phi, t - h)) /
          (2.0 * h);
      const double rate = phi * delta_omega_closed_form(lc, 0.0, cs.dw0, t);
      const double rel = std::abs(fd - rate) / std::max(1e-30, std::abs(rate));
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-6) {
        all_ok = false;
      }
    }
  }
  report(7, "finite-difference angle rate matches phi * dw (3 cases x 100 pts)",
         all_ok, "worst relative deviation = " + fmt(worst_rel));
}

// --- criterion 8: end-to-end fixture behaviour ---
void criterion_8() {
  const auto out_base = std::filesystem::temp_directory_path() / "sps_accept";
  std::filesystem::remove_all(out_base);

  auto portrait_stats = [](const Scenario& sc, const RunResult& res,
                           double w_lo, double w_hi, bool* any_outside_window,
                           double* inside_frac) {
    const auto pts = phase_portrait(res.series, sc.relays, 0);
    std::size_t inside = 0;
    *any_outside_window = false;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (pts[k].inside) {
        ++inside;
      } else if (res.series.times[k] >= w_lo && res.series.times[k] <= w_hi) {
        *any_outside_window = true;
      }
    }
    *inside_frac =
        static_cast<double>(inside) / static_cast<double>(pts.size());
  };

  {
    const Scenario sc = load("nominal");
    const RunResult res = execute_scenario(sc);
    bool outside = false;
    double frac = 0.0;
    portrait_stats(sc, res, 0.0, 1e30, &outside, &frac);
    report(8, "nominal fixture: zero trips, all portrait samples inside",
           res.trips.empty() && frac == 1.0,
           "trips = " + std::to_string(res.trips.size()) +
               ", inside fraction = " + fmt(frac));
  }
  for (const char* name : {"fault", "governor_attack", "exciter_attack"}) {
    const Scenario sc = load(name);
    const RunResult res = execute_scenario(sc);
    double w_lo = 1e30, w_hi = -1e30;
    for (const auto& a : sc.attacks) {
      w_lo = std::min(w_lo, a.t_start);
      w_hi = std::max(w_hi, std::min(a.t_end, sc.integrator.t_end));
    }
    for (const auto& f : sc.faults) {
      w_lo = std::min(w_lo, f.t_start);
      w_hi = std::max(w_hi, std::min(f.t_end, sc.integrator.t_end));
    }
    bool outside = false;
    double frac = 0.0;
    portrait_stats(sc, res, w_lo, w_hi, &outside, &frac);
    const RunReport rep = run_scenario(sc, out_base / name);
    report(8,
           std::string(name) +
               " fixture: >= 1 trip and portrait samples outside during the event",
           !res.trips.empty() && outside && rep.attack_success,
           "trips = " + std::to_string(res.trips.size()) +
               ", outside-in-window = " + (outside ? "yes" : "no"));
  }
}

// --- criterion 9: determinism of emitted files ---
void criterion_9() {
  const auto base = std::filesystem::temp_directory_path() / "sps_det_accept";
  std::filesystem::remove_all(base);
  bool all_equal = true;
  std::string which;
  for (const char* name :
       {"nominal", "fault", "governor_attack", "exciter_attack", "benchmark"}) {
    const Scenario sc = load(name);
    const RunReport r1 = run_scenario(sc, base / name / "a");
    const RunReport r2 = run_scenario(sc, base / name / "b");
    if (r1.files.size() != r2.files.size()) {
      all_equal = false;
      which = name;
      break;
    }
    for (std::size_t i = 0; i < r1.files.size(); ++i) {
      std::ifstream f1(r1.files[i], std::ios::binary);
      std::ifstream f2(r2.files[i], std::ios::binary);
      std::ostringstream s1, s2;
      s1 << f1.rdbuf();
      s2 << f2.rdbuf();
      if (s1.str() != s2.str()) {
        all_equal = false;
        which = r1.files[i].filename().string();
      }
    }
  }
  report(9, "repeated runs of every fixture emit byte-identical files",
         all_equal, all_equal ? "5 fixtures compared" : "mismatch: " + which);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    g_scenarios = argv[1];
  }
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance suite aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d failure(s)\n", g_failures == 0 ? "ACCEPTED" : "REJECTED",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
