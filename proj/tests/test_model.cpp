#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "sps/errors.hpp"
#include "sps/model.hpp"

using namespace sps;

namespace {

bool mentions(const ValidationReport& r, const std::string& needle) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const std::string& v) {
                       return v.find(needle) != std::string::npos;
                     });
}

}  // namespace

TEST_CASE("validate_model accepts the default two-machine plant") {
  const auto report = validate_model(test::default_model());
  CHECK(report.ok());
}

TEST_CASE("validate_model flags a zero inertia constant") {
  Model m = test::default_model();
  m.generators[0].h = 0.0;
  const auto report = validate_model(m);
  CHECK_FALSE(report.ok());
  CHECK(mentions(report, "H > 0"));
}

TEST_CASE("validate_model flags an asymmetric conductance matrix") {
  Model m = test::default_model();
  m.network.g(0, 1) = 0.7;  // g(1,0) stays 0.8
  const auto report = validate_model(m);
  CHECK(mentions(report, "G symmetry"));
}

TEST_CASE("validate_model reports every violation, not just the first") {
  Model m = test::default_model();
  m.generators[0].h = 0.0;
  m.generators[1].d = -1.0;
  m.network.b(0, 1) = 99.0;
  const auto report = validate_model(m);
  CHECK(report.violations.size() >= 3);
}

TEST_CASE("validate_model flags phi inconsistent with f_nominal") {
  Model m = test::default_model();
  m.generators[0].phi = 377.0;  // not exactly 2*pi*60
  CHECK(mentions(validate_model(m), "phi"));
}

TEST_CASE("electrical_power: single machine with pure self-susceptance") {
  NetworkModel net;
  net.n = 1;
  net.g = Eigen::MatrixXd::Zero(1, 1);
  net.b = Eigen::MatrixXd::Constant(1, 1, 3.0);
  net.v_mag = Eigen::VectorXd::Ones(1);
  const auto pe = electrical_power(std::vector<double>{0.4}, net);
  CHECK(pe[0] == 0.0);  // self angle difference is zero
}

TEST_CASE("electrical_power: zero-angle pair sums the conductance row") {
  NetworkModel net;
  net.n = 2;
  net.g.resize(2, 2);
  net.g << 0.1, 0.5, 0.5, 0.1;
  net.b.resize(2, 2);
  net.b << -2.0, 2.0, 2.0, -2.0;
  net.v_mag = Eigen::VectorXd::Ones(2);
  const auto pe = electrical_power(std::vector<double>{0.0, 0.0}, net);
  CHECK(pe[0] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("electrical_power: quadrature angle picks out the susceptance") {
  NetworkModel net;
  net.n = 2;
  net.g = Eigen::MatrixXd::Zero(2, 2);
  net.b.resize(2, 2);
  net.b << 0.0, 5.0, 5.0, 0.0;
  net.v_mag = Eigen::VectorXd::Ones(2);
  const auto pe =
      electrical_power(std::vector<double>{std::numbers::pi / 2.0, 0.0}, net);
  CHECK(pe[0] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("electrical_power rejects a theta/network size mismatch") {
  const Model m = test::default_model();
  CHECK_THROWS_AS(electrical_power(std::vector<double>{0.0}, m.network),
                  DimensionMismatch);
}

TEST_CASE("electrical_power is invariant under a uniform angle shift") {
  const Model m = test::default_model();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ang(-1.5, 1.5);
  for (int rep = 0; rep < 200; ++rep) {
    const std::vector<double> th{ang(rng), ang(rng)};
    const double c = ang(rng);
    const std::vector<double> shifted{th[0] + c, th[1] + c};
    const auto a = electrical_power(th, m.network);
    const auto b = electrical_power(shifted, m.network);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("lossless symmetric pair transfers power antisymmetrically") {
  NetworkModel net;
  net.n = 2;
  net.g = Eigen::MatrixXd::Zero(2, 2);
  net.b.resize(2, 2);
  net.b << -4.0, 4.0, 4.0, -4.0;
  net.v_mag = Eigen::VectorXd::Ones(2);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ang(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto pe = electrical_power(std::vector<double>{ang(rng), ang(rng)}, net);
    CHECK(std::abs(pe[0] + pe[1]) <= 1e-12);
  }
}

TEST_CASE("derived_inputs: zero speed error and empty integrator give no fuel") {
  GeneratorParams gen;
  MachineState ms;
  ms.x_gov = 0.0;
  const auto di = derived_inputs(ms, gen, /*meas_delta_omega=*/0.0,
                                 /*meas_v_b=*/gen.v_b_ref);
  CHECK(di.p_f == 0.0);
}

TEST_CASE("derived_inputs: field voltage from the integral term alone") {
  GeneratorParams gen;
  gen.kp_exc = 2.0;
  gen.ki_exc = 5.0;
  gen.v_b_ref = 1.0;
  MachineState ms;
  ms.x_exc = 0.2;
  const auto di = derived_inputs(ms, gen, 0.0, 1.0);
  CHECK(di.e_f == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("derived_inputs: proportional plus integral fuel index") {
  GeneratorParams gen;
  gen.kp_gov = 2.0;
  gen.ki_gov = 10.0;
  MachineState ms;
  ms.x_gov = 0.005;
  // speed error omega_s - omega = 0.01 means delta_omega = -0.01
  const auto di = derived_inputs(ms, gen, -0.01, gen.v_b_ref);
  CHECK(di.p_f == doctest::Approx(0.07).epsilon(1e-12));
}

TEST_CASE("derived_inputs aligns the source voltage with the internal voltage") {
  GeneratorParams gen;
  MachineState ms;
  ms.v_int = 1.03;
  const auto di = derived_inputs(ms, gen, 0.0, 1.0);
  CHECK(di.v_sd == 1.03);
  CHECK(di.v_sq == 0.0);
}
