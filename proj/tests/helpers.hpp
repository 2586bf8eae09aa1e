#pragma once

#include <vector>

#include "sps/model.hpp"

namespace sps::test {

/// Desk-scale two-machine plant used across the test suites.
inline Model default_model() {
  Model m;
  GeneratorParams g;
  g.set_frequency(60.0);
  g.h = 3.0;
  g.d = 2.0;
  g.omega_s = 1.0;
  g.kp_gov = 5.0;
  g.ki_gov = 10.0;
  g.kp_exc = 0.5;
  g.ki_exc = 2.0;
  g.v_b_ref = 1.0;
  g.t_m = 0.5;
  g.t_v = 0.3;
  for (std::size_t i = 0; i < 2; ++i) {
    g.index = i;
    m.generators.push_back(g);
  }
  m.network.n = 2;
  m.network.g.resize(2, 2);
  m.network.g << 0.2, 0.8, 0.8, 0.2;
  m.network.b.resize(2, 2);
  m.network.b << -4.0, 4.0, 4.0, -4.0;
  m.network.v_mag = Eigen::VectorXd::Ones(2);
  m.converter = ConverterParams{};
  m.dc_units = DcUnits::PerUnit;
  return m;
}

/// Single machine with zero governor gains and an empty network: the swing
/// reduces to the linear attacked mode exactly when pe_mode is frozen.
inline Model benchmark_model() {
  Model m;
  GeneratorParams g;
  g.set_frequency(60.0);
  g.h = 3.0;
  g.d = 2.0;
  g.omega_s = 1.0;
  g.kp_gov = 0.0;
  g.ki_gov = 0.0;
  g.kp_exc = 0.5;
  g.ki_exc = 2.0;
  g.v_b_ref = 1.0;
  g.t_m = 0.5;
  g.t_v = 0.3;
  m.generators.push_back(g);
  m.network.n = 1;
  m.network.g = Eigen::MatrixXd::Zero(1, 1);
  m.network.b = Eigen::MatrixXd::Zero(1, 1);
  m.network.v_mag = Eigen::VectorXd::Ones(1);
  m.converter = ConverterParams{};
  m.dc_units = DcUnits::PerUnit;
  return m;
}

}  // namespace sps::test
