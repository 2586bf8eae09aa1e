#include "sps/model.hpp"

#include <cmath>
#include <sstream>

#include "sps/errors.hpp"

namespace sps {

namespace {

void check_positive(std::vector<std::string>& out, double value,
                    const std::string& what) {
  if (!(value > 0.0)) {
    std::ostringstream os;
    os << what << " must be > 0 (got " << value << ")";
    out.push_back(os.str());
  }
}

}  // namespace

ValidationReport validate_model(const Model& model) {
  ValidationReport report;
  auto& v = report.violations;

  if (model.generators.empty()) {
    v.push_back("model has no generators");
  }

  for (std::size_t i = 0; i < model.generators.size(); ++i) {
    const auto& g = model.generators[i];
    const std::string tag = "generator " + std::to_string(i + 1) + ": ";
    check_positive(v, g.h, tag + "H > 0");
    check_positive(v, g.d, tag + "D > 0");
    check_positive(v, g.t_m, tag + "T_m > 0");
    check_positive(v, g.t_v, tag + "T_v > 0");
    if (g.f_nominal != 50.0 && g.f_nominal != 60.0) {
      v.push_back(tag + "f_nominal must be 50 or 60 Hz");
    }
    if (g.phi != 2.0 * std::numbers::pi * g.f_nominal) {
      v.push_back(tag + "phi must equal 2*pi*f_nominal exactly");
    }
  }

  const auto& net = model.network;
  const auto n = static_cast<Eigen::Index>(net.n);
  if (net.n != model.generators.size()) {
    v.push_back("network size does not match generator count");
  }
  if (net.g.rows() != n || net.g.cols() != n) {
    v.push_back("G must be N x N");
  }
  if (net.b.rows() != n || net.b.cols() != n) {
    v.push_back("B must be N x N");
  }
  if (net.v_mag.size() != n) {
    v.push_back("V_mag must have one entry per machine");
  }
  if (net.g.rows() == n && net.g.cols() == n && net.b.rows() == n &&
      net.b.cols() == n) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = i + 1; k < n; ++k) {
        if (net.g(i, k) != net.g(k, i)) {
          v.push_back("G symmetry violated at (" + std::to_string(i + 1) + "," +
                      std::to_string(k + 1) + ")");
        }
        if (net.b(i, k) != net.b(k, i)) {
          v.push_back("B symmetry violated at (" + std::to_string(i + 1) + "," +
                      std::to_string(k + 1) + ")");
        }
      }
    }
  }
  for (Eigen::Index i = 0; i < net.v_mag.size(); ++i) {
    if (!(net.v_mag(i) > 0.0)) {
      v.push_back("V_mag[" + std::to_string(i + 1) + "] must be > 0");
    }
  }

  const auto& c = model.converter;
  check_positive(v, c.l_s, "converter L_s > 0");
  check_positive(v, c.l_f, "converter L_f > 0");
  check_positive(v, c.c_s, "converter C_s > 0");
  check_positive(v, c.c_dc, "converter C_DC > 0");
  check_positive(v, c.s_c, "converter S_c > 0");
  check_positive(v, c.v_dc_ref, "converter V_DC_ref > 0");

  return report;
}

std::vector<double> electrical_power(std::span<const double> theta,
                                     const NetworkModel& net) {
  if (theta.size() != net.n) {
    throw DimensionMismatch("electrical_power: theta has " +
                            std::to_string(theta.size()) + " entries, network has " +
                            std::to_string(net.n));
  }
  std::vector<double> pe(net.n, 0.0);
  for (std::size_t i = 0; i < net.n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < net.n; ++k) {
      const double dth = theta[i] - theta[k];
      acc += net.v_mag(static_cast<Eigen::Index>(i)) *
             net.v_mag(static_cast<Eigen::Index>(k)) *
             (net.g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
                  std::cos(dth) +
              net.b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
                  std::sin(dth));
    }
    pe[i] = acc;
  }
  return pe;
}

DerivedInputs derived_inputs(const MachineState& ms, const GeneratorParams& gen,
                             double meas_delta_omega, double meas_v_b) {
  DerivedInputs out;
  // Governor error is the speed deviation with the sign of (omega_s - omega).
  out.p_f = gen.kp_gov * (-meas_delta_omega) + gen.ki_gov * ms.x_gov;
  out.e_f = gen.kp_exc * (gen.v_b_ref - meas_v_b) + gen.ki_exc * ms.x_exc;
  out.v_sd = ms.v_int;
  out.v_sq = 0.0;
  return out;
}

}  // namespace sps
