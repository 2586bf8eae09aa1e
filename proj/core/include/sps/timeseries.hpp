#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sps/model.hpp"

namespace sps {

/// Sampled trajectories: a strictly increasing time base plus named columns
/// of equal length. Column order is insertion order and is preserved when
/// emitting, so identical runs serialize identically.
struct TimeSeries {
  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> columns;

  // Plant context needed by downstream relay evaluation.
  std::size_t n_machines = 0;
  double f_nominal = 60.0;
  double v_dc_ref = 1.0;
  DcUnits dc_units = DcUnits::PerUnit;

  std::size_t size() const { return times.size(); }

  void add_column(std::string name, std::vector<double> values);
  bool has_column(std::string_view name) const;

  /// Throws MissingColumn when absent.
  const std::vector<double>& column(std::string_view name) const;
};

}  // namespace sps
