#include "sps/timeseries.hpp"

#include <string>

#include "sps/errors.hpp"

namespace sps {

void TimeSeries::add_column(std::string name, std::vector<double> values) {
  columns.emplace_back(std::move(name), std::move(values));
}

bool TimeSeries::has_column(std::string_view name) const {
  for (const auto& [n, _] : columns) {
    if (n == name) {
      return true;
    }
  }
  return false;
}

const std::vector<double>& TimeSeries::column(std::string_view name) const {
  for (const auto& [n, values] : columns) {
    if (n == name) {
      return values;
    }
  }
  throw MissingColumn("time series has no column '" + std::string(name) + "'");
}

}  // namespace sps
