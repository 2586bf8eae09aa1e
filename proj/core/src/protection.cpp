#include "sps/protection.hpp"

#include <cmath>
#include <string>

#include "sps/errors.hpp"

namespace sps {

namespace {

const std::vector<double>& vdc_column(const TimeSeries& series) {
  const char* name = series.dc_units == DcUnits::PerUnit ? "v_dc_pu" : "v_dc_V";
  return series.column(name);
}

std::string freq_column_name(std::size_t machine) {
  return "freq_" + std::to_string(machine + 1) + "_hz";
}

// First trip of one band relay pair over a signal; a violation must hold for
// `dwell` consecutive seconds. At most one event per relay.
void scan_band(const std::vector<double>& times, const std::vector<double>& values,
               double lo, double hi, double dwell, RelayType relay_lo,
               RelayType relay_hi, std::size_t target,
               std::vector<TripEvent>& out) {
  bool tripped_lo = false, tripped_hi = false;
  double run_start_lo = -1.0, run_start_hi = -1.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double v = values[k];
    if (!tripped_hi) {
      if (v > hi) {
        if (run_start_hi < 0.0) {
          run_start_hi = times[k];
        }
        if (times[k] - run_start_hi >= dwell) {
          out.push_back({relay_hi, target, times[k], v, hi});
          tripped_hi = true;
        }
      } else {
        run_start_hi = -1.0;
      }
    }
    if (!tripped_lo) {
      if (v < lo) {
        if (run_start_lo < 0.0) {
          run_start_lo = times[k];
        }
        if (times[k] - run_start_lo >= dwell) {
          out.push_back({relay_lo, target, times[k], v, lo});
          tripped_lo = true;
        }
      } else {
        run_start_lo = -1.0;
      }
    }
    if (tripped_lo && tripped_hi) {
      break;
    }
  }
}

void scan_frequency_band(const TimeSeries& series, double band_pct, double dwell,
                         std::vector<TripEvent>& out) {
  for (std::size_t m = 0; m < series.n_machines; ++m) {
    const auto& f = series.column(freq_column_name(m));
    const double lo = series.f_nominal * (1.0 - band_pct / 100.0);
    const double hi = series.f_nominal * (1.0 + band_pct / 100.0);
    scan_band(series.times, f, lo, hi, dwell, RelayType::UnderFreq,
              RelayType::OverFreq, m, out);
  }
}

}  // namespace

double rocof_estimate(std::span<const double> times,
                      std::span<const double> freq_hz) {
  if (times.size() != freq_hz.size()) {
    throw DimensionMismatch("rocof_estimate: times/frequency size mismatch");
  }
  const std::size_t n = times.size();
  if (n < 2) {
    throw InsufficientSamples("rocof_estimate needs at least two samples");
  }
  double t_mean = 0.0, f_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t_mean += times[i];
    f_mean += freq_hz[i];
  }
  t_mean /= static_cast<double>(n);
  f_mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = times[i] - t_mean;
    num += dt * (freq_hz[i] - f_mean);
    den += dt * dt;
  }
  if (den == 0.0) {
    throw InsufficientSamples("rocof_estimate needs a nonzero time span");
  }
  return num / den;
}

std::vector<double> rocof_series(std::span<const double> times,
                                 std::span<const double> freq_hz,
                                 double window) {
  if (times.size() != freq_hz.size()) {
    throw DimensionMismatch("rocof_series: times/frequency size mismatch");
  }
  if (!(window > 0.0)) {
    throw Error("rocof_series requires window > 0");
  }
  const std::size_t n = times.size();
  std::vector<double> out(n, 0.0);
  std::size_t lo = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (times[i] - times.front() < window) {
      continue;  // the estimator is blind until one full window has elapsed
    }
    while (lo < i && times[lo] < times[i] - window) {
      ++lo;
    }
    std::size_t first = lo;
    if (first == i) {
      first = i - 1;  // coarse sampling: fall back to the previous sample
    }
    out[i] = rocof_estimate(times.subspan(first, i - first + 1),
                            freq_hz.subspan(first, i - first + 1));
  }
  return out;
}

std::vector<TripEvent> evaluate_relays(const TimeSeries& series,
                                       const RelayConfig& cfg) {
  std::vector<TripEvent> out;

  scan_frequency_band(series, cfg.freq_band_pct, cfg.dwell, out);

  for (std::size_t m = 0; m < series.n_machines; ++m) {
    const auto& f = series.column(freq_column_name(m));
    const auto rocof = rocof_series(series.times, f, cfg.rocof_window);
    // Symmetric limit: one Rocof relay covers both signs.
    bool tripped = false;
    double run_start = -1.0;
    for (std::size_t k = 0; k < series.times.size() && !tripped; ++k) {
      if (std::abs(rocof[k]) > cfg.rocof_limit) {
        if (run_start < 0.0) {
          run_start = series.times[k];
        }
        if (series.times[k] - run_start >= cfg.dwell) {
          out.push_back({RelayType::Rocof, m, series.times[k], rocof[k],
                         cfg.rocof_limit});
          tripped = true;
        }
      } else {
        run_start = -1.0;
      }
    }
  }

  const auto& vdc = vdc_column(series);
  const double lo = series.v_dc_ref * (1.0 - cfg.vdc_band_pct / 100.0);
  const double hi = series.v_dc_ref * (1.0 + cfg.vdc_band_pct / 100.0);
  scan_band(series.times, vdc, lo, hi, cfg.dwell, RelayType::UnderVdc,
            RelayType::OverVdc, 0, out);

  return out;
}

std::vector<TripEvent> evaluate_alarms(const TimeSeries& series,
                                       const RelayConfig& cfg) {
  std::vector<TripEvent> out;
  scan_frequency_band(series, cfg.freq_tight_band_pct, cfg.dwell, out);
  return out;
}

std::vector<PortraitPoint> phase_portrait(const TimeSeries& series,
                                          const RelayConfig& cfg,
                                          std::size_t machine) {
  const auto& f = series.column(freq_column_name(machine));
  const auto& vdc = vdc_column(series);
  const auto rocof = rocof_series(series.times, f, cfg.rocof_window);

  std::vector<PortraitPoint> pts;
  pts.reserve(series.times.size());
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    PortraitPoint p;
    p.rocof = rocof[k];
    p.dvdc_pct = (vdc[k] - series.v_dc_ref) / series.v_dc_ref * 100.0;
    p.inside = std::abs(p.rocof) <= cfg.rocof_limit &&
               std::abs(p.dvdc_pct) <= cfg.vdc_band_pct;
    pts.push_back(p);
  }
  return pts;
}

}  // namespace sps
