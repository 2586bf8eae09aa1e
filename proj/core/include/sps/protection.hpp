#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sps/timeseries.hpp"

namespace sps {

/// Relay thresholds and estimator settings. Bands are percentages of the
/// nominal value; a violation must persist for `dwell` seconds before a trip.
struct RelayConfig {
  double freq_band_pct = 5.0;        ///< trip band, % of nominal frequency
  double freq_tight_band_pct = 0.5;  ///< alarm band, % of nominal frequency
  double rocof_limit = 0.02;         ///< Hz/s
  double vdc_band_pct = 10.0;        ///< % of the DC-link setpoint
  double dwell = 0.1;                ///< s
  double rocof_window = 0.1;         ///< s of frequency history per estimate

  friend bool operator==(const RelayConfig&, const RelayConfig&) = default;
};

enum class RelayType { OverFreq, UnderFreq, Rocof, OverVdc, UnderVdc };

struct TripEvent {
  RelayType relay = RelayType::OverFreq;
  std::size_t target = 0;  ///< machine index for frequency relays, 0 for the DC bus
  double t_trip = 0.0;
  double value = 0.0;      ///< triggering value (strictly outside the band)
  double threshold = 0.0;  ///< the band edge that was crossed
};

/// Least-squares slope of frequency vs. time over the supplied window.
/// Requires at least two samples; throws InsufficientSamples.
double rocof_estimate(std::span<const double> times,
                      std::span<const double> freq_hz);

/// Trailing-window slope estimate at every sample. Samples recorded before
/// one full window has elapsed carry 0 (the estimator is blind there).
std::vector<double> rocof_series(std::span<const double> times,
                                 std::span<const double> freq_hz,
                                 double window);

/// Scans the frequency (per machine) and DC-voltage columns and emits one
/// trip per (relay, target) at the first instant a violation has persisted
/// for the dwell time. Throws MissingColumn.
std::vector<TripEvent> evaluate_relays(const TimeSeries& series,
                                       const RelayConfig& cfg);

/// Same scan against the tight frequency band. Alarms are reported
/// separately and never count as trips.
std::vector<TripEvent> evaluate_alarms(const TimeSeries& series,
                                       const RelayConfig& cfg);

struct PortraitPoint {
  double rocof = 0.0;     ///< Hz/s
  double dvdc_pct = 0.0;  ///< DC-link deviation, % of setpoint
  bool inside = false;    ///< within the rocof x vdc band rectangle
};

/// ROCOF vs. DC-voltage deviation per recorded sample for one machine,
/// classified against the relay band rectangle. Throws MissingColumn.
std::vector<PortraitPoint> phase_portrait(const TimeSeries& series,
                                          const RelayConfig& cfg,
                                          std::size_t machine = 0);

}  // namespace sps
