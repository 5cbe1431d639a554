#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace wallsense::csi {

/// Amplitude samples of a CSI capture, row-major (sample, subcarrier).
struct CsiTrace {
  double sample_rate_hz = 0.0;
  std::vector<double> timestamps_s;
  std::size_t subcarrier_count = 0;
  std::vector<double> amplitude;
  /// Optional reference respiration rate per sample (empty when absent).
  std::vector<double> truth_bpm;

  std::size_t samples() const { return timestamps_s.size(); }
  std::vector<double> subcarrier(std::size_t index) const;
  /// Throws ValidationError on non-monotone time, ragged or negative amplitudes.
  void validate() const;
};

/// CSV with header `time_s,sc_0,...,sc_{N-1}[,truth_bpm]`. The sample rate is
/// inferred from the timestamps. Throws ParseError with the offending line.
CsiTrace read_trace_csv(std::istream& in);

/// Replaces samples further than n_sigma·1.4826·MAD from their window median by
/// that median. Windows are truncated at the ends.
std::vector<double> hampel_filter(std::span<const double> series, std::size_t half_window,
                                  double n_sigma);

/// Least-squares polynomial smoothing over a centered odd window. Near the ends
/// the window is truncated and the fit redone (order capped by the samples
/// available).
std::vector<double> savitzky_golay(std::span<const double> series, std::size_t window,
                                   std::size_t polyorder);

/// Strict local maxima (plateaus resolved to their middle sample) whose
/// topographic prominence reaches `min_prominence`, then thinned tallest-first so
/// that no two kept peaks are closer than `min_distance` samples. Sorted by index.
std::vector<std::size_t> detect_peaks(std::span<const double> series, std::size_t min_distance,
                                      double min_prominence);

/// Prominence of the sample at `peak` (assumed to be a local maximum).
double peak_prominence(std::span<const double> series, std::size_t peak);

struct FilterConfig {
  std::size_t hampel_half_window = 50;
  double hampel_n_sigma = 3.0;
  std::size_t sg_window = 501;
  std::size_t sg_polyorder = 3;
  double peak_min_distance_s = 1.2;
  /// Minimum prominence as a multiple of the filtered window's standard deviation.
  double prominence_factor = 0.3;
  /// Ratios above this are reported as saturated.
  double saturation_db = 60.0;
};

/// hampel_filter followed by savitzky_golay, with windows clipped to the series length.
std::vector<double> filter_amplitude(std::span<const double> series, const FilterConfig& config);

struct RespirationEstimate {
  std::optional<double> rate_bpm;  ///< empty when fewer than two peaks were found
  std::vector<std::size_t> peak_indices;  ///< relative to window_start_sample
  std::size_t window_start_sample = 0;
  double window_s = 0.0;
  std::size_t subcarrier = 0;
};

/// Subcarrier with the largest amplitude variance.
std::size_t select_subcarrier(const CsiTrace& trace);

/// Estimates breaths per minute over [start_s, start_s + window_s) of the trace.
/// `subcarrier` defaults to select_subcarrier over that window.
RespirationEstimate respiration_rate(const CsiTrace& trace, std::optional<std::size_t> subcarrier,
                                     double window_s, const FilterConfig& config = {},
                                     std::optional<double> start_s = std::nullopt);

struct EmpiricalSsnr {
  double dynamic_power = 0.0;
  double interference_power = 0.0;
  bool saturated = false;
  std::optional<double> ratio;  ///< empty when saturated
  std::optional<double> db;
};

/// Dynamic power: mean squared deviation of the amplitude from its
/// centered moving average over `window_s`. Interference power: mean squared
/// difference between raw and filtered amplitude.
EmpiricalSsnr empirical_ssnr(std::span<const double> amplitude, double sample_rate_hz,
                             double window_s, const FilterConfig& config = {});
EmpiricalSsnr empirical_ssnr(const CsiTrace& trace, std::optional<std::size_t> subcarrier,
                             double window_s, const FilterConfig& config = {});

struct ScaleFit {
  double scale = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares s minimising Σ(measured − s·simulated)².
ScaleFit fit_model_scale(std::span<const double> measured, std::span<const double> simulated);

double mean_absolute_error(std::span<const double> estimate, std::span<const double> truth);

}  // namespace wallsense::csi
