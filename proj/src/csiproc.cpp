#include "wallsense/csiproc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "wallsense/error.hpp"

namespace wallsense::csi {

namespace {

double median_in_place(std::vector<double>& v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

// Weights w such that Σ w_j·y(offset_j) is the order-`order` least-squares
// polynomial evaluated at offset 0. Offsets are scaled to [-1, 1] for conditioning.
std::vector<double> sg_weights(std::ptrdiff_t lo, std::ptrdiff_t hi, std::size_t order) {
  const auto len = static_cast<Eigen::Index>(hi - lo + 1);
  const double span = static_cast<double>(std::max<std::ptrdiff_t>({-lo, hi, 1}));
  Eigen::MatrixXd a(len, static_cast<Eigen::Index>(order + 1));
  for (Eigen::Index j = 0; j < len; ++j) {
    const double x = static_cast<double>(lo + j) / span;
    double p = 1.0;
    for (Eigen::Index k = 0; k <= static_cast<Eigen::Index>(order); ++k) {
      a(j, k) = p;
      p *= x;
    }
  }
  // Row 0 of the pseudo-inverse (AᵀA)⁻¹Aᵀ evaluates the fit at x = 0.
  const Eigen::MatrixXd ata = a.transpose() * a;
  const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(ata.rows(), 0);
  const Eigen::VectorXd row = a * ata.colPivHouseholderQr().solve(e0);
  std::vector<double> w(static_cast<std::size_t>(len));
  for (Eigen::Index j = 0; j < len; ++j) w[static_cast<std::size_t>(j)] = row(j);
  return w;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
}

}  // namespace

std::vector<double> CsiTrace::subcarrier(std::size_t index) const {
  if (index >= subcarrier_count) throw ValidationError("subcarrier", "index out of range");
  std::vector<double> out(samples());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = amplitude[i * subcarrier_count + index];
  return out;
}

void CsiTrace::validate() const {
  if (!(sample_rate_hz > 0.0)) throw ValidationError("sample_rate_hz", "must be > 0");
  if (subcarrier_count == 0) throw ValidationError("subcarrier_count", "no subcarrier columns");
  if (amplitude.size() != samples() * subcarrier_count) {
    throw ValidationError("amplitude", "amplitude array is not rectangular");
  }
  for (std::size_t i = 1; i < timestamps_s.size(); ++i) {
    if (!(timestamps_s[i] > timestamps_s[i - 1])) {
      throw ValidationError("timestamps_s", "timestamps must be strictly increasing (sample " +
                                                std::to_string(i) + ")");
    }
  }
  for (double a : amplitude) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ValidationError("amplitude", "amplitudes must be finite and >= 0");
    }
  }
  if (!truth_bpm.empty() && truth_bpm.size() != samples()) {
    throw ValidationError("truth_bpm", "reference column length mismatch");
  }
}

CsiTrace read_trace_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty trace file", 1);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      header.push_back(cell);
    }
  }
  if (header.empty() || header[0] != "time_s") throw ParseError("first column must be time_s", 1);

  CsiTrace trace;
  const std::size_t truth_col = find_column(header, "truth_bpm");
  const bool has_truth = truth_col < header.size();
  if (has_truth && truth_col != header.size() - 1) {
    throw ParseError("truth_bpm must be the last column", 1);
  }
  trace.subcarrier_count = header.size() - 1 - (has_truth ? 1 : 0);
  for (std::size_t k = 0; k < trace.subcarrier_count; ++k) {
    if (header[k + 1] != "sc_" + std::to_string(k)) {
      throw ParseError("expected column sc_" + std::to_string(k) + ", found " + header[k + 1], 1);
    }
  }
  if (trace.subcarrier_count == 0) throw ParseError("no subcarrier columns", 1);

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double v = 0.0;
      while (p < end && *p == ' ') ++p;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc{}) throw ParseError("invalid number in column " + std::to_string(col), line_no);
      if (col == 0) {
        trace.timestamps_s.push_back(v);
      } else if (col <= trace.subcarrier_count) {
        trace.amplitude.push_back(v);
      } else if (has_truth && col == truth_col) {
        trace.truth_bpm.push_back(v);
      } else {
        throw ParseError("too many columns", line_no);
      }
      ++col;
      p = res.ptr;
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      if (*p != ',') throw ParseError("expected ','", line_no);
      ++p;
    }
    if (col != header.size()) throw ParseError("expected " + std::to_string(header.size()) + " columns", line_no);
  }
  if (trace.samples() < 2) throw ParseError("trace needs at least two samples", line_no);
  const double span = trace.timestamps_s.back() - trace.timestamps_s.front();
  trace.sample_rate_hz = span > 0.0 ? static_cast<double>(trace.samples() - 1) / span : 0.0;
  trace.validate();
  return trace;
}

std::vector<double> hampel_filter(std::span<const double> series, std::size_t half_window,
                                  double n_sigma) {
  if (half_window < 1) throw std::invalid_argument("hampel_filter: half_window must be >= 1");
  if (!(n_sigma > 0.0)) throw std::invalid_argument("hampel_filter: n_sigma must be > 0");
  constexpr double kMadToSigma = 1.4826;
  const std::size_t n = series.size();
  std::vector<double> out(series.begin(), series.end());
  std::vector<double> buf;
  buf.reserve(2 * half_window + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half_window ? i - half_window : 0;
    const std::size_t hi = std::min(n - 1, i + half_window);
    buf.assign(series.begin() + static_cast<std::ptrdiff_t>(lo),
               series.begin() + static_cast<std::ptrdiff_t>(hi + 1));
    const double med = median_in_place(buf);
    for (double& v : buf) v = std::abs(v - med);
    const double mad = median_in_place(buf);
    if (std::abs(series[i] - med) > n_sigma * kMadToSigma * mad) out[i] = med;
  }
  return out;
}

std::vector<double> savitzky_golay(std::span<const double> series, std::size_t window,
                                   std::size_t polyorder) {
  if (window % 2 == 0) throw std::invalid_argument("savitzky_golay: window must be odd");
  if (polyorder >= window) throw std::invalid_argument("savitzky_golay: polyorder must be < window");
  const std::size_t n = series.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const auto sn = static_cast<std::ptrdiff_t>(n);

  std::vector<double> interior;
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-half, -i);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(half, sn - 1 - i);
    const bool full = lo == -half && hi == half;
    const std::size_t order = std::min<std::size_t>(polyorder, static_cast<std::size_t>(hi - lo));
    std::vector<double> edge;
    if (full && interior.empty()) interior = sg_weights(-half, half, polyorder);
    if (!full) edge = sg_weights(lo, hi, order);
    const std::vector<double>& w = full ? interior : edge;
    double acc = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) acc += w[static_cast<std::size_t>(j - lo)] * series[static_cast<std::size_t>(i + j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

double peak_prominence(std::span<const double> series, std::size_t peak) {
  const double h = series[peak];
  double left_min = h;
  for (std::size_t j = peak; j-- > 0;) {
    if (series[j] > h) break;
    left_min = std::min(left_min, series[j]);
  }
  double right_min = h;
  for (std::size_t j = peak + 1; j < series.size(); ++j) {
    if (series[j] > h) break;
    right_min = std::min(right_min, series[j]);
  }
  return h - std::max(left_min, right_min);
}

std::vector<std::size_t> detect_peaks(std::span<const double> series, std::size_t min_distance,
                                      double min_prominence) {
  if (min_distance < 1) throw std::invalid_argument("detect_peaks: min_distance must be >= 1");
  std::vector<std::size_t> candidates;
  const std::size_t n = series.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (series[i] > series[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && series[j + 1] == series[i]) ++j;
      if (j + 1 < n && series[j + 1] < series[i]) {
        candidates.push_back(i + (j - i) / 2);
      }
      i = j + 1;
    } else {
      ++i;
    }
  }

  std::vector<std::size_t> prominent;
  for (std::size_t p : candidates) {
    if (peak_prominence(series, p) >= min_prominence) prominent.push_back(p);
  }

  std::vector<std::size_t> order = prominent;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return series[a] > series[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t p : order) {
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](std::size_t q) {
      return (p > q ? p - q : q - p) < min_distance;
    });
    if (clear) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<double> filter_amplitude(std::span<const double> series, const FilterConfig& config) {
  const auto hampel = hampel_filter(series, config.hampel_half_window, config.hampel_n_sigma);
  std::size_t window = std::min(config.sg_window, series.size() - (series.size() % 2 == 0 ? 1 : 0));
  if (window % 2 == 0) --window;
  const std::size_t order = std::min(config.sg_polyorder, window - 1);
  return savitzky_golay(hampel, window, order);
}

std::size_t select_subcarrier(const CsiTrace& trace) {
  std::size_t best = 0;
  double best_var = -1.0;
  for (std::size_t k = 0; k < trace.subcarrier_count; ++k) {
    const double v = variance(trace.subcarrier(k));
    if (v > best_var) {
      best_var = v;
      best = k;
    }
  }
  return best;
}

RespirationEstimate respiration_rate(const CsiTrace& trace, std::optional<std::size_t> subcarrier,
                                     double window_s, const FilterConfig& config,
                                     std::optional<double> start_s) {
  trace.validate();
  if (!(window_s > 0.0)) throw ValidationError("window_s", "must be > 0");
  const double t0 = start_s.value_or(trace.timestamps_s.front());
  const auto first = static_cast<std::size_t>(
      std::lower_bound(trace.timestamps_s.begin(), trace.timestamps_s.end(), t0) -
      trace.timestamps_s.begin());
  const auto last = static_cast<std::size_t>(
      std::lower_bound(trace.timestamps_s.begin(), trace.timestamps_s.end(), t0 + window_s) -
      trace.timestamps_s.begin());
  if (last <= first + 2) throw ValidationError("window_s", "window holds fewer than three samples");

  CsiTrace segment;
  segment.sample_rate_hz = trace.sample_rate_hz;
  segment.subcarrier_count = trace.subcarrier_count;
  segment.timestamps_s.assign(trace.timestamps_s.begin() + static_cast<std::ptrdiff_t>(first),
                              trace.timestamps_s.begin() + static_cast<std::ptrdiff_t>(last));
  segment.amplitude.assign(
      trace.amplitude.begin() + static_cast<std::ptrdiff_t>(first * trace.subcarrier_count),
      trace.amplitude.begin() + static_cast<std::ptrdiff_t>(last * trace.subcarrier_count));

  RespirationEstimate est;
  est.window_s = window_s;
  est.window_start_sample = first;
  est.subcarrier = subcarrier.value_or(select_subcarrier(segment));
  const auto raw = segment.subcarrier(est.subcarrier);
  const auto filtered = filter_amplitude(raw, config);

  const double spread = std::sqrt(variance(filtered));
  const double prominence = config.prominence_factor * spread;
  const auto distance = static_cast<std::size_t>(
      std::max(1.0, std::round(config.peak_min_distance_s * trace.sample_rate_hz)));
  // Spread at rounding level means a flat series with nothing to count.
  const bool flat = spread <= 1e-9 * std::abs(mean(filtered));
  if (!flat && prominence > 0.0) est.peak_indices = detect_peaks(filtered, distance, prominence);
  if (est.peak_indices.size() >= 2) {
    const double span = segment.timestamps_s[est.peak_indices.back()] -
                        segment.timestamps_s[est.peak_indices.front()];
    est.rate_bpm = 60.0 * static_cast<double>(est.peak_indices.size() - 1) / span;
  }
  return est;
}

EmpiricalSsnr empirical_ssnr(std::span<const double> amplitude, double sample_rate_hz,
                             double window_s, const FilterConfig& config) {
  if (!(sample_rate_hz > 0.0)) throw ValidationError("sample_rate_hz", "must be > 0");
  if (!(window_s > 0.0)) throw ValidationError("window_s", "must be > 0");
  const std::size_t n = amplitude.size();
  const double span_s = n > 0 ? static_cast<double>(n - 1) / sample_rate_hz : 0.0;
  if (n < 3 || span_s + 0.5 / sample_rate_hz < window_s) {
    throw ValidationError("window_s", "trace is shorter than the observation window");
  }
  const auto filtered = filter_amplitude(amplitude, config);

  // Centered moving average via prefix sums, truncated at the ends.
  const auto half = static_cast<std::size_t>(std::round(window_s * sample_rate_hz / 2.0));
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + amplitude[i];

  EmpiricalSsnr out;
  double dyn = 0.0;
  double inter = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    const double avg = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    dyn += (amplitude[i] - avg) * (amplitude[i] - avg);
    inter += (amplitude[i] - filtered[i]) * (amplitude[i] - filtered[i]);
  }
  out.dynamic_power = dyn / static_cast<double>(n);
  out.interference_power = inter / static_cast<double>(n);
  const double cap = std::pow(10.0, config.saturation_db / 10.0);
  if (out.interference_power == 0.0 || out.dynamic_power > cap * out.interference_power) {
    out.saturated = true;
    return out;
  }
  out.ratio = out.dynamic_power / out.interference_power;
  out.db = out.ratio > 0.0 ? 10.0 * std::log10(*out.ratio) : -INFINITY;
  return out;
}

EmpiricalSsnr empirical_ssnr(const CsiTrace& trace, std::optional<std::size_t> subcarrier,
                             double window_s, const FilterConfig& config) {
  trace.validate();
  const std::size_t k = subcarrier.value_or(select_subcarrier(trace));
  return empirical_ssnr(trace.subcarrier(k), trace.sample_rate_hz, window_s, config);
}

ScaleFit fit_model_scale(std::span<const double> measured, std::span<const double> simulated) {
  if (measured.size() != simulated.size()) {
    throw ValidationError("simulated", "measured and simulated lists differ in length");
  }
  if (measured.size() < 2) throw ValidationError("measured", "at least two points are required");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    if (!std::isfinite(measured[i])) throw ValidationError("measured", "non-finite value");
    if (!(simulated[i] > 0.0) || !std::isfinite(simulated[i])) {
      throw ValidationError("simulated", "simulated SSNR values must be finite and > 0");
    }
    num += measured[i] * simulated[i];
    den += simulated[i] * simulated[i];
  }
  ScaleFit fit;
  fit.scale = num / den;
  double ss = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const double r = measured[i] - fit.scale * simulated[i];
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(measured.size()));
  return fit;
}

double mean_absolute_error(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size() || estimate.empty()) {
    throw ValidationError("truth_bpm", "estimate and reference lengths differ or are empty");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) s += std::abs(estimate[i] - truth[i]);
  return s / static_cast<double>(estimate.size());
}

}  // namespace wallsense::csi
