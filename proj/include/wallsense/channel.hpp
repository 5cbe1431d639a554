#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "wallsense/geometry.hpp"

namespace wallsense {

inline constexpr double kPi = 3.14159265358979323846;

/// Physical constants of the link and target. Derived quantities are computed on
/// demand so they can never drift from the primaries.
struct RfParameters {
  double ptx_w = 1.0;           ///< transmit power P_T
  double gain_tx = 1.0;         ///< G_T
  double gain_rx = 1.0;         ///< G_R
  double wavelength_m = 0.06;   ///< 5 GHz band
  double rcs_m2 = 1.0;          ///< target radar cross section
  double wall_reflection = 0.3; ///< amplitude reflection coefficient, [0, 1]
  double gamma = 1e-3;          ///< interference proportional to static power
  double floor_w = 1e-12;       ///< interference floor b

  /// Effective receive aperture G_R·λ²/(4π).
  double aperture_m2() const { return gain_rx * wavelength_m * wavelength_m / (4.0 * kPi); }
  double k() const { return ptx_w * gain_tx * aperture_m2() / (4.0 * kPi); }
  double alpha1() const { return wall_reflection * wall_reflection / (4.0 * kPi); }
  double alpha2() const { return wall_reflection / std::sqrt(kPi); }

  /// Throws ValidationError ("rf.*") on any out-of-range constant.
  void validate() const;

  friend bool operator==(const RfParameters&, const RfParameters&) = default;
};

struct SsnrValue {
  double linear = 0.0;
  double db = 0.0;

  /// db = 10·log10(linear); nonpositive ratios map to -inf.
  static SsnrValue from_linear(double linear);
};

/// Static line-of-sight power P_T·G_T·A_R/(4π r_D²).
double p_los(const RfParameters& params, double r_d);

/// Target-reflected power over the direct two-hop path.
double p_dyn_los(const RfParameters& params, double r_t, double r_r);

/// Power over device→wall→target→other-device with one wall bounce.
double p_dyn_wall(const RfParameters& params, double d1, double d2, double r_other);

/// 2π(d1 + d2 − r_direct)/λ, unwrapped.
double phase_difference(double d1, double d2, double r_direct, double wavelength_m);

struct PathPower {
  double power_w = 0.0;
  double length_m = 0.0;  ///< full transmitter-to-receiver length of the dynamic path
};

/// |Σ √P_k · exp(−j2πL_k/λ)|². Empty input yields 0.
double p_dyn_combined(std::span<const PathPower> paths, double wavelength_m);

/// Dynamic powers (with full path lengths) of every valid path in `paths`, LoS first.
std::vector<PathPower> dynamic_path_powers(const RfParameters& params, const PathSet& paths);

/// Absolute SSNR: coherent dynamic power over γ·P_LoS + b.
/// Throws DomainError for a singular path set.
SsnrValue ssnr_full(const RfParameters& params, const PathSet& paths);

/// Normalised proportional SSNR. For one valid reflected leg this is
///   α1·r_D²/(d1 d2 r_R)² + r_D²/(r_T r_R)² + α2·cos(Δφ)·r_D²/(d1 d2 r_T r_R²);
/// further legs add their own wall and cross terms, plus α1-weighted cross terms
/// between wall legs. Without valid legs it reduces to r_D²/(r_T r_R)².
double ssnr_simplified(const PathSet& paths, double alpha1, double alpha2, double wavelength_m);

/// Σ over valid reflected legs of r_D²/(d1 d2 r_other)².
double ssnr_wall_simplified(const PathSet& paths);

/// Boundary product r_T·r_R at which the no-wall simplified SSNR equals ssnr_min.
double cassini_constant(double r_d, double ssnr_min_linear);

enum class ModelMode { Simplified, Full };

/// Everything needed to evaluate SSNR at a point.
struct ModelConfig {
  RfParameters rf;
  ModelMode mode = ModelMode::Simplified;
  double scale = 1.0;  ///< multiplies the simplified form only

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// SSNR in dB under the configured model.
double ssnr_db(const ModelConfig& model, const PathSet& paths);

/// Scale for the simplified form that places `paths` exactly at `threshold_db`.
double calibrate_scale(const ModelConfig& model, const PathSet& reference, double threshold_db);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace wallsense
