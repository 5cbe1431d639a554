#include "wallsense/channel.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "wallsense/error.hpp"

namespace wallsense {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

void require_nonsingular(const PathSet& paths) {
  if (paths.singular || !(paths.r_t > 0.0) || !(paths.r_r > 0.0) || !(paths.r_d > 0.0)) {
    throw DomainError("singular path set: target coincides with a device");
  }
}

// Length of the leg that closes the bounced path to the other device.
double closing_leg(const PathSet& paths, const ReflectedLeg& leg) {
  return leg.side == PathSide::Tx ? paths.r_r : paths.r_t;
}

double direct_leg(const PathSet& paths, const ReflectedLeg& leg) {
  return leg.side == PathSide::Tx ? paths.r_t : paths.r_r;
}

}  // namespace

void RfParameters::validate() const {
  auto positive = [](double v, const char* path) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(path, "must be finite and > 0");
  };
  positive(ptx_w, "rf.ptx_w");
  positive(gain_tx, "rf.gain_tx");
  positive(gain_rx, "rf.gain_rx");
  positive(wavelength_m, "rf.wavelength_m");
  positive(rcs_m2, "rf.rcs_m2");
  positive(gamma, "rf.gamma");
  if (!(wall_reflection >= 0.0 && wall_reflection <= 1.0)) {
    throw ValidationError("rf.wall_reflection", "must lie in [0, 1]");
  }
  if (!(floor_w >= 0.0) || !std::isfinite(floor_w)) {
    throw ValidationError("rf.floor_w", "must be finite and >= 0");
  }
}

SsnrValue SsnrValue::from_linear(double linear) {
  const double db = linear > 0.0 ? 10.0 * std::log10(linear)
                                 : -std::numeric_limits<double>::infinity();
  return {linear, db};
}

double p_los(const RfParameters& params, double r_d) {
  require_positive(r_d, "r_D");
  return params.ptx_w * params.gain_tx * params.aperture_m2() / (4.0 * kPi * r_d * r_d);
}

double p_dyn_los(const RfParameters& params, double r_t, double r_r) {
  require_positive(r_t, "r_T");
  require_positive(r_r, "r_R");
  const double prod = r_t * r_r;
  return params.ptx_w * params.gain_tx * params.rcs_m2 * params.aperture_m2() /
         (16.0 * kPi * kPi * prod * prod);
}

double p_dyn_wall(const RfParameters& params, double d1, double d2, double r_other) {
  require_positive(d1, "d1");
  require_positive(d2, "d2");
  require_positive(r_other, "r_R");
  const double prod = d1 * d2 * r_other;
  const double four_pi = 4.0 * kPi;
  return params.ptx_w * params.gain_tx * params.wall_reflection * params.wall_reflection *
         params.rcs_m2 * params.aperture_m2() / (four_pi * four_pi * four_pi * prod * prod);
}

double phase_difference(double d1, double d2, double r_direct, double wavelength_m) {
  require_positive(wavelength_m, "wavelength");
  return 2.0 * kPi * (d1 + d2 - r_direct) / wavelength_m;
}

double p_dyn_combined(std::span<const PathPower> paths, double wavelength_m) {
  if (paths.empty()) return 0.0;
  require_positive(wavelength_m, "wavelength");
  // Phases are taken relative to the first path; a common phase drops out of |Σ|².
  const double reference = paths.front().length_m;
  std::complex<double> field{0.0, 0.0};
  for (const auto& p : paths) {
    if (!(p.power_w >= 0.0)) throw DomainError("path power must be >= 0");
    require_positive(p.length_m, "path length");
    field += std::polar(std::sqrt(p.power_w), -2.0 * kPi * (p.length_m - reference) / wavelength_m);
  }
  return std::norm(field);
}

std::vector<PathPower> dynamic_path_powers(const RfParameters& params, const PathSet& paths) {
  require_nonsingular(paths);
  std::vector<PathPower> out;
  out.reserve(1 + paths.reflected.size());
  out.push_back({p_dyn_los(params, paths.r_t, paths.r_r), paths.r_t + paths.r_r});
  for (const auto& leg : paths.reflected) {
    if (!leg.path.valid) continue;
    const double other = closing_leg(paths, leg);
    out.push_back({p_dyn_wall(params, leg.path.d1, leg.path.d2, other),
                   leg.path.d1 + leg.path.d2 + other});
  }
  return out;
}

SsnrValue ssnr_full(const RfParameters& params, const PathSet& paths) {
  const auto powers = dynamic_path_powers(params, paths);
  const double dynamic = p_dyn_combined(powers, params.wavelength_m);
  const double interference = params.gamma * p_los(params, paths.r_d) + params.floor_w;
  return SsnrValue::from_linear(dynamic / interference);
}

double ssnr_simplified(const PathSet& paths, double alpha1, double alpha2, double wavelength_m) {
  require_nonsingular(paths);
  const double r_d2 = paths.r_d * paths.r_d;
  const double los_amp = paths.r_d / (paths.r_t * paths.r_r);
  double total = los_amp * los_amp;

  // Normalised wall amplitudes and their phases relative to the direct path.
  struct Wall {
    double amp;
    double phase;
  };
  std::vector<Wall> walls;
  for (const auto& leg : paths.reflected) {
    if (!leg.path.valid) continue;
    const double direct = direct_leg(paths, leg);
    const double other = closing_leg(paths, leg);
    const double prod = leg.path.d1 * leg.path.d2;
    total += alpha1 * r_d2 / ((prod * other) * (prod * other));
    const double dphi = phase_difference(leg.path.d1, leg.path.d2, direct, wavelength_m);
    total += alpha2 * std::cos(dphi) * r_d2 / ((prod * direct) * (other * other));
    walls.push_back({paths.r_d / (prod * other), dphi});
  }
  for (std::size_t i = 0; i < walls.size(); ++i) {
    for (std::size_t j = i + 1; j < walls.size(); ++j) {
      total += 2.0 * alpha1 * walls[i].amp * walls[j].amp * std::cos(walls[i].phase - walls[j].phase);
    }
  }
  return total;
}

double ssnr_wall_simplified(const PathSet& paths) {
  require_nonsingular(paths);
  double total = 0.0;
  for (const auto& leg : paths.reflected) {
    if (!leg.path.valid) continue;
    const double prod = leg.path.d1 * leg.path.d2 * closing_leg(paths, leg);
    total += paths.r_d * paths.r_d / (prod * prod);
  }
  return total;
}

double cassini_constant(double r_d, double ssnr_min_linear) {
  require_positive(r_d, "r_D");
  require_positive(ssnr_min_linear, "ssnr_min");
  return r_d / std::sqrt(ssnr_min_linear);
}

double ssnr_db(const ModelConfig& model, const PathSet& paths) {
  if (model.mode == ModelMode::Full) return ssnr_full(model.rf, paths).db;
  const double s = ssnr_simplified(paths, model.rf.alpha1(), model.rf.alpha2(),
                                   model.rf.wavelength_m);
  return SsnrValue::from_linear(model.scale * s).db;
}

double calibrate_scale(const ModelConfig& model, const PathSet& reference, double threshold_db) {
  const double s = ssnr_simplified(reference, model.rf.alpha1(), model.rf.alpha2(),
                                   model.rf.wavelength_m);
  if (!(s > 0.0)) throw DomainError("reference geometry has nonpositive simplified SSNR");
  return db_to_linear(threshold_db) / s;
}

}  // namespace wallsense
