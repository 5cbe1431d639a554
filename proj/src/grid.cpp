#include "wallsense/grid.hpp"

#include <cmath>

#include "wallsense/error.hpp"

namespace wallsense {

namespace {

// Tolerates width/resolution ratios like 10/0.05 that land a hair below an integer.
std::size_t cells_along(double extent, double resolution) {
  const double ratio = extent / resolution;
  return static_cast<std::size_t>(std::floor(ratio + 1e-9));
}

}  // namespace

std::size_t GridSpec::cols() const { return cells_along(width_m, resolution_m); }
std::size_t GridSpec::rows() const { return cells_along(height_m, resolution_m); }

void GridSpec::validate() const {
  if (!origin.finite()) throw ValidationError("grid.origin_m", "non-finite coordinate");
  if (!(resolution_m > 0.0) || !std::isfinite(resolution_m)) {
    throw ValidationError("grid.resolution_m", "must be finite and > 0");
  }
  if (!std::isfinite(width_m) || !(width_m >= resolution_m)) {
    throw ValidationError("grid.width_m", "must be at least one cell wide");
  }
  if (!std::isfinite(height_m) || !(height_m >= resolution_m)) {
    throw ValidationError("grid.height_m", "must be at least one cell high");
  }
  if (width_m / resolution_m * (height_m / resolution_m) > 1e9) {
    throw ValidationError("grid.resolution_m", "cell count exceeds 1e9");
  }
}

}  // namespace wallsense
