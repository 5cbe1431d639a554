#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wallsense/geometry.hpp"
#include "wallsense/grid.hpp"
#include "wallsense/scenario.hpp"

namespace wallsense {

/// Row-major SSNR values in dB. Excluded cells hold NaN; cells whose linear
/// SSNR is not positive hold -inf.
struct ScalarField {
  GridSpec grid;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values_db;
  std::vector<std::uint8_t> excluded;
  std::vector<std::string> diagnostics;

  double at(std::size_t row, std::size_t col) const { return values_db[row * cols + col]; }
  bool is_excluded(std::size_t row, std::size_t col) const { return excluded[row * cols + col] != 0; }
};

struct BoolGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> cells;

  BoolGrid() = default;
  BoolGrid(std::size_t r, std::size_t c, bool fill = false) : rows(r), cols(c), cells(r * c, fill) {}

  bool at(std::size_t row, std::size_t col) const { return cells[row * cols + col] != 0; }
  void set(std::size_t row, std::size_t col, bool v) { cells[row * cols + col] = v; }
  std::size_t count() const;

  friend bool operator==(const BoolGrid&, const BoolGrid&) = default;
};

/// Closed polyline; the closing edge from back() to front() is implicit.
using Contour = std::vector<Point2D>;

/// Grids coarser than this produce a diagnostic.
inline constexpr double kCoarseResolutionWarning = 0.5;

/// SSNR (dB) at every cell center of `grid` under the scenario's model.
/// `threads` = 0 uses every hardware thread; results do not depend on it.
ScalarField evaluate_field(const Scenario& scenario, const GridSpec& grid,
                           std::size_t threads = 0);
inline ScalarField evaluate_field(const Scenario& scenario) {
  return evaluate_field(scenario, scenario.grid);
}

/// value >= threshold and not excluded.
BoolGrid threshold_mask(const ScalarField& field, double threshold_db);

/// Marching squares on a binary mask, sampled at cell centers, with the grid
/// padded by uncovered cells. Vertices sit midway between a covered and an
/// uncovered center. Diagonal-only contacts stay separate (4-connectivity).
/// Outer boundaries run counter-clockwise, holes clockwise: covered on the left.
std::vector<Contour> extract_boundary(const BoolGrid& mask, const GridSpec& grid);

/// Circular moving average of vertex positions. `window` must be odd and >= 1;
/// a window of 1 is the identity.
Contour smooth_boundary(const Contour& contour, int window);

double contour_length(const Contour& contour);
/// Shoelace area; positive for counter-clockwise contours.
double contour_signed_area(const Contour& contour);

struct ComponentLabels {
  std::vector<int> labels;          ///< -1 for uncovered cells
  std::vector<std::size_t> sizes;   ///< cell count per label
};

/// 4-connected components in row-major discovery order.
ComponentLabels label_components(const BoolGrid& mask);

struct Region {
  double area_m2 = 0.0;
  std::size_t cells = 0;
  Point2D centroid;
};

struct CoverageReport {
  BoolGrid mask;
  /// Smoothed boundaries of the covered set. Device exclusion zones that border
  /// covered cells count as covered.
  std::vector<Contour> contours;
  double covered_area_m2 = 0.0;
  double indoor_area_m2 = 0.0;
  /// Empty when the grid has no cell beyond a reflective wall.
  std::optional<double> leakage_area_m2;
  /// Connected regions of at least min_region_area_m2.
  std::size_t component_count = 0;
  /// Every 4-connected component of the mask, including speckle.
  std::size_t raw_component_count = 0;
  std::vector<Region> regions;
};

/// `with_contours = false` skips boundary extraction (areas and regions only).
CoverageReport coverage_report(const Scenario& scenario, const ScalarField& field,
                               double threshold_db, bool with_contours = true);

}  // namespace wallsense
