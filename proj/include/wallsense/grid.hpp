#pragma once

#include <cstddef>

#include "wallsense/geometry.hpp"

namespace wallsense {

/// Axis-aligned evaluation lattice. Cell (row, col) has its center at
/// origin + ((col + 0.5)·res, (row + 0.5)·res); row 0 is the lowest y.
struct GridSpec {
  Point2D origin{-2.0, 0.0};
  double width_m = 10.0;
  double height_m = 6.0;
  double resolution_m = 0.05;

  std::size_t cols() const;
  std::size_t rows() const;
  std::size_t cell_count() const { return rows() * cols(); }
  double cell_area() const { return resolution_m * resolution_m; }

  Point2D cell_center(std::size_t row, std::size_t col) const {
    return {origin.x + (static_cast<double>(col) + 0.5) * resolution_m,
            origin.y + (static_cast<double>(row) + 0.5) * resolution_m};
  }

  /// Throws ValidationError ("grid.*").
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

}  // namespace wallsense
