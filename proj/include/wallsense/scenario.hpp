#pragma once

#include <filesystem>
#include <string>

#include "wallsense/channel.hpp"
#include "wallsense/geometry.hpp"
#include "wallsense/grid.hpp"

namespace wallsense {

inline constexpr int kScenarioSchemaVersion = 1;

/// A complete, self-contained planning problem.
struct Scenario {
  RoomLayout room;
  DevicePlacement placement;
  ModelConfig model;
  GridSpec grid;
  double threshold_db = 2.0;
  /// Cells closer than this to either device are excluded (SSNR diverges there).
  double exclusion_radius_m = 0.1;
  /// Connected covered regions below this area are counted as interference speckle.
  double min_region_area_m2 = 0.1;
  /// Vertex moving-average window applied to reported contours.
  int smoothing_window = 9;

  /// Checks every component invariant; throws ValidationError naming the field.
  void validate() const;

  /// 8 m × 6 m room, reflective wall x = 0, Tx–Rx 3 m apart on y = 3 with the
  /// transmitter 0.5 m from the wall; grid reaches 2 m beyond the wall.
  static Scenario canonical();

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws ParseError (malformed JSON, with line) or ValidationError (schema or
/// invariant violation, with field path). Unknown keys are rejected.
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical formatting: fixed key order, two-space indent, trailing newline.
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

std::string scenario_to_string(const Scenario& scenario);
Scenario scenario_from_string(const std::string& text);

}  // namespace wallsense
