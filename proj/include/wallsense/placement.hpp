#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wallsense/coverage.hpp"
#include "wallsense/scenario.hpp"

namespace wallsense {

struct SweepRow {
  double distance_m = 0.0;
  DevicePlacement placement;
  double indoor_area_m2 = 0.0;
  std::optional<double> leakage_area_m2;
  std::size_t component_count = 0;
  std::size_t raw_component_count = 0;
  std::vector<Region> regions;
};

/// Rows are ordered by distance regardless of the input order.
struct SweepResult {
  std::vector<SweepRow> rows;
  /// One entry per skipped distance.
  std::vector<std::string> diagnostics;
};

/// Translates both devices along the first reflective wall's normal so the
/// transmitter sits `d` from the wall line; the Tx–Rx vector is preserved.
SweepResult sweep_wall_distance(const Scenario& base, std::vector<double> distances);

/// Keeps the transmitter fixed and places the receiver `d` from it along the
/// template's Tx→Rx direction.
SweepResult sweep_txrx_distance(const Scenario& base, std::vector<double> distances);

/// Header "distance_m,indoor_area_m2,leakage_area_m2,components"; unknown
/// leakage is written as an empty field.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

struct PlacementObjective {
  double leakage_penalty = 0.0;
  double min_wall_clearance_m = 0.1;
  double step_m = 0.25;

  void validate() const;
};

struct OptimizationResult {
  bool feasible = false;
  std::string reason;  ///< set when infeasible
  DevicePlacement placement;
  CoverageReport report;
  double objective = 0.0;
  std::size_t candidate_count = 0;
  std::size_t pairs_evaluated = 0;
};

/// Candidate device positions: lattice points at (step/2 + i·step) offsets from
/// the room's bounding-box corner that are strictly inside and keep the
/// required clearance to every wall. Sorted by x, then y.
std::vector<Point2D> placement_candidates(const RoomLayout& room, const PlacementObjective& objective);

/// indoor_area − leakage_penalty × leakage_area.
double placement_objective(const CoverageReport& report, const PlacementObjective& objective);

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Exhaustive search over ordered (tx, rx) candidate pairs. Ties go to the
/// smaller tx.x, then tx.y, rx.x, rx.y. The callback may be invoked from worker
/// threads, serialised.
OptimizationResult optimize_placement(const Scenario& base, const PlacementObjective& objective,
                                      const ProgressCallback& progress = {});

enum class Topology { Empty, SingleRegion, Split };

Topology classify_topology(const CoverageReport& report);
const char* to_string(Topology t);

}  // namespace wallsense
