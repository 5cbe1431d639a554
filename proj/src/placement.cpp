#include "wallsense/placement.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "wallsense/coverage_io.hpp"
#include "wallsense/error.hpp"
#include "wallsense/parallel.hpp"

namespace wallsense {

namespace {

SweepRow evaluate_row(const Scenario& scenario, double d) {
  const ScalarField field = evaluate_field(scenario);
  const CoverageReport report = coverage_report(scenario, field, scenario.threshold_db, false);
  return {d,
          scenario.placement,
          report.indoor_area_m2,
          report.leakage_area_m2,
          report.component_count,
          report.raw_component_count,
          report.regions};
}

template <typename MakePlacement>
SweepResult run_sweep(const Scenario& base, std::vector<double> distances, MakePlacement&& make) {
  base.validate();
  if (distances.empty()) throw ValidationError("distances_m", "distance list is empty");
  for (double d : distances) {
    if (!std::isfinite(d) || !(d > 0.0)) {
      throw ValidationError("distances_m", "distances must be finite and > 0");
    }
  }
  std::sort(distances.begin(), distances.end());

  SweepResult result;
  for (double d : distances) {
    Scenario s = base;
    s.placement = make(d);
    try {
      validate_placement(s.room, s.placement);
    } catch (const ValidationError& e) {
      std::ostringstream msg;
      msg << "distance " << format_double(d) << " m skipped: " << e.what();
      result.diagnostics.push_back(msg.str());
      continue;
    }
    result.rows.push_back(evaluate_row(s, d));
  }
  return result;
}

}  // namespace

SweepResult sweep_wall_distance(const Scenario& base, std::vector<double> distances) {
  const auto reflective = base.room.reflective_indices();
  if (reflective.empty()) throw ValidationError("room.reflective_walls", "no reflective wall");
  const WallSegment& wall = base.room.walls()[reflective.front()];
  const Point2D along = (1.0 / wall.length()) * (wall.b - wall.a);
  // Unit normal pointing into the room.
  Point2D inward{-along.y, along.x};
  if (base.room.signed_area() < 0.0) inward = -1.0 * inward;
  const double current = std::abs(wall.signed_distance(base.placement.tx));
  return run_sweep(base, std::move(distances), [&](double d) {
    const Point2D shift = (d - current) * inward;
    return DevicePlacement{base.placement.tx + shift, base.placement.rx + shift};
  });
}

SweepResult sweep_txrx_distance(const Scenario& base, std::vector<double> distances) {
  const Point2D dir = base.placement.rx - base.placement.tx;
  const double len = norm(dir);
  if (!(len > 0.0)) throw ValidationError("placement", "DevicePlacement: tx and rx coincide");
  const Point2D unit = (1.0 / len) * dir;
  return run_sweep(base, std::move(distances), [&](double d) {
    return DevicePlacement{base.placement.tx, base.placement.tx + d * unit};
  });
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "distance_m,indoor_area_m2,leakage_area_m2,components\n";
  for (const auto& row : result.rows) {
    out << format_double(row.distance_m) << ',' << format_double(row.indoor_area_m2) << ','
        << (row.leakage_area_m2 ? format_double(*row.leakage_area_m2) : std::string{}) << ','
        << row.component_count << '\n';
  }
}

void PlacementObjective::validate() const {
  if (!(leakage_penalty >= 0.0) || !std::isfinite(leakage_penalty)) {
    throw ValidationError("objective.leakage_penalty", "must be finite and >= 0");
  }
  if (!(min_wall_clearance_m >= 0.0) || !std::isfinite(min_wall_clearance_m)) {
    throw ValidationError("objective.min_wall_clearance_m", "must be finite and >= 0");
  }
  if (!(step_m > 0.0) || !std::isfinite(step_m)) {
    throw ValidationError("objective.step_m", "must be finite and > 0");
  }
}

std::vector<Point2D> placement_candidates(const RoomLayout& room, const PlacementObjective& objective) {
  objective.validate();
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = xmin;
  double xmax = -xmin;
  double ymax = -xmin;
  for (const auto& v : room.vertices()) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  if (objective.step_m > std::min(xmax - xmin, ymax - ymin) / 4.0) {
    throw ValidationError("objective.step_m", "step exceeds a quarter of the room's smaller dimension");
  }
  std::vector<Point2D> out;
  const double step = objective.step_m;
  const auto nx = static_cast<std::size_t>(std::floor((xmax - xmin) / step + 0.5));
  const auto ny = static_cast<std::size_t>(std::floor((ymax - ymin) / step + 0.5));
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const Point2D p{xmin + (static_cast<double>(i) + 0.5) * step,
                      ymin + (static_cast<double>(j) + 0.5) * step};
      if (room.contains(p) && room.clearance(p) >= objective.min_wall_clearance_m) out.push_back(p);
    }
  }
  return out;
}

double placement_objective(const CoverageReport& report, const PlacementObjective& objective) {
  if (objective.leakage_penalty == 0.0) return report.indoor_area_m2;
  if (!report.leakage_area_m2) {
    throw ValidationError("grid", "leakage penalty requires a grid extending beyond the reflective wall");
  }
  return report.indoor_area_m2 - objective.leakage_penalty * *report.leakage_area_m2;
}

OptimizationResult optimize_placement(const Scenario& base, const PlacementObjective& objective,
                                      const ProgressCallback& progress) {
  base.validate();
  const auto candidates = placement_candidates(base.room, objective);

  OptimizationResult result;
  result.candidate_count = candidates.size();
  std::vector<DevicePlacement> pairs;
  for (const auto& tx : candidates) {
    for (const auto& rx : candidates) {
      if (!(tx == rx)) pairs.push_back({tx, rx});
    }
  }
  if (pairs.empty()) {
    result.reason = candidates.empty() ? "no candidate position satisfies the clearance"
                                       : "a single candidate position cannot host both devices";
    return result;
  }

  std::vector<double> scores(pairs.size(), -std::numeric_limits<double>::infinity());
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  detail::parallel_for(pairs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Scenario s = base;
      s.placement = pairs[i];
      const ScalarField field = evaluate_field(s, s.grid, 1);
      scores[i] = placement_objective(coverage_report(s, field, s.threshold_db, false), objective);
      const std::size_t n = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(n, pairs.size());
      }
    }
  });

  // Pairs are enumerated in tie-break order, so the first maximum wins.
  std::size_t best = 0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }

  Scenario winner = base;
  winner.placement = pairs[best];
  result.feasible = true;
  result.placement = pairs[best];
  result.report = coverage_report(winner, evaluate_field(winner), winner.threshold_db);
  result.objective = scores[best];
  result.pairs_evaluated = pairs.size();
  return result;
}

Topology classify_topology(const CoverageReport& report) {
  if (report.mask.count() == 0 || report.component_count == 0) return Topology::Empty;
  return report.component_count >= 2 ? Topology::Split : Topology::SingleRegion;
}

const char* to_string(Topology t) {
  switch (t) {
    case Topology::Empty: return "empty";
    case Topology::SingleRegion: return "single-region";
    case Topology::Split: return "split";
  }
  return "unknown";
}

}  // namespace wallsense
