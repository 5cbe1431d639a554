#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>

#include "wallsense/error.hpp"
#include "wallsense/placement.hpp"

using namespace wallsense;

namespace {

// Small room and coarse grid so exhaustive searches stay fast.
Scenario small_room() {
  Scenario s = Scenario::canonical();
  s.room = RoomLayout::from_vertices({{0, 0}, {3, 0}, {3, 2}, {0, 2}}, {3});
  s.placement = {{0.5, 1.0}, {2.0, 1.0}};
  s.grid.origin = {-1.0, 0.0};
  s.grid.width_m = 4.0;
  s.grid.height_m = 2.0;
  s.grid.resolution_m = 0.1;
  return s;
}

bool lexicographically_before(const DevicePlacement& a, const DevicePlacement& b) {
  auto key = [](const DevicePlacement& p) {
    return std::array<double, 4>{p.tx.x, p.tx.y, p.rx.x, p.rx.y};
  };
  return key(a) < key(b);
}

}  // namespace

TEST_CASE("wall sweep moves both devices along the wall normal") {
  const Scenario s = Scenario::canonical();
  const SweepResult r = sweep_wall_distance(s, {2.0, 0.5, 1.0});
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].distance_m == 0.5);
  CHECK(r.rows[1].distance_m == 1.0);
  CHECK(r.rows[2].distance_m == 2.0);
  for (const auto& row : r.rows) {
    CHECK(row.placement.tx.x == doctest::Approx(row.distance_m));
    CHECK(row.placement.tx.y == doctest::Approx(3.0));
    CHECK(row.placement.rx.x - row.placement.tx.x == doctest::Approx(3.0));
    REQUIRE(row.leakage_area_m2.has_value());
  }
  CHECK(r.diagnostics.empty());

  // Sweep row equals a direct evaluation at the same placement.
  Scenario at = s;
  at.placement = r.rows[1].placement;
  const CoverageReport direct = coverage_report(at, evaluate_field(at), at.threshold_db, false);
  CHECK(r.rows[1].indoor_area_m2 == direct.indoor_area_m2);
  CHECK(r.rows[1].component_count == direct.component_count);
}

TEST_CASE("Tx-Rx sweep keeps the transmitter fixed") {
  const SweepResult r = sweep_txrx_distance(Scenario::canonical(), {1.0, 4.0});
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(row.placement.tx == Point2D{0.5, 3.0});
    CHECK(distance(row.placement.tx, row.placement.rx) == doctest::Approx(row.distance_m));
  }
}

TEST_CASE("sweep input checks") {
  const Scenario s = Scenario::canonical();
  try {
    sweep_wall_distance(s, {});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field_path() == "distances_m");
  }
  CHECK_THROWS_AS(sweep_txrx_distance(s, {1.0, -1.0}), ValidationError);
  CHECK_THROWS_AS(sweep_txrx_distance(s, {std::nan("")}), ValidationError);

  const SweepResult r = sweep_txrx_distance(s, {1.0, 9.0});
  CHECK(r.rows.size() == 1);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].find("distance 9 m skipped") != std::string::npos);
}

TEST_CASE("sweep CSV") {
  SweepResult r;
  r.rows.push_back({0.5, {}, 1.25, 0.5, 1, 3, {}});
  r.rows.push_back({1.0, {}, 2.0, std::nullopt, 2, 2, {}});
  std::ostringstream out;
  write_sweep_csv(out, r);
  CHECK(out.str() ==
        "distance_m,indoor_area_m2,leakage_area_m2,components\n0.5,1.25,0.5,1\n1,2,,2\n");
}

TEST_CASE("candidate lattice") {
  const RoomLayout room = RoomLayout::from_vertices({{0, 0}, {3, 0}, {3, 2}, {0, 2}}, {3});
  PlacementObjective obj;
  obj.step_m = 0.5;
  obj.min_wall_clearance_m = 0.3;
  const auto c = placement_candidates(room, obj);
  // Centers at 0.25 + 0.5·i; x ∈ {0.75 … 2.25}, y ∈ {0.75, 1.25}.
  CHECK(c.size() == 4 * 2);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(room.clearance(c[i]) >= 0.3);
    if (i > 0) CHECK((c[i - 1].x < c[i].x || (c[i - 1].x == c[i].x && c[i - 1].y < c[i].y)));
  }
  CHECK(c.front().x == doctest::Approx(0.75));
  CHECK(c.front().y == doctest::Approx(0.75));

  obj.step_m = 0.6;
  try {
    placement_candidates(room, obj);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field_path() == "objective.step_m");
  }
  obj.step_m = -1.0;
  CHECK_THROWS_AS(placement_candidates(room, obj), ValidationError);
}

TEST_CASE("objective needs a known leakage area when penalised") {
  CoverageReport r;
  r.indoor_area_m2 = 4.0;
  PlacementObjective obj;
  CHECK(placement_objective(r, obj) == 4.0);
  obj.leakage_penalty = 2.0;
  CHECK_THROWS_AS(placement_objective(r, obj), ValidationError);
  r.leakage_area_m2 = 0.5;
  CHECK(placement_objective(r, obj) == 3.0);
}

TEST_CASE("optimizer agrees with an independent exhaustive search") {
  const Scenario s = small_room();
  PlacementObjective obj;
  obj.step_m = 0.5;
  obj.min_wall_clearance_m = 0.2;
  obj.leakage_penalty = 0.5;

  std::atomic<std::size_t> calls{0};
  std::size_t last_total = 0;
  const OptimizationResult got = optimize_placement(s, obj, [&](std::size_t, std::size_t total) {
    ++calls;
    last_total = total;
  });
  REQUIRE(got.feasible);

  const auto candidates = placement_candidates(s.room, obj);
  double best = -1e300;
  DevicePlacement best_pair;
  std::size_t pairs = 0;
  for (const auto& tx : candidates) {
    for (const auto& rx : candidates) {
      if (tx == rx) continue;
      ++pairs;
      Scenario t = s;
      t.placement = {tx, rx};
      const CoverageReport r = coverage_report(t, evaluate_field(t), t.threshold_db, false);
      const double score = r.indoor_area_m2 - 0.5 * *r.leakage_area_m2;
      if (score > best || (score == best && lexicographically_before(t.placement, best_pair))) {
        best = score;
        best_pair = t.placement;
      }
    }
  }
  CHECK(got.pairs_evaluated == pairs);
  CHECK(got.candidate_count == candidates.size());
  CHECK(got.objective == best);
  CHECK(got.placement == best_pair);
  CHECK(calls == pairs);
  CHECK(last_total == pairs);
  CHECK_FALSE(got.report.contours.empty());
}

TEST_CASE("mirror-image pairs tie and resolve to the smaller transmitter x") {
  Scenario s = small_room();
  s.room = RoomLayout::from_vertices({{0, 0}, {2, 0}, {2, 1}, {0, 1}}, {0});
  s.placement = {{0.5, 0.5}, {1.5, 0.5}};
  s.grid.origin = {0.0, -1.0};
  s.grid.width_m = 2.0;
  s.grid.height_m = 2.0;
  PlacementObjective obj;
  obj.step_m = 0.25;
  obj.min_wall_clearance_m = 0.3;
  const auto candidates = placement_candidates(s.room, obj);
  REQUIRE(candidates.size() == 12);
  const OptimizationResult r = optimize_placement(s, obj);
  REQUIRE(r.feasible);
  // Swapping the devices leaves the coverage unchanged, so a tie always exists.
  Scenario swapped = s;
  swapped.placement = {r.placement.rx, r.placement.tx};
  const CoverageReport other = coverage_report(swapped, evaluate_field(swapped), s.threshold_db, false);
  CHECK(other.indoor_area_m2 == r.report.indoor_area_m2);
  CHECK(lexicographically_before(r.placement, swapped.placement));
}

TEST_CASE("infeasible searches report a reason") {
  Scenario s = small_room();
  PlacementObjective obj;
  obj.step_m = 0.5;
  obj.min_wall_clearance_m = 5.0;
  OptimizationResult r = optimize_placement(s, obj);
  CHECK_FALSE(r.feasible);
  CHECK(r.candidate_count == 0);
  CHECK_FALSE(r.reason.empty());

  s.room = RoomLayout::from_vertices({{0, 0}, {2.5, 0}, {2.5, 2.5}, {0, 2.5}}, {3});
  s.placement = {{0.5, 1.0}, {2.0, 1.0}};
  obj.min_wall_clearance_m = 1.0;
  r = optimize_placement(s, obj);
  CHECK_FALSE(r.feasible);
  CHECK(r.candidate_count == 1);
}

TEST_CASE("topology classification") {
  CoverageReport r;
  r.mask = BoolGrid(2, 2);
  CHECK(classify_topology(r) == Topology::Empty);
  r.mask.set(0, 0, true);
  r.component_count = 1;
  CHECK(classify_topology(r) == Topology::SingleRegion);
  r.component_count = 2;
  CHECK(classify_topology(r) == Topology::Split);
  CHECK(std::string(to_string(Topology::Split)) == "split");
}

TEST_CASE("split coverage favours the device nearer the wall") {
  Scenario s = Scenario::canonical();
  s.placement = {{1.0, 3.0}, {4.0, 3.0}};
  const SweepResult r = sweep_txrx_distance(s, {5.0});
  REQUIRE(r.rows.size() == 1);
  const auto& row = r.rows[0];
  REQUIRE(row.component_count >= 2);
  auto nearest = [&](Point2D device) {
    const Region* best = nullptr;
    for (const auto& region : row.regions) {
      if (!best || distance(region.centroid, device) < distance(best->centroid, device)) best = &region;
    }
    return best;
  };
  const Region* near_tx = nearest(row.placement.tx);
  const Region* near_rx = nearest(row.placement.rx);
  REQUIRE(near_tx != near_rx);
  CHECK(near_tx->area_m2 >= near_rx->area_m2);
}
