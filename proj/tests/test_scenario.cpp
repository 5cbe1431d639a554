#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "wallsense/error.hpp"
#include "wallsense/scenario.hpp"
#include "wallsense/scenario_json.hpp"

using namespace wallsense;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "wallsense_scenario_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Returns the field path of the ValidationError raised by `text`, or "" if none.
std::string error_path(const std::string& text) {
  try {
    scenario_from_string(text);
  } catch (const ValidationError& e) {
    return e.field_path();
  }
  return "";
}

std::string canonical_with(const std::function<void(nlohmann::ordered_json&)>& edit) {
  auto doc = scenario_to_json(Scenario::canonical());
  edit(doc);
  return doc.dump();
}

}  // namespace

TEST_CASE("bundled canonical scenario") {
  const Scenario s = load_scenario(std::filesystem::path(WALLSENSE_DATA_DIR) / "canonical.json");
  CHECK(s == Scenario::canonical());
  CHECK(distance(s.placement.tx, s.placement.rx) == doctest::Approx(3.0));
  const auto& wall = s.room.walls()[s.room.reflective_indices().front()];
  CHECK(std::abs(wall.signed_distance(s.placement.tx)) == doctest::Approx(0.5));
  CHECK(s.threshold_db == 2.0);
}

TEST_CASE("save then load is the identity") {
  const auto path = temp_file("default.json");
  save_scenario(Scenario::canonical(), path);
  CHECK(load_scenario(path) == Scenario::canonical());

  // Deterministic bytes across repeated saves.
  const std::string first = read_all(path);
  save_scenario(load_scenario(path), path);
  CHECK(read_all(path) == first);
  CHECK(first.back() == '\n');
}

TEST_CASE("randomised round trips preserve every field") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Scenario s = Scenario::canonical();
    const double w = 4.0 + 10.0 * u(rng), h = 3.0 + 8.0 * u(rng);
    s.room = RoomLayout::from_vertices({{0, 0}, {w, 0}, {w, h}, {0, h}}, {static_cast<std::size_t>(i % 4)});
    s.placement = {{0.1 + (w - 0.2) * u(rng), 0.1 + (h - 0.2) * u(rng)},
                   {0.1 + (w - 0.2) * u(rng), 0.1 + (h - 0.2) * u(rng)}};
    s.model.rf.wavelength_m = 0.01 + u(rng);
    s.model.rf.wall_reflection = u(rng);
    s.model.rf.gamma = 1e-6 + u(rng);
    s.model.rf.floor_w = u(rng) * 1e-9;
    s.model.mode = i % 2 ? ModelMode::Full : ModelMode::Simplified;
    s.model.scale = 0.1 + 100 * u(rng);
    s.grid.origin = {-3 * u(rng), -3 * u(rng)};
    s.grid.resolution_m = 0.01 + 0.2 * u(rng);
    s.threshold_db = 10 * u(rng) - 5;
    s.exclusion_radius_m = 0.3 * u(rng);
    s.smoothing_window = 1 + 2 * (i % 6);
    const Scenario back = scenario_from_string(scenario_to_string(s));
    CHECK(back == s);
    CHECK(back.model.rf.gamma == s.model.rf.gamma);
    CHECK(back.grid.origin.x == s.grid.origin.x);
  }
}

TEST_CASE("a modified field survives the round trip") {
  Scenario s = Scenario::canonical();
  s.model.rf.wall_reflection = 0.55;
  s.threshold_db = 3.25;
  const auto path = temp_file("modified.json");
  save_scenario(s, path);
  const Scenario back = load_scenario(path);
  CHECK(back.model.rf.wall_reflection == 0.55);
  CHECK(back.threshold_db == 3.25);
  CHECK(back.placement == s.placement);
  CHECK(back.room == s.room);
}

TEST_CASE("validation diagnostics carry field paths") {
  CHECK(error_path(canonical_with([](auto& d) { d["placement"]["rx_m"] = d["placement"]["tx_m"]; })) ==
        "placement");
  CHECK(error_path(canonical_with([](auto& d) { d["placement"]["tx_m"] = {-1.0, 3.0}; })) ==
        "placement.tx_m");
  CHECK(error_path(canonical_with([](auto& d) { d["rf"]["wavelength"] = 0.06; })) == "rf.wavelength");
  CHECK(error_path(canonical_with([](auto& d) { d["extra"] = 1; })) == "extra");
  CHECK(error_path(canonical_with([](auto& d) { d["rf"]["gamma"] = -1.0; })) == "rf.gamma");
  CHECK(error_path(canonical_with([](auto& d) { d["grid"]["resolution_m"] = 0.0; })) ==
        "grid.resolution_m");
  CHECK(error_path(canonical_with([](auto& d) { d["model"]["mode"] = "exact"; })) == "model.mode");
  CHECK(error_path(canonical_with([](auto& d) { d["schema_version"] = 2; })) == "schema_version");
  CHECK(error_path(canonical_with([](auto& d) { d["smoothing_window"] = 4; })) == "smoothing_window");
  CHECK(error_path(canonical_with([](auto& d) { d["room"]["reflective_walls"] = {9}; })) ==
        "room.reflective_walls");
  CHECK(error_path(canonical_with([](auto& d) { d.erase("placement"); })) == "placement");

  try {
    scenario_from_string(canonical_with([](auto& d) { d["placement"]["rx_m"] = d["placement"]["tx_m"]; }));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("DevicePlacement") != std::string::npos);
  }

  try {
    scenario_from_json(nlohmann::json::parse(canonical_with([](auto& d) { d["rf"]["gamma"] = 0; })),
                       "scenario");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field_path() == "scenario.rf.gamma");
  }
}

TEST_CASE("malformed JSON is a parse error with a line number") {
  try {
    scenario_from_string("{\n  \"room\": {\n    \"vertices_m\": [1,\n  }\n}\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(load_scenario(temp_file("does_not_exist.json")), std::runtime_error);
}

TEST_CASE("minimal scenario uses canonical defaults") {
  const Scenario s = scenario_from_string(R"({
    "room": {"vertices_m": [[0,0],[8,0],[8,6],[0,6]], "reflective_walls": [3]},
    "placement": {"tx_m": [0.5, 3], "rx_m": [3.5, 3]}
  })");
  CHECK(s == Scenario::canonical());
}
