#include "wallsense/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "wallsense/error.hpp"
#include "wallsense/scenario_json.hpp"

namespace wallsense {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Rejects keys outside `allowed` so typos never silently fall back to defaults.
void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed,
                std::initializer_list<const char*> required = {}) {
  if (!obj.is_object()) throw ValidationError(path, "expected an object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) throw ValidationError(join(path, key), "unknown field");
  }
  for (const char* key : required) {
    if (!obj.contains(key)) throw ValidationError(join(path, key), "missing required field");
  }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(join(path, key), "expected a number");
  return v.get<double>();
}

Point2D get_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ValidationError(path, "expected [x, y] in meters");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

ordered_json point_json(Point2D p) { return ordered_json::array({p.x, p.y}); }

// Re-anchors a component's diagnostic under `prefix`.
template <typename F>
auto with_prefix(const std::string& prefix, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    if (prefix.empty()) throw;
    throw ValidationError(join(prefix, e.field_path()), e.message());
  }
}

}  // namespace

void Scenario::validate() const {
  if (room.walls().empty()) throw ValidationError("room", "room is not initialised");
  model.rf.validate();
  if (!(model.scale > 0.0) || !std::isfinite(model.scale)) {
    throw ValidationError("model.scale", "must be finite and > 0");
  }
  grid.validate();
  validate_placement(room, placement);
  if (!std::isfinite(threshold_db)) throw ValidationError("threshold_db", "must be finite");
  if (!(exclusion_radius_m >= 0.0) || !std::isfinite(exclusion_radius_m)) {
    throw ValidationError("exclusion_radius_m", "must be finite and >= 0");
  }
  if (!(min_region_area_m2 >= 0.0) || !std::isfinite(min_region_area_m2)) {
    throw ValidationError("min_region_area_m2", "must be finite and >= 0");
  }
  if (smoothing_window < 1 || smoothing_window % 2 == 0) {
    throw ValidationError("smoothing_window", "must be an odd integer >= 1");
  }
}

Scenario Scenario::canonical() {
  Scenario s;
  s.room = RoomLayout::from_vertices({{0.0, 0.0}, {8.0, 0.0}, {8.0, 6.0}, {0.0, 6.0}}, {3});
  s.placement = {{0.5, 3.0}, {3.5, 3.0}};
  return s;
}

ordered_json scenario_to_json(const Scenario& s) {
  ordered_json room;
  room["vertices_m"] = ordered_json::array();
  for (const auto& v : s.room.vertices()) room["vertices_m"].push_back(point_json(v));
  room["reflective_walls"] = s.room.reflective_indices();

  ordered_json rf;
  rf["ptx_w"] = s.model.rf.ptx_w;
  rf["gain_tx"] = s.model.rf.gain_tx;
  rf["gain_rx"] = s.model.rf.gain_rx;
  rf["wavelength_m"] = s.model.rf.wavelength_m;
  rf["rcs_m2"] = s.model.rf.rcs_m2;
  rf["wall_reflection"] = s.model.rf.wall_reflection;
  rf["gamma"] = s.model.rf.gamma;
  rf["floor_w"] = s.model.rf.floor_w;

  ordered_json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["room"] = std::move(room);
  doc["placement"] = {{"tx_m", point_json(s.placement.tx)}, {"rx_m", point_json(s.placement.rx)}};
  doc["rf"] = std::move(rf);
  doc["model"] = {{"mode", s.model.mode == ModelMode::Full ? "full" : "simplified"},
                  {"scale", s.model.scale}};
  doc["grid"] = {{"origin_m", point_json(s.grid.origin)},
                 {"width_m", s.grid.width_m},
                 {"height_m", s.grid.height_m},
                 {"resolution_m", s.grid.resolution_m}};
  doc["threshold_db"] = s.threshold_db;
  doc["exclusion_radius_m"] = s.exclusion_radius_m;
  doc["min_region_area_m2"] = s.min_region_area_m2;
  doc["smoothing_window"] = s.smoothing_window;
  return doc;
}

Scenario scenario_from_json(const json& doc, const std::string& prefix) {
  check_keys(doc, prefix,
             {"schema_version", "room", "placement", "rf", "model", "grid", "threshold_db",
              "exclusion_radius_m", "min_region_area_m2", "smoothing_window"},
             {"room", "placement"});
  if (doc.contains("schema_version")) {
    const auto& v = doc.at("schema_version");
    if (!v.is_number_integer() || v.get<int>() != kScenarioSchemaVersion) {
      throw ValidationError(join(prefix, "schema_version"),
                            "unsupported schema version (expected " +
                                std::to_string(kScenarioSchemaVersion) + ")");
    }
  }

  Scenario s;

  const std::string room_path = join(prefix, "room");
  const auto& room = doc.at("room");
  check_keys(room, room_path, {"vertices_m", "reflective_walls"}, {"vertices_m", "reflective_walls"});
  const auto& verts = room.at("vertices_m");
  if (!verts.is_array()) throw ValidationError(join(room_path, "vertices_m"), "expected an array");
  std::vector<Point2D> vertices;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    vertices.push_back(get_point(verts[i], join(room_path, "vertices_m[" + std::to_string(i) + "]")));
  }
  const auto& refl = room.at("reflective_walls");
  if (!refl.is_array()) throw ValidationError(join(room_path, "reflective_walls"), "expected an array");
  std::vector<std::size_t> reflective;
  for (const auto& r : refl) {
    if (!r.is_number_unsigned()) {
      throw ValidationError(join(room_path, "reflective_walls"), "expected wall indices");
    }
    reflective.push_back(r.get<std::size_t>());
  }
  s.room = with_prefix(prefix, [&] { return RoomLayout::from_vertices(vertices, reflective); });

  const std::string placement_path = join(prefix, "placement");
  const auto& placement = doc.at("placement");
  check_keys(placement, placement_path, {"tx_m", "rx_m"}, {"tx_m", "rx_m"});
  s.placement.tx = get_point(placement.at("tx_m"), join(placement_path, "tx_m"));
  s.placement.rx = get_point(placement.at("rx_m"), join(placement_path, "rx_m"));

  if (doc.contains("rf")) {
    const std::string path = join(prefix, "rf");
    const auto& rf = doc.at("rf");
    check_keys(rf, path,
               {"ptx_w", "gain_tx", "gain_rx", "wavelength_m", "rcs_m2", "wall_reflection", "gamma",
                "floor_w"});
    auto& p = s.model.rf;
    p.ptx_w = get_number(rf, path, "ptx_w", p.ptx_w);
    p.gain_tx = get_number(rf, path, "gain_tx", p.gain_tx);
    p.gain_rx = get_number(rf, path, "gain_rx", p.gain_rx);
    p.wavelength_m = get_number(rf, path, "wavelength_m", p.wavelength_m);
    p.rcs_m2 = get_number(rf, path, "rcs_m2", p.rcs_m2);
    p.wall_reflection = get_number(rf, path, "wall_reflection", p.wall_reflection);
    p.gamma = get_number(rf, path, "gamma", p.gamma);
    p.floor_w = get_number(rf, path, "floor_w", p.floor_w);
  }

  if (doc.contains("model")) {
    const std::string path = join(prefix, "model");
    const auto& model = doc.at("model");
    check_keys(model, path, {"mode", "scale"});
    if (model.contains("mode")) {
      const auto& m = model.at("mode");
      if (m == "simplified") {
        s.model.mode = ModelMode::Simplified;
      } else if (m == "full") {
        s.model.mode = ModelMode::Full;
      } else {
        throw ValidationError(join(path, "mode"), "expected \"simplified\" or \"full\"");
      }
    }
    s.model.scale = get_number(model, path, "scale", s.model.scale);
  }

  if (doc.contains("grid")) {
    const std::string path = join(prefix, "grid");
    const auto& grid = doc.at("grid");
    check_keys(grid, path, {"origin_m", "width_m", "height_m", "resolution_m"});
    if (grid.contains("origin_m")) s.grid.origin = get_point(grid.at("origin_m"), join(path, "origin_m"));
    s.grid.width_m = get_number(grid, path, "width_m", s.grid.width_m);
    s.grid.height_m = get_number(grid, path, "height_m", s.grid.height_m);
    s.grid.resolution_m = get_number(grid, path, "resolution_m", s.grid.resolution_m);
  }

  s.threshold_db = get_number(doc, prefix, "threshold_db", s.threshold_db);
  s.exclusion_radius_m = get_number(doc, prefix, "exclusion_radius_m", s.exclusion_radius_m);
  s.min_region_area_m2 = get_number(doc, prefix, "min_region_area_m2", s.min_region_area_m2);
  if (doc.contains("smoothing_window")) {
    const auto& w = doc.at("smoothing_window");
    if (!w.is_number_integer()) {
      throw ValidationError(join(prefix, "smoothing_window"), "expected an integer");
    }
    s.smoothing_window = w.get<int>();
  }

  with_prefix(prefix, [&] {
    s.validate();
    return 0;
  });
  return s;
}

std::string scenario_to_string(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

Scenario scenario_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < upto; ++i) line += text[i] == '\n';
    throw ParseError(e.what(), line);
  }
  return scenario_from_json(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_string(buf.str());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  scenario.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path.string());
  out << scenario_to_string(scenario);
  if (!out) throw std::runtime_error("failed writing scenario file: " + path.string());
}

}  // namespace wallsense
