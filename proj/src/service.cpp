#include "wallsense/service.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "wallsense/error.hpp"
#include "wallsense/scenario_json.hpp"

namespace wallsense {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json optional_or_null(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json point_json(Point2D p) { return ordered_json::array({p.x, p.y}); }

ordered_json placement_json(const DevicePlacement& p) {
  ordered_json out;
  out["tx_m"] = point_json(p.tx);
  out["rx_m"] = point_json(p.rx);
  return out;
}

ordered_json regions_json(const std::vector<Region>& regions) {
  ordered_json out = ordered_json::array();
  for (const auto& r : regions) {
    ordered_json item;
    item["area_m2"] = r.area_m2;
    item["cells"] = r.cells;
    item["centroid_m"] = point_json(r.centroid);
    out.push_back(std::move(item));
  }
  return out;
}

ordered_json error_body(const std::string& code, const std::string& message,
                        const std::string& field_path = {}) {
  ordered_json out;
  out["code"] = code;
  out["message"] = message;
  if (!field_path.empty()) out["field_path"] = field_path;
  return out;
}

HttpResponse reply(int status, const ordered_json& body) { return {status, body.dump() + "\n"}; }

HttpResponse error_reply(int status, const std::string& code, const std::string& message,
                         const std::string& field_path = {}) {
  return reply(status, error_body(code, message, field_path));
}

json parse_body(const std::string& text) {
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) throw ValidationError("", "request body must be a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

void reject_unknown(const json& body, std::initializer_list<const char*> allowed,
                    const std::string& prefix = {}) {
  for (const auto& [key, _] : body.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(prefix + key, "unknown field");
  }
}

Scenario request_scenario(const json& body) {
  if (!body.contains("scenario")) throw ValidationError("scenario", "missing scenario");
  Scenario s = scenario_from_json(body.at("scenario"), "scenario");
  return s;
}

void check_size(const Scenario& s) {
  if (s.grid.cell_count() > kMaxRequestCells) {
    throw std::length_error("grid has " + std::to_string(s.grid.cell_count()) +
                            " cells; the request limit is " + std::to_string(kMaxRequestCells));
  }
}

template <typename T>
T field_as(const json& body, const char* key, const std::string& path, T fallback) {
  if (!body.contains(key)) return fallback;
  try {
    return body.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(path, "wrong type");
  }
}

PlacementObjective objective_from_json(const json& body) {
  PlacementObjective obj;
  if (!body.contains("objective")) return obj;
  const json& o = body.at("objective");
  if (!o.is_object()) throw ValidationError("objective", "must be an object");
  reject_unknown(o, {"leakage_penalty", "min_wall_clearance_m", "step_m"}, "objective.");
  obj.leakage_penalty =
      field_as<double>(o, "leakage_penalty", "objective.leakage_penalty", obj.leakage_penalty);
  obj.min_wall_clearance_m = field_as<double>(o, "min_wall_clearance_m",
                                              "objective.min_wall_clearance_m", obj.min_wall_clearance_m);
  obj.step_m = field_as<double>(o, "step_m", "objective.step_m", obj.step_m);
  obj.validate();
  return obj;
}

std::string hex_encode(const std::string& s) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (unsigned char c : s) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

std::optional<std::string> hex_decode(const std::string& s) {
  if (s.size() % 2) return std::nullopt;
  std::string out;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    int v = 0;
    for (std::size_t k = i; k < i + 2; ++k) {
      const char c = s[k];
      v <<= 4;
      if (c >= '0' && c <= '9') v |= c - '0';
      else if (c >= 'a' && c <= 'f') v |= c - 'a' + 10;
      else return std::nullopt;
    }
    out.push_back(static_cast<char>(v));
  }
  return out;
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

ordered_json field_payload(const Scenario& scenario, const ScalarField& field,
                           const CoverageReport& report) {
  ordered_json out;
  ordered_json grid;
  grid["origin_m"] = point_json(field.grid.origin);
  grid["width_m"] = field.grid.width_m;
  grid["height_m"] = field.grid.height_m;
  grid["resolution_m"] = field.grid.resolution_m;
  grid["rows"] = field.rows;
  grid["cols"] = field.cols;
  out["grid"] = std::move(grid);

  ordered_json values = ordered_json::array();
  ordered_json excluded = ordered_json::array();
  for (std::size_t i = 0; i < field.values_db.size(); ++i) {
    values.push_back(finite_or_null(field.values_db[i]));
    if (field.excluded[i]) excluded.push_back(i);
  }
  out["values_db"] = std::move(values);
  out["excluded"] = std::move(excluded);
  out["threshold_db"] = scenario.threshold_db;
  out["covered_area_m2"] = report.covered_area_m2;
  out["indoor_area_m2"] = report.indoor_area_m2;
  out["leakage_area_m2"] = optional_or_null(report.leakage_area_m2);
  out["component_count"] = report.component_count;
  out["raw_component_count"] = report.raw_component_count;
  out["regions"] = regions_json(report.regions);
  ordered_json contours = ordered_json::array();
  for (const auto& c : report.contours) {
    ordered_json pts = ordered_json::array();
    for (const auto& p : c) pts.push_back(point_json(p));
    contours.push_back(std::move(pts));
  }
  out["contours"] = std::move(contours);
  out["diagnostics"] = field.diagnostics;
  return out;
}

ordered_json sweep_payload(const SweepResult& result) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : result.rows) {
    ordered_json row;
    row["distance_m"] = r.distance_m;
    row["placement"] = placement_json(r.placement);
    row["indoor_area_m2"] = r.indoor_area_m2;
    row["leakage_area_m2"] = optional_or_null(r.leakage_area_m2);
    row["component_count"] = r.component_count;
    row["raw_component_count"] = r.raw_component_count;
    row["regions"] = regions_json(r.regions);
    rows.push_back(std::move(row));
  }
  ordered_json out;
  out["rows"] = std::move(rows);
  out["diagnostics"] = result.diagnostics;
  return out;
}

ordered_json optimization_payload(const OptimizationResult& result) {
  ordered_json out;
  out["feasible"] = result.feasible;
  if (!result.feasible) {
    out["reason"] = result.reason;
    out["candidate_count"] = result.candidate_count;
    return out;
  }
  out["placement"] = placement_json(result.placement);
  out["objective"] = result.objective;
  out["indoor_area_m2"] = result.report.indoor_area_m2;
  out["leakage_area_m2"] = optional_or_null(result.report.leakage_area_m2);
  out["component_count"] = result.report.component_count;
  out["topology"] = to_string(classify_topology(result.report));
  out["candidate_count"] = result.candidate_count;
  out["pairs_evaluated"] = result.pairs_evaluated;
  return out;
}

ScenarioStore::ScenarioStore(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::filesystem::create_directories(dir_);
}

std::mutex& ScenarioStore::lock_for(const std::string& name) const {
  std::lock_guard lock(table_mutex_);
  auto& slot = locks_[name];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::uint64_t ScenarioStore::read_version(const std::string& hex) const {
  std::ifstream in(dir_ / (hex + ".version"));
  std::uint64_t v = 0;
  if (in) in >> v;
  return v;
}

std::vector<ScenarioStore::Entry> ScenarioStore::list() const {
  std::vector<Entry> out;
  for (const auto& item : std::filesystem::directory_iterator(dir_)) {
    if (item.path().extension() != ".json") continue;
    const std::string hex = item.path().stem().string();
    const auto name = hex_decode(hex);
    if (!name) continue;
    out.push_back({*name, read_version(hex)});
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.name < b.name; });
  return out;
}

std::optional<std::pair<Scenario, std::uint64_t>> ScenarioStore::get(const std::string& name) const {
  std::lock_guard lock(lock_for(name));
  const std::string hex = hex_encode(name);
  const auto path = dir_ / (hex + ".json");
  if (!std::filesystem::exists(path)) return std::nullopt;
  return std::make_pair(load_scenario(path), read_version(hex));
}

std::optional<std::uint64_t> ScenarioStore::put(const std::string& name, const Scenario& scenario,
                                                std::optional<std::uint64_t> expected_version) {
  std::lock_guard lock(lock_for(name));
  const std::string hex = hex_encode(name);
  const bool exists = std::filesystem::exists(dir_ / (hex + ".json"));
  const std::uint64_t current = exists ? read_version(hex) : 0;
  if (expected_version && *expected_version != current) return std::nullopt;
  const std::uint64_t next = current + 1;
  write_atomically(dir_ / (hex + ".json"), scenario_to_string(scenario));
  write_atomically(dir_ / (hex + ".version"), std::to_string(next) + "\n");
  return next;
}

struct Service::Job {
  std::atomic<std::size_t> done{0};
  std::atomic<std::size_t> total{0};
  std::mutex mutex;
  std::string state = "running";
  ordered_json result;
  ordered_json error;
  std::jthread worker;
};

Service::Service(std::filesystem::path store_directory) : store_(std::move(store_directory)) {}

Service::~Service() {
  std::map<std::string, std::shared_ptr<Job>> jobs;
  {
    std::lock_guard lock(jobs_mutex_);
    jobs.swap(jobs_);
  }
  for (auto& [_, job] : jobs) {
    if (job->worker.joinable()) job->worker.join();
  }
}

HttpResponse Service::handle(const HttpRequest& request) {
  static const std::string scenarios_prefix = "/api/scenarios/";
  static const std::string jobs_prefix = "/api/jobs/";
  try {
    const std::string& m = request.method;
    const std::string& p = request.path;
    if (p == "/api/field") {
      if (m != "POST") return error_reply(405, "method_not_allowed", "use POST");
      return post_field(parse_body(request.body));
    }
    if (p == "/api/sweep") {
      if (m != "POST") return error_reply(405, "method_not_allowed", "use POST");
      return post_sweep(parse_body(request.body));
    }
    if (p == "/api/optimize") {
      if (m != "POST") return error_reply(405, "method_not_allowed", "use POST");
      return post_optimize(parse_body(request.body));
    }
    if (p == "/api/scenarios") {
      if (m != "GET") return error_reply(405, "method_not_allowed", "use GET");
      return list_scenarios();
    }
    if (p.starts_with(scenarios_prefix) && p.size() > scenarios_prefix.size()) {
      const std::string name = p.substr(scenarios_prefix.size());
      if (m == "GET") return get_scenario(name);
      if (m == "PUT") return put_scenario(name, parse_body(request.body));
      return error_reply(405, "method_not_allowed", "use GET or PUT");
    }
    if (p.starts_with(jobs_prefix) && p.size() > jobs_prefix.size()) {
      if (m != "GET") return error_reply(405, "method_not_allowed", "use GET");
      return get_job(p.substr(jobs_prefix.size()));
    }
    return error_reply(404, "not_found", "no route for " + p);
  } catch (const ValidationError& e) {
    return error_reply(400, "validation_error", e.message(), e.field_path());
  } catch (const ParseError& e) {
    return error_reply(400, "parse_error", e.what());
  } catch (const DomainError& e) {
    return error_reply(400, "domain_error", e.what());
  } catch (const std::length_error& e) {
    return error_reply(413, "grid_too_large", e.what(), "scenario.grid");
  } catch (const std::exception& e) {
    return error_reply(500, "internal_error", e.what());
  }
}

HttpResponse Service::post_field(const json& body) {
  reject_unknown(body, {"scenario", "contours"});
  const Scenario s = request_scenario(body);
  check_size(s);
  const bool contours = field_as<bool>(body, "contours", "contours", true);
  const ScalarField field = evaluate_field(s);
  const CoverageReport report = coverage_report(s, field, s.threshold_db, contours);
  return reply(200, field_payload(s, field, report));
}

HttpResponse Service::post_sweep(const json& body) {
  reject_unknown(body, {"scenario", "kind", "distances_m"});
  const Scenario s = request_scenario(body);
  check_size(s);
  const auto kind = field_as<std::string>(body, "kind", "kind", "");
  if (kind != "wall" && kind != "txrx") throw ValidationError("kind", "must be \"wall\" or \"txrx\"");
  if (!body.contains("distances_m")) throw ValidationError("distances_m", "missing distance list");
  const auto distances = field_as<std::vector<double>>(body, "distances_m", "distances_m", {});
  const SweepResult result =
      kind == "wall" ? sweep_wall_distance(s, distances) : sweep_txrx_distance(s, distances);
  return reply(200, sweep_payload(result));
}

HttpResponse Service::post_optimize(const json& body) {
  reject_unknown(body, {"scenario", "objective", "async"});
  const Scenario s = request_scenario(body);
  check_size(s);
  const PlacementObjective objective = objective_from_json(body);
  // Surfaces step/clearance problems before any work is queued.
  placement_candidates(s.room, objective);
  if (!field_as<bool>(body, "async", "async", false)) {
    return reply(200, optimization_payload(optimize_placement(s, objective)));
  }

  auto job = std::make_shared<Job>();
  std::string token;
  {
    std::lock_guard lock(jobs_mutex_);
    token = "job-" + std::to_string(next_job_++);
    jobs_[token] = job;
  }
  job->worker = std::jthread([job, s, objective] {
    try {
      auto result = optimize_placement(s, objective, [&](std::size_t done, std::size_t total) {
        job->total = total;
        job->done = done;
      });
      std::lock_guard lock(job->mutex);
      job->result = optimization_payload(result);
      job->state = "done";
    } catch (const std::exception& e) {
      std::lock_guard lock(job->mutex);
      job->error = error_body("internal_error", e.what());
      job->state = "failed";
    }
  });
  ordered_json out;
  out["token"] = token;
  out["status_url"] = "/api/jobs/" + token;
  return reply(202, out);
}

HttpResponse Service::get_job(const std::string& token) {
  std::shared_ptr<Job> job;
  {
    std::lock_guard lock(jobs_mutex_);
    const auto it = jobs_.find(token);
    if (it == jobs_.end()) return error_reply(404, "not_found", "unknown job " + token);
    job = it->second;
  }
  ordered_json out;
  out["token"] = token;
  std::lock_guard lock(job->mutex);
  out["state"] = job->state;
  out["done"] = job->done.load();
  out["total"] = job->total.load();
  if (job->state == "done") out["result"] = job->result;
  if (job->state == "failed") out["error"] = job->error;
  return reply(200, out);
}

HttpResponse Service::list_scenarios() {
  ordered_json items = ordered_json::array();
  for (const auto& e : store_.list()) {
    ordered_json item;
    item["name"] = e.name;
    item["version"] = e.version;
    items.push_back(std::move(item));
  }
  ordered_json out;
  out["scenarios"] = std::move(items);
  return reply(200, out);
}

HttpResponse Service::get_scenario(const std::string& name) {
  const auto found = store_.get(name);
  if (!found) return error_reply(404, "not_found", "unknown scenario " + name);
  ordered_json out;
  out["name"] = name;
  out["version"] = found->second;
  out["scenario"] = scenario_to_json(found->first);
  return reply(200, out);
}

HttpResponse Service::put_scenario(const std::string& name, const json& body) {
  reject_unknown(body, {"scenario", "expected_version"});
  const Scenario s = request_scenario(body);
  std::optional<std::uint64_t> expected;
  if (body.contains("expected_version")) {
    expected = field_as<std::uint64_t>(body, "expected_version", "expected_version", 0);
  }
  const auto version = store_.put(name, s, expected);
  if (!version) {
    return error_reply(409, "conflict", "stored version differs from expected_version",
                       "expected_version");
  }
  ordered_json out;
  out["name"] = name;
  out["version"] = *version;
  return reply(200, out);
}

void Service::mount(httplib::Server& server) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = handle({req.method, req.path, req.body});
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get(R"(/api/.*)", forward);
  server.Post(R"(/api/.*)", forward);
  server.Put(R"(/api/.*)", forward);
}

void Service::run(const std::string& host, int port) {
  httplib::Server server;
  mount(server);
  if (!server.listen(host, port)) {
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace wallsense
