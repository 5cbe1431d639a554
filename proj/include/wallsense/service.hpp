#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "wallsense/coverage.hpp"
#include "wallsense/placement.hpp"

namespace httplib {
class Server;
}

namespace wallsense {

/// Requests whose grid exceeds this many cells are rejected with 413.
inline constexpr std::size_t kMaxRequestCells = 1'000'000;

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// JSON payloads shared by the service and the CLI. Non-finite dB values are
/// written as null; excluded cells are also listed by index.
nlohmann::ordered_json field_payload(const Scenario& scenario, const ScalarField& field,
                                     const CoverageReport& report);
nlohmann::ordered_json sweep_payload(const SweepResult& result);
nlohmann::ordered_json optimization_payload(const OptimizationResult& result);

/// File-backed named scenarios. Names are opaque; file names are their hex
/// encoding. Each name carries a version that increments on every put.
class ScenarioStore {
 public:
  explicit ScenarioStore(std::filesystem::path directory);

  struct Entry {
    std::string name;
    std::uint64_t version = 0;
  };

  std::vector<Entry> list() const;
  /// Empty when the name is unknown.
  std::optional<std::pair<Scenario, std::uint64_t>> get(const std::string& name) const;
  /// Returns the new version, or nothing when `expected_version` does not match
  /// the stored one (0 for an absent name).
  std::optional<std::uint64_t> put(const std::string& name, const Scenario& scenario,
                                   std::optional<std::uint64_t> expected_version);

 private:
  std::mutex& lock_for(const std::string& name) const;
  std::uint64_t read_version(const std::string& hex) const;

  std::filesystem::path dir_;
  mutable std::mutex table_mutex_;
  mutable std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

class Service {
 public:
  explicit Service(std::filesystem::path store_directory);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Routes one request. Never throws; failures become {code, message, field_path?}.
  HttpResponse handle(const HttpRequest& request);

  /// Registers every /api route on `server`.
  void mount(httplib::Server& server);

  /// Blocks serving on host:port.
  void run(const std::string& host, int port);

 private:
  struct Job;

  HttpResponse post_field(const nlohmann::json& body);
  HttpResponse post_sweep(const nlohmann::json& body);
  HttpResponse post_optimize(const nlohmann::json& body);
  HttpResponse get_job(const std::string& token);
  HttpResponse list_scenarios();
  HttpResponse get_scenario(const std::string& name);
  HttpResponse put_scenario(const std::string& name, const nlohmann::json& body);

  ScenarioStore store_;
  std::mutex jobs_mutex_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::uint64_t next_job_ = 1;
};

}  // namespace wallsense
