#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wallsense/coverage.hpp"
#include "wallsense/coverage_io.hpp"
#include "wallsense/csiproc.hpp"
#include "wallsense/error.hpp"
#include "wallsense/placement.hpp"
#include "wallsense/scenario.hpp"
#include "wallsense/service.hpp"

namespace {

using namespace wallsense;

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
  std::string scenario_path;
  std::optional<double> threshold_db;
  std::optional<double> resolution_m;
  std::optional<std::string> mode;
  std::optional<double> scale;
  std::optional<double> ptx_w, gain_tx, gain_rx, wavelength_m, rcs_m2, wall_reflection, gamma,
      floor_w;

  void attach(CLI::App* app) {
    app->add_option("--scenario", scenario_path, "Scenario JSON (default: canonical scenario)");
    app->add_option("--threshold-db", threshold_db, "Minimum SSNR for coverage");
    app->add_option("--resolution", resolution_m, "Grid cell size in metres");
    app->add_option("--mode", mode, "simplified|full")->check(CLI::IsMember({"simplified", "full"}));
    app->add_option("--scale", scale, "Multiplier of the simplified model");
    app->add_option("--ptx-w", ptx_w, "Transmit power");
    app->add_option("--gain-tx", gain_tx, "Transmit antenna gain");
    app->add_option("--gain-rx", gain_rx, "Receive antenna gain");
    app->add_option("--wavelength-m", wavelength_m, "Carrier wavelength");
    app->add_option("--rcs-m2", rcs_m2, "Target radar cross section");
    app->add_option("--wall-reflection", wall_reflection, "Wall amplitude reflection coefficient");
    app->add_option("--gamma", gamma, "Interference fraction of LoS power");
    app->add_option("--floor-w", floor_w, "Interference floor");
  }

  Scenario resolve() const {
    Scenario s = scenario_path.empty() ? Scenario::canonical() : load_scenario(scenario_path);
    if (threshold_db) s.threshold_db = *threshold_db;
    if (resolution_m) s.grid.resolution_m = *resolution_m;
    if (mode) s.model.mode = *mode == "full" ? ModelMode::Full : ModelMode::Simplified;
    if (scale) s.model.scale = *scale;
    auto set = [](const std::optional<double>& v, double& target) {
      if (v) target = *v;
    };
    RfParameters& rf = s.model.rf;
    set(ptx_w, rf.ptx_w);
    set(gain_tx, rf.gain_tx);
    set(gain_rx, rf.gain_rx);
    set(wavelength_m, rf.wavelength_m);
    set(rcs_m2, rf.rcs_m2);
    set(wall_reflection, rf.wall_reflection);
    set(gamma, rf.gamma);
    set(floor_w, rf.floor_w);
    s.validate();
    return s;
  }
};

// Writes to --out when given, stdout otherwise.
template <typename Fn>
void emit(const std::string& out_path, Fn&& write) {
  if (out_path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
  write(out);
  if (!out) throw std::runtime_error("write failed: " + out_path);
}

void print_diagnostics(const std::vector<std::string>& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << "warning: " << d << '\n';
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<double> read_column(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto col = static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  if (col == header.size()) throw ParseError("missing column " + name, 1);
  std::vector<double> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t k = 0; k <= col; ++k) {
      if (!std::getline(ss, cell, ',')) throw ParseError("missing column " + name, line_no);
    }
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw ParseError("invalid number '" + cell + "'", line_no);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wall-aware Wi-Fi sensing coverage planner"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string out_path;

  auto* field = app.add_subcommand("field", "Evaluate the SSNR field (CSV, or PGM when --out ends in .pgm)");
  overrides.attach(field);
  field->add_option("--out", out_path, "Output path (default stdout)");
  std::optional<double> pgm_min, pgm_max;
  field->add_option("--pgm-min-db", pgm_min, "Lower end of the PGM mapping (default threshold - 20)");
  field->add_option("--pgm-max-db", pgm_max, "Upper end of the PGM mapping (default threshold + 20)");

  auto* boundary = app.add_subcommand("boundary", "Smoothed coverage contours as CSV");
  overrides.attach(boundary);
  boundary->add_option("--out", out_path, "Output path (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "Coverage versus device distance");
  std::string sweep_kind;
  std::vector<double> distances;
  sweep->add_option("kind", sweep_kind, "wall|txrx")->required()->check(CLI::IsMember({"wall", "txrx"}));
  sweep->add_option("--distances", distances, "Comma-separated distances in metres")
      ->required()
      ->delimiter(',');
  overrides.attach(sweep);
  sweep->add_option("--out", out_path, "Output path (default stdout)");

  auto* optimize = app.add_subcommand("optimize", "Exhaustive Tx/Rx placement search (JSON result)");
  PlacementObjective objective;
  overrides.attach(optimize);
  optimize->add_option("--leakage-penalty", objective.leakage_penalty, "Weight of leakage area");
  optimize->add_option("--min-clearance", objective.min_wall_clearance_m, "Minimum device-to-wall distance");
  optimize->add_option("--step", objective.step_m, "Candidate lattice spacing in metres");
  optimize->add_option("--out", out_path, "Output path (default stdout)");

  auto* respire = app.add_subcommand("respire", "Respiration rate per window from a CSI trace");
  std::string trace_path;
  double window_s = 30.0;
  std::optional<std::size_t> subcarrier;
  csi::FilterConfig filter;
  respire->add_option("--trace", trace_path, "Trace CSV (time_s,sc_0,...[,truth_bpm])")->required();
  respire->add_option("--window-s", window_s, "Analysis window in seconds");
  respire->add_option("--subcarrier", subcarrier, "Subcarrier index (default: highest variance)");
  respire->add_option("--hampel-half-window", filter.hampel_half_window);
  respire->add_option("--hampel-sigma", filter.hampel_n_sigma);
  respire->add_option("--sg-window", filter.sg_window);
  respire->add_option("--sg-order", filter.sg_polyorder);
  respire->add_option("--peak-distance-s", filter.peak_min_distance_s);
  respire->add_option("--prominence-factor", filter.prominence_factor);
  respire->add_option("--out", out_path, "Output path (default stdout)");

  auto* fit = app.add_subcommand("ssnr-fit", "Least-squares scale between measured and simulated SSNR");
  std::string fit_path;
  fit->add_option("--input", fit_path, "CSV with columns measured,simulated")->required();
  fit->add_option("--out", out_path, "Output path (default stdout)");

  auto* serve = app.add_subcommand("serve", "Start the HTTP/JSON service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store = "scenarios";
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--store", store, "Directory of the scenario store");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*field) {
      const Scenario s = overrides.resolve();
      const ScalarField f = evaluate_field(s);
      print_diagnostics(f.diagnostics);
      if (ends_with(out_path, ".pgm")) {
        write_field_pgm(out_path, f,
                        {pgm_min.value_or(s.threshold_db - 20.0), pgm_max.value_or(s.threshold_db + 20.0)});
      } else {
        emit(out_path, [&](std::ostream& o) { write_field_csv(o, f); });
      }
    } else if (*boundary) {
      const Scenario s = overrides.resolve();
      const ScalarField f = evaluate_field(s);
      print_diagnostics(f.diagnostics);
      const CoverageReport r = coverage_report(s, f, s.threshold_db);
      emit(out_path, [&](std::ostream& o) { write_contours_csv(o, r.contours); });
    } else if (*sweep) {
      const Scenario s = overrides.resolve();
      const SweepResult r = sweep_kind == "wall" ? sweep_wall_distance(s, distances)
                                                 : sweep_txrx_distance(s, distances);
      print_diagnostics(r.diagnostics);
      emit(out_path, [&](std::ostream& o) { write_sweep_csv(o, r); });
    } else if (*optimize) {
      const Scenario s = overrides.resolve();
      const OptimizationResult r = optimize_placement(s, objective);
      emit(out_path, [&](std::ostream& o) { o << optimization_payload(r).dump(2) << '\n'; });
      if (!r.feasible) std::cerr << "infeasible: " << r.reason << '\n';
    } else if (*respire) {
      std::ifstream in(trace_path);
      if (!in) throw std::runtime_error("cannot open " + trace_path);
      const csi::CsiTrace trace = csi::read_trace_csv(in);
      const double t0 = trace.timestamps_s.front();
      const double span = trace.timestamps_s.back() - t0;
      if (span < window_s) throw ValidationError("window_s", "trace is shorter than the window");
      std::vector<double> est, truth;
      std::ostringstream rows;
      rows << "window_start_s,rate_bpm,truth_bpm\n";
      for (double start = t0; start + window_s <= t0 + span + 1e-9; start += window_s) {
        const auto r = csi::respiration_rate(trace, subcarrier, window_s, filter, start);
        rows << format_double(start) << ',' << (r.rate_bpm ? format_double(*r.rate_bpm) : "") << ',';
        if (!trace.truth_bpm.empty()) {
          double sum = 0.0;
          std::size_t count = 0;
          for (std::size_t i = r.window_start_sample; i < trace.samples() &&
                                                      trace.timestamps_s[i] < start + window_s; ++i) {
            sum += trace.truth_bpm[i];
            ++count;
          }
          const double ref = sum / static_cast<double>(count);
          rows << format_double(ref);
          if (r.rate_bpm) {
            est.push_back(*r.rate_bpm);
            truth.push_back(ref);
          }
        }
        rows << '\n';
      }
      emit(out_path, [&](std::ostream& o) { o << rows.str(); });
      if (!est.empty()) {
        std::cerr << "mae_bpm " << format_double(csi::mean_absolute_error(est, truth)) << " over "
                  << est.size() << " windows\n";
      }
    } else if (*fit) {
      const auto measured = read_column(fit_path, "measured");
      const auto simulated = read_column(fit_path, "simulated");
      const csi::ScaleFit r = csi::fit_model_scale(measured, simulated);
      emit(out_path, [&](std::ostream& o) {
        o << "scale,rms_residual\n" << format_double(r.scale) << ',' << format_double(r.rms_residual) << '\n';
      });
    } else if (*serve) {
      Service service(store);
      std::cerr << "listening on http://" << host << ':' << port << '\n';
      service.run(host, port);
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
