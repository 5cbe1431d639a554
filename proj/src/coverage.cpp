#include "wallsense/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "wallsense/channel.hpp"
#include "wallsense/error.hpp"
#include "wallsense/parallel.hpp"

namespace wallsense {

std::size_t BoolGrid::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

ScalarField evaluate_field(const Scenario& scenario, const GridSpec& grid, std::size_t threads) {
  scenario.validate();
  grid.validate();

  ScalarField field;
  field.grid = grid;
  field.rows = grid.rows();
  field.cols = grid.cols();
  field.values_db.assign(field.rows * field.cols, std::numeric_limits<double>::quiet_NaN());
  field.excluded.assign(field.rows * field.cols, 0);
  if (grid.resolution_m > kCoarseResolutionWarning) {
    std::ostringstream msg;
    msg << "grid resolution " << grid.resolution_m << " m is coarser than "
        << kCoarseResolutionWarning << " m; boundaries will be unreliable";
    field.diagnostics.push_back(msg.str());
  }

  const double exclusion = scenario.exclusion_radius_m;
  detail::parallel_for(field.rows, [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t r = row_begin; r < row_end; ++r) {
      for (std::size_t c = 0; c < field.cols; ++c) {
        const Point2D target = grid.cell_center(r, c);
        const std::size_t idx = r * field.cols + c;
        const PathSet paths = path_set(scenario.placement, target, scenario.room);
        if (paths.singular || paths.r_t < exclusion || paths.r_r < exclusion) {
          field.excluded[idx] = 1;
          continue;
        }
        field.values_db[idx] = ssnr_db(scenario.model, paths);
      }
    }
  }, threads);
  return field;
}

BoolGrid threshold_mask(const ScalarField& field, double threshold_db) {
  if (std::isnan(threshold_db)) throw DomainError("threshold must not be NaN");
  BoolGrid mask(field.rows, field.cols);
  for (std::size_t i = 0; i < mask.cells.size(); ++i) {
    mask.cells[i] = !field.excluded[i] && field.values_db[i] >= threshold_db;
  }
  return mask;
}

namespace {

// Vertex keys use doubled center-index coordinates: center (c, r) is (2c, 2r),
// so every crossing lands on integer coordinates.
std::uint64_t vertex_key(std::int64_t x2, std::int64_t y2) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x2)) << 32) |
         static_cast<std::uint32_t>(y2);
}

struct Segment {
  std::int64_t x0, y0, x1, y1;
};

}  // namespace

std::vector<Contour> extract_boundary(const BoolGrid& mask, const GridSpec& grid) {
  const auto rows = static_cast<std::int64_t>(mask.rows);
  const auto cols = static_cast<std::int64_t>(mask.cols);
  if (rows == 0 || cols == 0) throw DomainError("extract_boundary: empty grid");

  auto covered = [&](std::int64_t c, std::int64_t r) {
    return c >= 0 && r >= 0 && c < cols && r < rows &&
           mask.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  };

  std::vector<Segment> segments;
  for (std::int64_t r = -1; r < rows; ++r) {
    for (std::int64_t c = -1; c < cols; ++c) {
      // Corners counter-clockwise from bottom-left; edge e joins corner e to e+1.
      const bool v[4] = {covered(c, r), covered(c + 1, r), covered(c + 1, r + 1), covered(c, r + 1)};
      if (v[0] == v[1] && v[1] == v[2] && v[2] == v[3]) continue;
      const std::int64_t mid[4][2] = {{2 * c + 1, 2 * r},
                                      {2 * c + 2, 2 * r + 1},
                                      {2 * c + 1, 2 * r + 2},
                                      {2 * c, 2 * r + 1}};
      for (int e = 0; e < 4; ++e) {
        const bool leaving = v[e] && !v[(e + 1) % 4];
        if (!leaving) continue;
        // The matching entry is the nearest one walking clockwise, which cuts off
        // the covered corners individually in the saddle case.
        for (int step = 1; step < 4; ++step) {
          const int k = (e - step + 4) % 4;
          if (!v[k] && v[(k + 1) % 4]) {
            segments.push_back({mid[e][0], mid[e][1], mid[k][0], mid[k][1]});
            break;
          }
        }
      }
    }
  }

  std::unordered_map<std::uint64_t, std::size_t> by_start;
  by_start.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    by_start.emplace(vertex_key(segments[i].x0, segments[i].y0), i);
  }

  auto to_world = [&](std::int64_t x2, std::int64_t y2) {
    return Point2D{grid.origin.x + (static_cast<double>(x2) / 2.0 + 0.5) * grid.resolution_m,
                   grid.origin.y + (static_cast<double>(y2) / 2.0 + 0.5) * grid.resolution_m};
  };

  std::vector<Contour> contours;
  std::vector<std::uint8_t> used(segments.size(), 0);
  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    Contour contour;
    std::size_t cur = start;
    while (!used[cur]) {
      used[cur] = 1;
      contour.push_back(to_world(segments[cur].x0, segments[cur].y0));
      const auto it = by_start.find(vertex_key(segments[cur].x1, segments[cur].y1));
      if (it == by_start.end()) throw std::logic_error("extract_boundary: open contour");
      cur = it->second;
    }
    contours.push_back(std::move(contour));
  }
  return contours;
}

Contour smooth_boundary(const Contour& contour, int window) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("smooth_boundary: window must be odd and >= 1");
  }
  if (contour.size() < 3) {
    throw std::invalid_argument("smooth_boundary: contour needs at least 3 vertices");
  }
  if (window == 1) return contour;
  const auto n = static_cast<std::ptrdiff_t>(contour.size());
  const std::ptrdiff_t half = window / 2;
  Contour out(contour.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Point2D sum{0.0, 0.0};
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      sum = sum + contour[static_cast<std::size_t>(((i + k) % n + n) % n)];
    }
    out[static_cast<std::size_t>(i)] = (1.0 / window) * sum;
  }
  return out;
}

double contour_length(const Contour& contour) {
  double len = 0.0;
  for (std::size_t i = 0; i < contour.size(); ++i) {
    len += distance(contour[i], contour[(i + 1) % contour.size()]);
  }
  return len;
}

double contour_signed_area(const Contour& contour) {
  double s = 0.0;
  for (std::size_t i = 0; i < contour.size(); ++i) {
    s += cross(contour[i], contour[(i + 1) % contour.size()]);
  }
  return 0.5 * s;
}

ComponentLabels label_components(const BoolGrid& mask) {
  ComponentLabels out;
  out.labels.assign(mask.cells.size(), -1);
  std::deque<std::size_t> queue;
  for (std::size_t seed = 0; seed < mask.cells.size(); ++seed) {
    if (!mask.cells[seed] || out.labels[seed] >= 0) continue;
    const int label = static_cast<int>(out.sizes.size());
    std::size_t size = 0;
    out.labels[seed] = label;
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t idx = queue.front();
      queue.pop_front();
      ++size;
      const std::size_t r = idx / mask.cols;
      const std::size_t c = idx % mask.cols;
      auto visit = [&](std::size_t n) {
        if (mask.cells[n] && out.labels[n] < 0) {
          out.labels[n] = label;
          queue.push_back(n);
        }
      };
      if (c > 0) visit(idx - 1);
      if (c + 1 < mask.cols) visit(idx + 1);
      if (r > 0) visit(idx - mask.cols);
      if (r + 1 < mask.rows) visit(idx + mask.cols);
    }
    out.sizes.push_back(size);
  }
  return out;
}

CoverageReport coverage_report(const Scenario& scenario, const ScalarField& field,
                               double threshold_db, bool with_contours) {
  CoverageReport report;
  report.mask = threshold_mask(field, threshold_db);
  const GridSpec& grid = field.grid;
  const double cell_area = grid.cell_area();
  const auto reflective = scenario.room.reflective_indices();

  std::size_t covered = 0;
  std::size_t indoor = 0;
  std::size_t leakage = 0;
  bool any_beyond = false;
  for (std::size_t r = 0; r < field.rows; ++r) {
    for (std::size_t c = 0; c < field.cols; ++c) {
      const Point2D p = grid.cell_center(r, c);
      const bool inside = scenario.room.contains(p);
      bool beyond = false;
      if (!inside) {
        for (std::size_t w : reflective) beyond = beyond || scenario.room.beyond_wall(w, p);
      }
      any_beyond = any_beyond || beyond;
      if (!report.mask.at(r, c)) continue;
      ++covered;
      if (inside) ++indoor;
      if (beyond) ++leakage;
    }
  }
  report.covered_area_m2 = static_cast<double>(covered) * cell_area;
  report.indoor_area_m2 = static_cast<double>(indoor) * cell_area;
  if (any_beyond) report.leakage_area_m2 = static_cast<double>(leakage) * cell_area;

  const ComponentLabels comps = label_components(report.mask);
  report.raw_component_count = comps.sizes.size();
  std::vector<Point2D> sums(comps.sizes.size(), Point2D{0.0, 0.0});
  for (std::size_t i = 0; i < comps.labels.size(); ++i) {
    if (comps.labels[i] < 0) continue;
    auto& s = sums[static_cast<std::size_t>(comps.labels[i])];
    s = s + grid.cell_center(i / field.cols, i % field.cols);
  }
  for (std::size_t k = 0; k < comps.sizes.size(); ++k) {
    const double area = static_cast<double>(comps.sizes[k]) * cell_area;
    if (area < scenario.min_region_area_m2) continue;
    report.regions.push_back(
        {area, comps.sizes[k], (1.0 / static_cast<double>(comps.sizes[k])) * sums[k]});
  }
  report.component_count = report.regions.size();

  if (!with_contours) return report;
  // Exclusion discs bordering covered cells are filled so they do not show up
  // as holes around the devices.
  BoolGrid excluded(field.rows, field.cols);
  excluded.cells = field.excluded;
  const ComponentLabels discs = label_components(excluded);
  std::vector<std::uint8_t> touches(discs.sizes.size(), 0);
  for (std::size_t i = 0; i < discs.labels.size(); ++i) {
    if (discs.labels[i] < 0) continue;
    const std::size_t r = i / field.cols;
    const std::size_t c = i % field.cols;
    const bool near = (c > 0 && report.mask.cells[i - 1]) ||
                      (c + 1 < field.cols && report.mask.cells[i + 1]) ||
                      (r > 0 && report.mask.cells[i - field.cols]) ||
                      (r + 1 < field.rows && report.mask.cells[i + field.cols]);
    if (near) touches[static_cast<std::size_t>(discs.labels[i])] = 1;
  }
  BoolGrid outline = report.mask;
  for (std::size_t i = 0; i < outline.cells.size(); ++i) {
    if (discs.labels[i] >= 0 && touches[static_cast<std::size_t>(discs.labels[i])]) outline.cells[i] = 1;
  }
  if (outline.count() > 0) {
    for (auto& contour : extract_boundary(outline, grid)) {
      report.contours.push_back(smooth_boundary(contour, scenario.smoothing_window));
    }
  }
  return report;
}

}  // namespace wallsense
