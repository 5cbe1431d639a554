#include "wallsense/coverage_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace wallsense {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_field_csv(std::ostream& out, const ScalarField& field) {
  out << "x,y,ssnr_db\n";
  for (std::size_t r = 0; r < field.rows; ++r) {
    for (std::size_t c = 0; c < field.cols; ++c) {
      const Point2D p = field.grid.cell_center(r, c);
      out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(field.at(r, c))
          << '\n';
    }
  }
}

void write_field_pgm(const std::filesystem::path& path, const ScalarField& field, PgmRange range) {
  if (!(range.max_db > range.min_db) || !std::isfinite(range.min_db) ||
      !std::isfinite(range.max_db)) {
    throw std::invalid_argument("PGM range must be finite with max > min");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << field.cols << ' ' << field.rows << "\n65535\n";
  for (std::size_t rr = field.rows; rr-- > 0;) {
    for (std::size_t c = 0; c < field.cols; ++c) {
      const double v = field.at(rr, c);
      std::uint16_t level = 0;
      if (!field.is_excluded(rr, c) && !std::isnan(v)) {
        const double t = std::clamp((v - range.min_db) / (range.max_db - range.min_db), 0.0, 1.0);
        level = static_cast<std::uint16_t>(1 + std::lround(t * 65534.0));
      }
      const char bytes[2] = {static_cast<char>(level >> 8), static_cast<char>(level & 0xff)};
      out.write(bytes, 2);
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());

  std::ofstream side(path.string() + ".range.txt", std::ios::trunc);
  if (!side) throw std::runtime_error("cannot write PGM range sidecar for " + path.string());
  side << "min_db " << format_double(range.min_db) << '\n'
       << "max_db " << format_double(range.max_db) << '\n'
       << "mapping level = 1 + round(65534 * clamp((db - min_db) / (max_db - min_db), 0, 1)); "
          "0 = excluded\n"
       << "origin_m " << format_double(field.grid.origin.x) << ' '
       << format_double(field.grid.origin.y) << '\n'
       << "resolution_m " << format_double(field.grid.resolution_m) << '\n';
}

void write_contours_csv(std::ostream& out, const std::vector<Contour>& contours) {
  out << "contour,vertex,x,y\n";
  for (std::size_t k = 0; k < contours.size(); ++k) {
    for (std::size_t i = 0; i < contours[k].size(); ++i) {
      out << k << ',' << i << ',' << format_double(contours[k][i].x) << ','
          << format_double(contours[k][i].y) << '\n';
    }
  }
}

}  // namespace wallsense
