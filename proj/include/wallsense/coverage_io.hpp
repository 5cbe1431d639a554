#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "wallsense/coverage.hpp"

namespace wallsense {

/// Shortest decimal text that parses back to exactly `v` ("nan", "inf", "-inf"
/// for non-finite values).
std::string format_double(double v);

/// Header "x,y,ssnr_db", then one row per cell in row-major order.
void write_field_csv(std::ostream& out, const ScalarField& field);

/// Default PGM mapping range: threshold ± 20 dB.
struct PgmRange {
  double min_db;
  double max_db;
};

/// 16-bit binary PGM (P5, maxval 65535, big-endian), top image row = highest y.
/// dB values map linearly from [min_db, max_db] onto [1, 65535] with clamping;
/// excluded and non-finite cells are 0. The range is recorded in
/// `<path>.range.txt`.
void write_field_pgm(const std::filesystem::path& path, const ScalarField& field, PgmRange range);

/// Header "contour,vertex,x,y".
void write_contours_csv(std::ostream& out, const std::vector<Contour>& contours);

}  // namespace wallsense
