#include "wallsense/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "wallsense/error.hpp"

namespace wallsense {

namespace {

int orientation(Point2D a, Point2D b, Point2D c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point2D a, Point2D b, Point2D p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point2D p1, Point2D p2, Point2D q1, Point2D q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

double point_segment_distance(Point2D p, const WallSegment& w) {
  const Point2D ab = w.b - w.a;
  const double len2 = dot(ab, ab);
  const double t = std::clamp(dot(p - w.a, ab) / len2, 0.0, 1.0);
  return distance(p, w.a + t * ab);
}

}  // namespace

double WallSegment::signed_distance(Point2D p) const {
  const Point2D ab = b - a;
  return cross(ab, p - a) / norm(ab);
}

RoomLayout RoomLayout::from_vertices(std::vector<Point2D> vertices,
                                     std::vector<std::size_t> reflective_walls) {
  const std::size_t n = vertices.size();
  if (n < 3) throw ValidationError("room.vertices_m", "polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    if (!vertices[i].finite()) {
      throw ValidationError("room.vertices_m[" + std::to_string(i) + "]", "non-finite coordinate");
    }
  }
  if (reflective_walls.empty()) {
    throw ValidationError("room.reflective_walls", "at least one wall must be reflective");
  }

  RoomLayout room;
  room.walls_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    WallSegment w{vertices[i], vertices[(i + 1) % n], false};
    if (w.a == w.b) {
      throw ValidationError("room.vertices_m[" + std::to_string(i) + "]",
                            "zero-length wall (repeated vertex)");
    }
    room.walls_.push_back(w);
  }
  for (std::size_t idx : reflective_walls) {
    if (idx >= n) {
      throw ValidationError("room.reflective_walls",
                            "wall index " + std::to_string(idx) + " out of range");
    }
    room.walls_[idx].reflective = true;
  }

  // Non-adjacent edges must not touch; adjacent edges may only share their vertex.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const auto& wi = room.walls_[i];
      const auto& wj = room.walls_[j];
      if (adjacent) {
        // Collinear fold-back: the far endpoint of one lies on the other.
        const Point2D shared = (j == i + 1) ? wi.b : wi.a;
        const Point2D far_i = (j == i + 1) ? wi.a : wi.b;
        const Point2D far_j = (j == i + 1) ? wj.b : wj.a;
        if (orientation(far_i, shared, far_j) == 0 && dot(far_i - shared, far_j - shared) > 0.0) {
          throw ValidationError("room.vertices_m", "polygon folds back on itself at vertex " +
                                                       std::to_string((i + 1) % n));
        }
        continue;
      }
      if (segments_intersect(wi.a, wi.b, wj.a, wj.b)) {
        throw ValidationError("room.vertices_m", "polygon is self-intersecting (walls " +
                                                     std::to_string(i) + " and " +
                                                     std::to_string(j) + ")");
      }
    }
  }
  room.vertices_ = std::move(vertices);
  if (room.signed_area() == 0.0) throw ValidationError("room.vertices_m", "polygon has zero area");
  return room;
}

std::vector<std::size_t> RoomLayout::reflective_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < walls_.size(); ++i) {
    if (walls_[i].reflective) out.push_back(i);
  }
  return out;
}

double RoomLayout::signed_area() const {
  double s = 0.0;
  for (const auto& w : walls_) s += cross(w.a, w.b);
  return 0.5 * s;
}

bool RoomLayout::contains(Point2D p) const {
  for (const auto& w : walls_) {
    if (orientation(w.a, w.b, p) == 0 && on_segment(w.a, w.b, p)) return false;
  }
  bool inside = false;
  for (const auto& w : walls_) {
    const Point2D a = w.a;
    const Point2D b = w.b;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool RoomLayout::beyond_wall(std::size_t index, Point2D p) const {
  const double s = walls_.at(index).signed_distance(p);
  // Interior lies to the left of every wall of a counter-clockwise polygon.
  return signed_area() > 0.0 ? s < 0.0 : s > 0.0;
}

double RoomLayout::clearance(Point2D p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : walls_) best = std::min(best, point_segment_distance(p, w));
  return best;
}

void validate_placement(const RoomLayout& room, const DevicePlacement& placement) {
  if (!placement.tx.finite()) throw ValidationError("placement.tx_m", "non-finite coordinate");
  if (!placement.rx.finite()) throw ValidationError("placement.rx_m", "non-finite coordinate");
  if (placement.tx == placement.rx) {
    throw ValidationError("placement", "DevicePlacement: tx and rx coincide");
  }
  if (!room.contains(placement.tx)) {
    throw ValidationError("placement.tx_m", "transmitter is not strictly inside the room");
  }
  if (!room.contains(placement.rx)) {
    throw ValidationError("placement.rx_m", "receiver is not strictly inside the room");
  }
}

Point2D mirror_point(Point2D p, const WallSegment& wall) {
  const Point2D ab = wall.b - wall.a;
  const double len = norm(ab);
  if (!(len > 0.0)) throw DomainError("mirror_point: degenerate wall");
  const Point2D n{-ab.y / len, ab.x / len};
  const double s = dot(p - wall.a, n);
  return p - (2.0 * s) * n;
}

ReflectedPath reflected_path(Point2D device, Point2D target, const WallSegment& wall) {
  const Point2D image = mirror_point(device, wall);
  const double s_dev = wall.signed_distance(device);
  const double s_tgt = wall.signed_distance(target);
  ReflectedPath out;
  if (s_dev == 0.0 || s_tgt == 0.0 || (s_dev > 0.0) != (s_tgt > 0.0)) return out;

  // The image sits at -s_dev; the segment image→target crosses the line at t.
  const double t = s_dev / (s_dev + s_tgt);
  out.reflection_point = image + t * (target - image);

  const Point2D ab = wall.b - wall.a;
  const double len = norm(ab);
  const double along = dot(out.reflection_point - wall.a, ab) / len;
  if (along < -kOnSegmentTolerance || along > len + kOnSegmentTolerance) return out;

  out.d1 = distance(device, out.reflection_point);
  out.d2 = distance(out.reflection_point, target);
  out.valid = out.d1 > 0.0 && out.d2 > 0.0;
  return out;
}

PathSet path_set(const DevicePlacement& placement, Point2D target, const RoomLayout& room) {
  PathSet ps;
  ps.r_d = distance(placement.tx, placement.rx);
  ps.r_t = distance(placement.tx, target);
  ps.r_r = distance(placement.rx, target);
  ps.singular = !(ps.r_t > 0.0) || !(ps.r_r > 0.0);
  const auto& walls = room.walls();
  for (std::size_t i = 0; i < walls.size(); ++i) {
    if (!walls[i].reflective) continue;
    ps.reflected.push_back({PathSide::Tx, i, reflected_path(placement.tx, target, walls[i])});
    ps.reflected.push_back({PathSide::Rx, i, reflected_path(placement.rx, target, walls[i])});
  }
  return ps;
}

}  // namespace wallsense
