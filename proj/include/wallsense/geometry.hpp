#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace wallsense {

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2D operator*(double s, Point2D p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2D a, Point2D b) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2D p) { return std::hypot(p.x, p.y); }
inline double distance(Point2D a, Point2D b) { return norm(a - b); }

struct WallSegment {
  Point2D a;
  Point2D b;
  bool reflective = false;

  double length() const { return distance(a, b); }
  /// Signed distance of `p` from the infinite line a→b; positive on the left.
  double signed_distance(Point2D p) const;

  friend bool operator==(const WallSegment&, const WallSegment&) = default;
};

/// Tolerance for a reflection point to count as lying on a finite wall.
inline constexpr double kOnSegmentTolerance = 1e-9;

/// Simple closed polygon; wall i runs from vertex i to vertex (i+1) mod n.
class RoomLayout {
 public:
  RoomLayout() = default;

  /// Validates simplicity, closure and that at least one wall is reflective.
  /// Throws ValidationError with a "room.*" field path.
  static RoomLayout from_vertices(std::vector<Point2D> vertices,
                                  std::vector<std::size_t> reflective_walls);

  const std::vector<Point2D>& vertices() const { return vertices_; }
  const std::vector<WallSegment>& walls() const { return walls_; }
  std::vector<std::size_t> reflective_indices() const;

  /// Strict interior test (points on the boundary are outside).
  bool contains(Point2D p) const;
  /// True when `p` lies strictly on the exterior side of wall `index`'s line.
  bool beyond_wall(std::size_t index, Point2D p) const;
  /// Smallest distance from `p` to any wall segment.
  double clearance(Point2D p) const;
  double signed_area() const;

  friend bool operator==(const RoomLayout&, const RoomLayout&) = default;

 private:
  std::vector<Point2D> vertices_;
  std::vector<WallSegment> walls_;
};

struct DevicePlacement {
  Point2D tx;
  Point2D rx;

  friend bool operator==(const DevicePlacement&, const DevicePlacement&) = default;
};

/// Throws ValidationError ("placement.*") unless both devices are strictly inside
/// the room and distinct.
void validate_placement(const RoomLayout& room, const DevicePlacement& placement);

struct ReflectedPath {
  double d1 = 0.0;  ///< device to wall
  double d2 = 0.0;  ///< wall to target
  Point2D reflection_point;
  bool valid = false;
};

/// Reflection of `p` across the infinite line through `wall`.
/// Throws DomainError for a zero-length wall.
Point2D mirror_point(Point2D p, const WallSegment& wall);

/// Single-bounce specular path device→wall→target built from the device's image.
/// Returns an invalid path when the endpoints straddle or touch the wall line, or
/// when the specular point falls outside the finite segment.
ReflectedPath reflected_path(Point2D device, Point2D target, const WallSegment& wall);

enum class PathSide { Tx, Rx };

struct ReflectedLeg {
  PathSide side = PathSide::Tx;
  std::size_t wall_index = 0;
  /// d1 is always the device–wall leg, d2 the wall–target leg.
  ReflectedPath path;
};

/// Distances of every dynamic path for one target position.
struct PathSet {
  double r_d = 0.0;
  double r_t = 0.0;
  double r_r = 0.0;
  std::vector<ReflectedLeg> reflected;
  /// Target coincides with a device; SSNR is unbounded there.
  bool singular = false;
};

/// Direct lengths plus Tx-side and Rx-side reflected legs for each reflective wall.
PathSet path_set(const DevicePlacement& placement, Point2D target, const RoomLayout& room);

}  // namespace wallsense
