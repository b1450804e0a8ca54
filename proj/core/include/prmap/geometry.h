/*
 * Copyright 2026 The prmap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRMAP_GEOMETRY_H_
#define PRMAP_GEOMETRY_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "prmap/array.h"
#include "prmap/common.h"

namespace prmap {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;
  double Dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double Cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double Norm() const { return std::hypot(x, y); }
};

// Absolute bearing of `to` seen from `from`, degrees in [0, 360).
double BearingDeg(const Vec2& from, const Vec2& to);
Vec2 UnitVector(double bearing_deg);

using Polygon = std::vector<Vec2>;

double SignedArea(const Polygon& polygon);
bool IsSelfIntersecting(const Polygon& polygon);
// Boundary points count as inside.
bool PointInPolygon(const Polygon& polygon, const Vec2& p);
double DistanceToSegment(const Vec2& p, const Vec2& a, const Vec2& b);

// Indoor environment. The perimeter is stored counter-clockwise with the
// caller's vertex 0 kept first; obstacles lie inside it.
class Layout {
 public:
  // Throws ValidationError on fewer than 3 vertices, self-intersection, or an
  // obstacle that leaves the perimeter.
  Layout(Polygon perimeter, std::vector<Polygon> obstacles = {},
         double default_rrcs = 1.0);

  const Polygon& perimeter() const { return perimeter_; }
  const std::vector<Polygon>& obstacles() const { return obstacles_; }
  double default_rrcs() const { return default_rrcs_; }
  double perimeter_length() const { return perimeter_length_; }

  // Point at arc-length s (taken modulo the perimeter length).
  Vec2 PerimeterPoint(double s) const;
  // Unit normal pointing into the enclosed area at arc-length s.
  Vec2 InwardNormal(double s) const;
  bool Contains(const Vec2& p) const { return PointInPolygon(perimeter_, p); }

 private:
  Polygon perimeter_;
  std::vector<Polygon> obstacles_;
  double default_rrcs_;
  double perimeter_length_ = 0.0;
  // cumulative_[i] is the arc-length at vertex i.
  std::vector<double> cumulative_;
};

struct Pose {
  Vec2 position;
  double heading_deg = 0.0;

  Pose() = default;
  Pose(Vec2 p, double heading)
      : position(p), heading_deg(prmap::NormalizeDeg(heading)) {}
};

// Row-major cell grid: index = iy * width + ix, cell (ix, iy) spans
// [origin + ix * res, origin + (ix + 1) * res) along x (same for y).
class GridMap {
 public:
  GridMap(Vec2 origin, double resolution, int width, int height);

  const Vec2& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  int width() const { return width_; }
  int height() const { return height_; }
  int num_cells() const { return width_ * height_; }

  Vec2 CellCenter(int index) const;
  int Index(int ix, int iy) const { return iy * width_ + ix; }
  // -1 when the point lies outside the grid.
  int CellAt(const Vec2& p) const;
  bool Contains(const Vec2& p) const;

  bool occupied(int index) const { return occupancy_[index] != 0; }
  double rrcs(int index) const { return rrcs_[index]; }
  const std::vector<std::uint8_t>& occupancy() const { return occupancy_; }
  const std::vector<double>& rrcs() const { return rrcs_; }
  // Setting a cell free clears its RRCS.
  void SetCell(int index, bool occupied, double rrcs);

 private:
  Vec2 origin_;
  double resolution_;
  int width_;
  int height_;
  std::vector<std::uint8_t> occupancy_;
  std::vector<double> rrcs_;
};

// Cells whose center lies within resolution/2 of any polygon edge become
// occupied with `default_rrcs`. The grid covers the perimeter bounding box.
GridMap RasterizeLayout(const Layout& layout, double resolution,
                        double default_rrcs);
GridMap RasterizeLayout(const Layout& layout, double resolution);

struct RayHit {
  int cell;
  // Euclidean distance from the ray origin to the cell center.
  double distance;
};

// Exact cell traversal. Among the occupied cells the ray passes through, the
// one with the smallest center distance wins; ties go to the smaller index.
// Throws ValidationError if the pose lies outside the grid.
std::optional<RayHit> RayCast(const GridMap& map, const Pose& pose,
                              double direction_deg);

struct PerimeterProjection {
  // Distance to the closest perimeter edge.
  double distance;
  // Arc-length coordinate of the closest perimeter point, in [0, L).
  double arc_length;
};

// Throws ValidationError if the point lies outside the perimeter.
PerimeterProjection ProjectOntoPerimeter(const Layout& layout, const Vec2& p);

struct ShellCell {
  int cell;
  double weight;
  // Absolute bearing of the cell center from the pose.
  double bearing_deg;
  double distance;
};

inline constexpr double kDefaultShellFloor = 1e-6;

// Cells whose center distance lies in [r_lo, r_hi), weighted by the two-way
// gain at their bearing relative to `steering_deg` (absolute). Weights below
// floor * peak two-way gain are omitted. A delta pattern keeps at most the one
// traversed cell closest to the steering ray.
std::vector<ShellCell> CellsInShell(const GridMap& map, const Pose& pose,
                                    double steering_deg,
                                    const ArrayPattern& pattern, double r_lo,
                                    double r_hi,
                                    double floor = kDefaultShellFloor);

// Per-pose cache of cell ranges and bearings used by the mapping filters.
// ShellCells() returns the same set as CellsInShell for identical arguments.
class PoseGeometry {
 public:
  PoseGeometry(const GridMap& map, const Pose& pose);

  const Pose& pose() const { return pose_; }
  const GridMap& map() const { return *map_; }

  std::vector<ShellCell> ShellCells(double steering_deg,
                                    const ArrayPattern& pattern, double r_lo,
                                    double r_hi,
                                    double floor = kDefaultShellFloor) const;

  // Cells ordered by increasing center distance.
  const std::vector<int>& cells_by_range() const { return order_; }
  double distance(int cell) const { return distance_[cell]; }
  double bearing(int cell) const { return bearing_[cell]; }

 private:
  const GridMap* map_;
  Pose pose_;
  std::vector<int> order_;
  std::vector<double> sorted_distance_;
  std::vector<double> distance_;
  std::vector<double> bearing_;
};

// True when the ray from `origin` along `direction_deg` crosses the cell's
// interior; grazing a corner or an edge does not count.
bool RayIntersectsCell(const GridMap& map, int cell, const Vec2& origin,
                       double direction_deg, double* entry_t = nullptr);

}  // namespace prmap

#endif  // PRMAP_GEOMETRY_H_
