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

#include "prmap/geometry.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "prmap/common.h"

namespace prmap {

double BearingDeg(const Vec2& from, const Vec2& to) {
  return NormalizeDeg(RadToDeg(std::atan2(to.y - from.y, to.x - from.x)));
}

Vec2 UnitVector(double bearing_deg) {
  const double rad = DegToRad(bearing_deg);
  return {std::cos(rad), std::sin(rad)};
}

double SignedArea(const Polygon& polygon) {
  double area = 0.0;
  const size_t n = polygon.size();
  for (size_t i = 0; i < n; ++i) {
    area += polygon[i].Cross(polygon[(i + 1) % n]);
  }
  return 0.5 * area;
}

namespace {

int Orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = (b - a).Cross(c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool OnSegment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool SegmentsIntersect(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                       const Vec2& q2) {
  const int o1 = Orientation(p1, p2, q1);
  const int o2 = Orientation(p1, p2, q2);
  const int o3 = Orientation(q1, q2, p1);
  const int o4 = Orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && OnSegment(p1, p2, q1)) return true;
  if (o2 == 0 && OnSegment(p1, p2, q2)) return true;
  if (o3 == 0 && OnSegment(q1, q2, p1)) return true;
  if (o4 == 0 && OnSegment(q1, q2, p2)) return true;
  return false;
}

double MinEdgeDistance(const Polygon& polygon, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  const size_t n = polygon.size();
  for (size_t i = 0; i < n; ++i) {
    best = std::min(best, DistanceToSegment(p, polygon[i], polygon[(i + 1) % n]));
  }
  return best;
}

void ValidatePolygon(const Polygon& polygon, const std::string& what) {
  if (polygon.size() < 3) {
    throw ValidationError(what + ": polygon needs at least 3 vertices, got " +
                          std::to_string(polygon.size()));
  }
  if (IsSelfIntersecting(polygon)) {
    throw ValidationError(what + ": polygon is self-intersecting");
  }
  if (SignedArea(polygon) == 0.0) {
    throw ValidationError(what + ": polygon has zero area");
  }
}

}  // namespace

bool IsSelfIntersecting(const Polygon& polygon) {
  const size_t n = polygon.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a1 = polygon[i];
    const Vec2& a2 = polygon[(i + 1) % n];
    if (a1 == a2) return true;
    for (size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (SegmentsIntersect(a1, a2, polygon[j], polygon[(j + 1) % n])) {
        return true;
      }
    }
  }
  return false;
}

double DistanceToSegment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.Dot(ab);
  double t = len2 > 0.0 ? (p - a).Dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + ab * t)).Norm();
}

bool PointInPolygon(const Polygon& polygon, const Vec2& p) {
  if (MinEdgeDistance(polygon, p) < 1e-9) return true;
  bool inside = false;
  const size_t n = polygon.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

Layout::Layout(Polygon perimeter, std::vector<Polygon> obstacles,
               double default_rrcs)
    : perimeter_(std::move(perimeter)),
      obstacles_(std::move(obstacles)),
      default_rrcs_(default_rrcs) {
  ValidatePolygon(perimeter_, "layout perimeter");
  if (SignedArea(perimeter_) < 0.0) {
    std::reverse(perimeter_.begin() + 1, perimeter_.end());
  }
  if (!(default_rrcs_ >= 0.0)) {
    throw ValidationError("layout: default_rrcs must be >= 0");
  }
  for (size_t k = 0; k < obstacles_.size(); ++k) {
    const std::string what = "layout obstacle " + std::to_string(k);
    ValidatePolygon(obstacles_[k], what);
    for (const Vec2& v : obstacles_[k]) {
      if (!PointInPolygon(perimeter_, v)) {
        throw ValidationError(what + ": vertex lies outside the perimeter");
      }
    }
  }
  const size_t n = perimeter_.size();
  cumulative_.resize(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) {
    cumulative_[i + 1] =
        cumulative_[i] + (perimeter_[(i + 1) % n] - perimeter_[i]).Norm();
  }
  perimeter_length_ = cumulative_[n];
  if (!(perimeter_length_ > 0.0)) {
    throw ValidationError("layout: perimeter length must be > 0");
  }
}

Vec2 Layout::PerimeterPoint(double s) const {
  s = std::fmod(s, perimeter_length_);
  if (s < 0.0) s += perimeter_length_;
  const size_t n = perimeter_.size();
  size_t i = std::upper_bound(cumulative_.begin(), cumulative_.end(), s) -
             cumulative_.begin() - 1;
  i = std::min(i, n - 1);
  const Vec2& a = perimeter_[i];
  const Vec2& b = perimeter_[(i + 1) % n];
  const double len = cumulative_[i + 1] - cumulative_[i];
  const double t = len > 0.0 ? (s - cumulative_[i]) / len : 0.0;
  return a + (b - a) * t;
}

Vec2 Layout::InwardNormal(double s) const {
  s = std::fmod(s, perimeter_length_);
  if (s < 0.0) s += perimeter_length_;
  const size_t n = perimeter_.size();
  size_t i = std::upper_bound(cumulative_.begin(), cumulative_.end(), s) -
             cumulative_.begin() - 1;
  i = std::min(i, n - 1);
  const Vec2 d = perimeter_[(i + 1) % n] - perimeter_[i];
  const double len = d.Norm();
  // Counter-clockwise winding keeps the interior on the left.
  return {-d.y / len, d.x / len};
}

GridMap::GridMap(Vec2 origin, double resolution, int width, int height)
    : origin_(origin), resolution_(resolution), width_(width), height_(height) {
  if (!(resolution_ > 0.0)) {
    throw ValidationError("grid: resolution must be > 0");
  }
  if (width_ < 1 || height_ < 1) {
    throw ValidationError("grid: width and height must be >= 1");
  }
  occupancy_.assign(static_cast<size_t>(width_) * height_, 0);
  rrcs_.assign(occupancy_.size(), 0.0);
}

Vec2 GridMap::CellCenter(int index) const {
  const int ix = index % width_;
  const int iy = index / width_;
  return {origin_.x + (ix + 0.5) * resolution_,
          origin_.y + (iy + 0.5) * resolution_};
}

int GridMap::CellAt(const Vec2& p) const {
  const double fx = std::floor((p.x - origin_.x) / resolution_);
  const double fy = std::floor((p.y - origin_.y) / resolution_);
  if (fx < 0 || fy < 0 || fx >= width_ || fy >= height_) return -1;
  return Index(static_cast<int>(fx), static_cast<int>(fy));
}

bool GridMap::Contains(const Vec2& p) const { return CellAt(p) >= 0; }

void GridMap::SetCell(int index, bool occupied, double rrcs) {
  occupancy_[index] = occupied ? 1 : 0;
  rrcs_[index] = occupied ? rrcs : 0.0;
}

GridMap RasterizeLayout(const Layout& layout, double resolution,
                        double default_rrcs) {
  if (!(resolution > 0.0)) {
    throw ValidationError("rasterize: resolution must be > 0");
  }
  Vec2 lo = layout.perimeter().front();
  Vec2 hi = lo;
  for (const Vec2& v : layout.perimeter()) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  const int width =
      std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / resolution - 1e-9)));
  const int height =
      std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / resolution - 1e-9)));
  GridMap map(lo, resolution, width, height);
  const double reach = 0.5 * resolution * (1.0 + 1e-9);
  for (int i = 0; i < map.num_cells(); ++i) {
    const Vec2 c = map.CellCenter(i);
    bool hit = MinEdgeDistance(layout.perimeter(), c) <= reach;
    for (const Polygon& obstacle : layout.obstacles()) {
      if (hit) break;
      hit = MinEdgeDistance(obstacle, c) <= reach;
    }
    if (hit) map.SetCell(i, true, default_rrcs);
  }
  return map;
}

GridMap RasterizeLayout(const Layout& layout, double resolution) {
  return RasterizeLayout(layout, resolution, layout.default_rrcs());
}

std::optional<RayHit> RayCast(const GridMap& map, const Pose& pose,
                              double direction_deg) {
  const int start = map.CellAt(pose.position);
  if (start < 0) {
    throw ValidationError("ray_cast: pose lies outside the grid");
  }
  const double res = map.resolution();
  const Vec2 p = pose.position - map.origin();
  const Vec2 u = UnitVector(direction_deg);
  const double dx = std::abs(u.x) < 1e-15 ? 0.0 : u.x;
  const double dy = std::abs(u.y) < 1e-15 ? 0.0 : u.y;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  int ix = start % map.width();
  int iy = start / map.width();
  const int step_x = dx > 0.0 ? 1 : -1;
  const int step_y = dy > 0.0 ? 1 : -1;
  double t_max_x = dx > 0.0   ? ((ix + 1) * res - p.x) / dx
                   : dx < 0.0 ? (ix * res - p.x) / dx
                              : kInf;
  double t_max_y = dy > 0.0   ? ((iy + 1) * res - p.y) / dy
                   : dy < 0.0 ? (iy * res - p.y) / dy
                              : kInf;
  const double t_delta_x = dx != 0.0 ? res / std::abs(dx) : kInf;
  const double t_delta_y = dy != 0.0 ? res / std::abs(dy) : kInf;
  // A cell center is at most res/sqrt(2) from any point of the cell.
  const double half_diag = res * 0.70710678118654757 * (1.0 + 1e-12);
  const double tie_tol = 1e-12 * res;

  std::optional<RayHit> best;
  double t_entry = 0.0;
  while (ix >= 0 && iy >= 0 && ix < map.width() && iy < map.height()) {
    if (best && t_entry > best->distance + half_diag) break;
    const int idx = map.Index(ix, iy);
    if (map.occupied(idx)) {
      const double d = (map.CellCenter(idx) - pose.position).Norm();
      if (!best || d < best->distance ||
          (d == best->distance && idx < best->cell)) {
        best = RayHit{idx, d};
      }
    }
    if (std::abs(t_max_x - t_max_y) <= tie_tol) {
      // Passing exactly through a corner: the side cells are only touched.
      t_entry = t_max_x;
      ix += step_x;
      iy += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      t_entry = t_max_x;
      ix += step_x;
      t_max_x += t_delta_x;
    } else {
      t_entry = t_max_y;
      iy += step_y;
      t_max_y += t_delta_y;
    }
  }
  return best;
}

PerimeterProjection ProjectOntoPerimeter(const Layout& layout, const Vec2& p) {
  if (!layout.Contains(p)) {
    throw ValidationError("perimeter_projection: point lies outside the perimeter");
  }
  const Polygon& poly = layout.perimeter();
  const size_t n = poly.size();
  double best_d = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double cumulative = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Vec2 ab = b - a;
    const double len = ab.Norm();
    double t = len > 0.0 ? (p - a).Dot(ab) / (len * len) : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double d = (p - (a + ab * t)).Norm();
    if (d < best_d) {
      best_d = d;
      best_s = cumulative + t * len;
    }
    cumulative += len;
  }
  const double length = layout.perimeter_length();
  if (best_s >= length) best_s -= length;
  return {best_d, best_s};
}

bool RayIntersectsCell(const GridMap& map, int cell, const Vec2& origin,
                       double direction_deg, double* entry_t) {
  const double res = map.resolution();
  const Vec2 c = map.CellCenter(cell);
  const Vec2 lo{c.x - 0.5 * res, c.y - 0.5 * res};
  const Vec2 hi{c.x + 0.5 * res, c.y + 0.5 * res};
  const Vec2 u = UnitVector(direction_deg);
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  const double o[2] = {origin.x, origin.y};
  const double d[2] = {std::abs(u.x) < 1e-15 ? 0.0 : u.x,
                       std::abs(u.y) < 1e-15 ? 0.0 : u.y};
  const double l[2] = {lo.x, lo.y};
  const double h[2] = {hi.x, hi.y};
  for (int a = 0; a < 2; ++a) {
    if (d[a] == 0.0) {
      if (o[a] <= l[a] || o[a] >= h[a]) return false;
      continue;
    }
    double ta = (l[a] - o[a]) / d[a];
    double tb = (h[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t1 - t0 <= 1e-9 * res) return false;
  if (entry_t != nullptr) *entry_t = t0;
  return true;
}

namespace {

// Shared by the brute-force and cached shell queries so both produce
// identical weights for identical cells.
void AppendShellCell(double steering_deg,
                     const ArrayPattern& pattern, double min_weight, int cell,
                     double distance, double bearing,
                     std::vector<ShellCell>* out) {
  const double w = TwoWayGain(pattern, bearing - steering_deg);
  if (w > 0.0 && w >= min_weight) {
    out->push_back({cell, w, bearing, distance});
  }
}

std::vector<ShellCell> DeltaShell(const GridMap& map, const Pose& pose,
                                  double steering_deg,
                                  const std::vector<ShellCell>& candidates) {
  const Vec2 u = UnitVector(steering_deg);
  const ShellCell* best = nullptr;
  double best_offset = 0.0;
  for (const ShellCell& c : candidates) {
    if (!RayIntersectsCell(map, c.cell, pose.position, steering_deg)) continue;
    const double offset =
        std::abs((map.CellCenter(c.cell) - pose.position).Cross(u));
    if (best == nullptr || offset < best_offset ||
        (offset == best_offset && c.cell < best->cell)) {
      best = &c;
      best_offset = offset;
    }
  }
  if (best == nullptr) return {};
  ShellCell out = *best;
  out.weight = 1.0;
  return {out};
}

}  // namespace

std::vector<ShellCell> CellsInShell(const GridMap& map, const Pose& pose,
                                    double steering_deg,
                                    const ArrayPattern& pattern, double r_lo,
                                    double r_hi, double floor) {
  if (!map.Contains(pose.position)) {
    throw ValidationError("cells_in_shell: pose lies outside the grid");
  }
  if (!(r_lo >= 0.0) || !(r_hi > r_lo)) {
    throw ValidationError("cells_in_shell: need 0 <= r_lo < r_hi");
  }
  std::vector<ShellCell> out;
  const double min_weight = floor * pattern.PeakTwoWayGain();
  for (int i = 0; i < map.num_cells(); ++i) {
    const Vec2 c = map.CellCenter(i);
    const double d = (c - pose.position).Norm();
    if (d < r_lo || d >= r_hi) continue;
    const double bearing = BearingDeg(pose.position, c);
    if (pattern.is_delta()) {
      out.push_back({i, 1.0, bearing, d});
    } else {
      AppendShellCell(steering_deg, pattern, min_weight, i, d, bearing,
                      &out);
    }
  }
  if (pattern.is_delta()) return DeltaShell(map, pose, steering_deg, out);
  return out;
}

PoseGeometry::PoseGeometry(const GridMap& map, const Pose& pose)
    : map_(&map), pose_(pose) {
  if (!map.Contains(pose.position)) {
    throw ValidationError("pose lies outside the grid");
  }
  const int n = map.num_cells();
  distance_.resize(n);
  bearing_.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec2 c = map.CellCenter(i);
    distance_[i] = (c - pose.position).Norm();
    bearing_[i] = BearingDeg(pose.position, c);
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](int a, int b) { return distance_[a] < distance_[b]; });
  sorted_distance_.resize(n);
  for (int k = 0; k < n; ++k) sorted_distance_[k] = distance_[order_[k]];
}

std::vector<ShellCell> PoseGeometry::ShellCells(double steering_deg,
                                                const ArrayPattern& pattern,
                                                double r_lo, double r_hi,
                                                double floor) const {
  std::vector<ShellCell> out;
  const double min_weight = floor * pattern.PeakTwoWayGain();
  auto it = std::lower_bound(sorted_distance_.begin(), sorted_distance_.end(),
                             r_lo);
  for (size_t k = it - sorted_distance_.begin();
       k < sorted_distance_.size() && sorted_distance_[k] < r_hi; ++k) {
    const int cell = order_[k];
    if (pattern.is_delta()) {
      out.push_back({cell, 1.0, bearing_[cell], distance_[cell]});
    } else {
      AppendShellCell(steering_deg, pattern, min_weight, cell,
                      distance_[cell], bearing_[cell], &out);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ShellCell& a, const ShellCell& b) { return a.cell < b.cell; });
  if (pattern.is_delta()) return DeltaShell(*map_, pose_, steering_deg, out);
  return out;
}

}  // namespace prmap
