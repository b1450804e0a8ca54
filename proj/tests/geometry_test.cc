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

#include <cmath>
#include <limits>
#include <random>

#include "gtest/gtest.h"

namespace prmap {
namespace {

Layout Square(double side) {
  return Layout({{0, 0}, {side, 0}, {side, side}, {0, side}});
}

TEST(GeometryTest, RasterizedSquareHasBoundaryRing) {
  const GridMap g = RasterizeLayout(Square(4.0), 0.1, 1.5);
  ASSERT_EQ(g.width(), 40);
  ASSERT_EQ(g.height(), 40);
  for (int iy = 0; iy < 40; ++iy) {
    for (int ix = 0; ix < 40; ++ix) {
      const bool ring = ix == 0 || iy == 0 || ix == 39 || iy == 39;
      const int i = g.Index(ix, iy);
      EXPECT_EQ(g.occupied(i), ring) << ix << "," << iy;
      EXPECT_EQ(g.rrcs(i), ring ? 1.5 : 0.0);
    }
  }
  // 0.1 m cells have 0.01 m^2 area.
  EXPECT_NEAR(g.resolution() * g.resolution(), 0.01, 1e-15);
}

TEST(GeometryTest, RejectsDegeneratePolygons) {
  EXPECT_THROW(Layout({{0, 0}, {1, 0}}), ValidationError);
  EXPECT_THROW(Layout({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), ValidationError);
  EXPECT_THROW(Layout(Square(4.0).perimeter(), {{{3, 3}, {5, 3}, {5, 5}}}),
               ValidationError);
}

TEST(GeometryTest, EnforcesCounterClockwiseKeepingVertexZero) {
  const Layout cw({{0, 0}, {0, 2}, {3, 2}, {3, 0}});
  EXPECT_GT(SignedArea(cw.perimeter()), 0.0);
  EXPECT_EQ(cw.perimeter()[0], (Vec2{0, 0}));
  EXPECT_EQ(cw.perimeter()[1], (Vec2{3, 0}));
  EXPECT_DOUBLE_EQ(cw.perimeter_length(), 10.0);
  EXPECT_EQ(cw.PerimeterPoint(1.0), (Vec2{1, 0}));
  const Vec2 n = cw.InwardNormal(1.0);
  EXPECT_NEAR(n.x, 0.0, 1e-15);
  EXPECT_NEAR(n.y, 1.0, 1e-15);
}

TEST(GeometryTest, RayCastSquareRoom) {
  const GridMap g = RasterizeLayout(Square(4.0), 0.1, 1.0);
  const Pose center({2.0, 2.0}, 0.0);
  auto hit = RayCast(g, center, 0.0);
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->distance, 2.0, 0.1);
  hit = RayCast(g, center, 45.0);
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->distance, 2.0 * std::sqrt(2.0), 0.1);

  GridMap empty(Vec2{0, 0}, 0.1, 40, 40);
  EXPECT_FALSE(RayCast(empty, center, 17.0));
  EXPECT_THROW(RayCast(g, Pose({5.0, 5.0}, 0.0), 0.0), ValidationError);
}

// Slab test written independently of the library: the ray must cross the
// open square with a chord longer than a tiny tolerance.
bool OracleCrosses(const GridMap& g, int cell, Vec2 o, double dir_deg) {
  const double r = g.resolution();
  const Vec2 c = g.CellCenter(cell);
  const double th = dir_deg * kPi / 180.0;
  const double d[2] = {std::cos(th), std::sin(th)};
  const double org[2] = {o.x, o.y};
  const double lo[2] = {c.x - r / 2, c.y - r / 2};
  const double hi[2] = {c.x + r / 2, c.y + r / 2};
  double t0 = 0.0;
  double t1 = 1e300;
  for (int a = 0; a < 2; ++a) {
    if (std::abs(d[a]) < 1e-15) {
      if (org[a] <= lo[a] || org[a] >= hi[a]) return false;
      continue;
    }
    double ta = (lo[a] - org[a]) / d[a];
    double tb = (hi[a] - org[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return t1 - t0 > 1e-9 * r;
}

TEST(GeometryTest, RayCastMatchesExhaustiveOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int hits = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int w = 5 + static_cast<int>(u(rng) * 45);
    const int h = 5 + static_cast<int>(u(rng) * 45);
    const double res = 0.05 + 0.2 * u(rng);
    GridMap g(Vec2{-1.0, 0.5}, res, w, h);
    const double density = 0.02 + 0.2 * u(rng);
    for (int i = 0; i < g.num_cells(); ++i) {
      if (u(rng) < density) g.SetCell(i, true, 1.0);
    }
    const Pose pose({-1.0 + u(rng) * w * res, 0.5 + u(rng) * h * res}, 0.0);
    const double dir = u(rng) * 360.0;

    std::optional<RayHit> oracle;
    for (int i = 0; i < g.num_cells(); ++i) {
      if (!g.occupied(i) || !OracleCrosses(g, i, pose.position, dir)) continue;
      const double d = (g.CellCenter(i) - pose.position).Norm();
      if (!oracle || d < oracle->distance ||
          (d == oracle->distance && i < oracle->cell)) {
        oracle = RayHit{i, d};
      }
    }
    const auto got = RayCast(g, pose, dir);
    ASSERT_EQ(got.has_value(), oracle.has_value()) << "trial " << trial;
    if (got) {
      ++hits;
      EXPECT_EQ(got->cell, oracle->cell) << "trial " << trial;
      EXPECT_EQ(got->distance, oracle->distance);
    }
  }
  EXPECT_GT(hits, 100);
}

TEST(GeometryTest, RayCastAxisAlignedAndDiagonal) {
  GridMap g(Vec2{0, 0}, 1.0, 5, 5);
  g.SetCell(g.Index(4, 2), true, 1.0);
  g.SetCell(g.Index(3, 3), true, 1.0);
  g.SetCell(g.Index(2, 3), true, 1.0);
  // Straight along the row; the diagonal neighbours are not touched.
  auto hit = RayCast(g, Pose({0.5, 2.5}, 0.0), 0.0);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->cell, g.Index(4, 2));
  // Exactly through cell corners: (2,3) and (3,2) are grazed only.
  g.SetCell(g.Index(4, 2), false, 0.0);
  g.SetCell(g.Index(4, 4), true, 1.0);
  hit = RayCast(g, Pose({2.5, 2.5}, 0.0), 45.0);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->cell, g.Index(3, 3));
}

TEST(GeometryTest, PerimeterProjectionBasics) {
  const Layout sq = Square(4.0);
  auto p = ProjectOntoPerimeter(sq, {2.0, 2.0});
  EXPECT_DOUBLE_EQ(p.distance, 2.0);
  p = ProjectOntoPerimeter(sq, {4.0, 1.0});
  EXPECT_DOUBLE_EQ(p.distance, 0.0);
  EXPECT_DOUBLE_EQ(p.arc_length, 5.0);
  p = ProjectOntoPerimeter(sq, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(p.arc_length, 0.0);
  p = ProjectOntoPerimeter(sq, {0.0, 1e-3});
  EXPECT_NEAR(p.arc_length, 16.0 - 1e-3, 1e-12);
  EXPECT_LT(p.arc_length, sq.perimeter_length());
  EXPECT_THROW(ProjectOntoPerimeter(sq, {5.0, 1.0}), ValidationError);
}

TEST(GeometryTest, PerimeterProjectionMatchesBoundarySampling) {
  const Layout room({{0, 0}, {5, 0}, {5, 1.5}, {3, 1.5}, {3, 4}, {0, 4}});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.0, 5.0);
  std::uniform_real_distribution<double> uy(0.0, 4.0);
  int checked = 0;
  while (checked < 50) {
    const Vec2 q{ux(rng), uy(rng)};
    if (!room.Contains(q)) continue;
    ++checked;
    double best = 1e300;
    double best_s = 0.0;
    const double length = room.perimeter_length();
    for (double s = 0.0; s < length; s += 0.001) {
      const double d = (room.PerimeterPoint(s) - q).Norm();
      if (d < best) {
        best = d;
        best_s = s;
      }
    }
    const auto got = ProjectOntoPerimeter(room, q);
    EXPECT_NEAR(got.distance, best, 1e-3);
    double ds = std::abs(got.arc_length - best_s);
    ds = std::min(ds, length - ds);
    EXPECT_LT(ds, 1e-3 + 1e-9);
    EXPECT_GE(got.arc_length, 0.0);
    EXPECT_LT(got.arc_length, length);
    EXPECT_LE(got.distance, 2.5);
  }
}

TEST(GeometryTest, IsotropicShellIsFullAnnulusWithEqualWeights) {
  const GridMap g = RasterizeLayout(Square(4.0), 0.1, 1.0);
  ArrayConfig c;
  c.n_elements = 1;
  const ArrayPattern iso = SynthesizePattern(c, 0.0);
  const Pose pose({1.73, 2.11}, 0.0);
  const auto shell = CellsInShell(g, pose, 10.0, iso, 0.5, 0.6);
  int expected = 0;
  for (int i = 0; i < g.num_cells(); ++i) {
    const double d = (g.CellCenter(i) - pose.position).Norm();
    if (d >= 0.5 && d < 0.6) ++expected;
  }
  EXPECT_EQ(static_cast<int>(shell.size()), expected);
  for (const auto& s : shell) EXPECT_EQ(s.weight, 1.0);
}

TEST(GeometryTest, ShellMatchesExhaustiveEvaluation) {
  const GridMap g = RasterizeLayout(Square(4.0), 0.1, 1.0);
  ArrayConfig c;
  c.n_elements = 100;
  const ArrayPattern p = SynthesizePattern(c, 0.0);
  const Pose pose({2.02, 1.97}, 0.0);
  const double steer = 33.0;
  const auto shell = CellsInShell(g, pose, steer, p, 1.0, 1.1);
  const double floor = kDefaultShellFloor * p.PeakTwoWayGain();
  size_t k = 0;
  for (int i = 0; i < g.num_cells(); ++i) {
    const Vec2 cc = g.CellCenter(i);
    const double d = (cc - pose.position).Norm();
    if (d < 1.0 || d >= 1.1) continue;
    const double bearing =
        std::atan2(cc.y - pose.position.y, cc.x - pose.position.x) * 180.0 / kPi;
    const double w = TwoWayGain(p, bearing - steer);
    if (!(w > 0.0) || w < floor) continue;
    ASSERT_LT(k, shell.size());
    EXPECT_EQ(shell[k].cell, i);
    EXPECT_NEAR(shell[k].weight, w, 1e-9 * p.PeakTwoWayGain());
    EXPECT_GE(shell[k].weight, 0.0);
    ++k;
  }
  EXPECT_EQ(k, shell.size());
  EXPECT_GT(k, 0u);

  const PoseGeometry geo(g, pose);
  const auto cached = geo.ShellCells(steer, p, 1.0, 1.1);
  ASSERT_EQ(cached.size(), shell.size());
  for (size_t i = 0; i < shell.size(); ++i) {
    EXPECT_EQ(cached[i].cell, shell[i].cell);
    EXPECT_EQ(cached[i].weight, shell[i].weight);
  }
}

TEST(GeometryTest, DeltaShellKeepsAtMostOneCell) {
  const GridMap g = RasterizeLayout(Square(4.0), 0.1, 1.0);
  const ArrayPattern d = ArrayPattern::Delta(0.0, 0.005);
  const Pose pose({2.03, 2.07}, 0.0);
  const PoseGeometry geo(g, pose);
  int nonempty = 0;
  for (double r = 0.0; r < 3.0; r += 0.025) {
    const auto shell = CellsInShell(g, pose, 27.0, d, r, r + 0.025);
    EXPECT_LE(shell.size(), 1u);
    if (!shell.empty()) {
      ++nonempty;
      EXPECT_TRUE(RayIntersectsCell(g, shell[0].cell, pose.position, 27.0));
    }
    const auto cached = geo.ShellCells(27.0, d, r, r + 0.025);
    ASSERT_EQ(cached.size(), shell.size());
    if (!shell.empty()) EXPECT_EQ(cached[0].cell, shell[0].cell);
  }
  EXPECT_GT(nonempty, 5);
}

TEST(GeometryTest, RasterizeIsDeterministic) {
  const Layout room({{0, 0}, {5, 0}, {5, 1.5}, {0, 1.5}},
                    {{{2, 0.5}, {2.4, 0.5}, {2.4, 0.9}}});
  const GridMap a = RasterizeLayout(room, 0.1);
  const GridMap b = RasterizeLayout(room, 0.1);
  EXPECT_EQ(a.occupancy(), b.occupancy());
  EXPECT_EQ(a.rrcs(), b.rrcs());
}

TEST(GeometryTest, PoseHeadingIsNormalized) {
  EXPECT_DOUBLE_EQ(Pose({0, 0}, -90.0).heading_deg, 270.0);
  EXPECT_DOUBLE_EQ(Pose({0, 0}, 720.0).heading_deg, 0.0);
}

}  // namespace
}  // namespace prmap
