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

#include "prmap/metrics.h"

#include <random>

#include "gtest/gtest.h"

namespace prmap {
namespace {

Bitmap Random(std::mt19937& rng, int w, int h) {
  Bitmap b{w, h, std::vector<std::uint8_t>(w * h)};
  for (auto& v : b.occupied) v = rng() % 2;
  return b;
}

TEST(MetricsTest, IdenticalComplementedAndHalf) {
  std::mt19937 rng(1);
  const Bitmap a = Random(rng, 8, 5);
  EXPECT_EQ(MapError(a, a).error_rate, 0.0);
  Bitmap c = a;
  for (auto& v : c.occupied) v = !v;
  EXPECT_EQ(MapError(c, a).error_rate, 1.0);
  Bitmap half = a;
  for (size_t i = 0; i < half.occupied.size(); i += 2) half.occupied[i] = !half.occupied[i];
  EXPECT_EQ(MapError(half, a).error_rate, 0.5);
}

TEST(MetricsTest, SplitAndSymmetry) {
  std::mt19937 rng(2);
  for (int t = 0; t < 50; ++t) {
    const Bitmap a = Random(rng, 7, 6);
    const Bitmap b = Random(rng, 7, 6);
    const Bitmap c = Random(rng, 7, 6);
    const auto ab = MapError(a, b);
    const auto ba = MapError(b, a);
    EXPECT_EQ(ab.error_rate, ba.error_rate);
    EXPECT_EQ(ab.false_occupied, ba.false_free);
    EXPECT_EQ(ab.false_occupied + ab.false_free,
              static_cast<long>(ab.error_rate * ab.total_cells + 0.5));
    EXPECT_LE(ab.error_rate, MapError(a, c).error_rate + MapError(c, b).error_rate + 1e-15);
  }
}

TEST(MetricsTest, RejectsMismatchedSizes) {
  EXPECT_THROW(MapError(Bitmap{2, 2, {0, 0, 0, 0}}, Bitmap{4, 1, {0, 0, 0, 0}}),
               ValidationError);
}

TEST(MetricsTest, DegradationRatio) {
  MapErrorReport base;
  base.error_rate = 0.10;
  MapErrorReport pert;
  pert.error_rate = 0.32;
  EXPECT_NEAR(DegradationRatio(base, pert), 2.2, 1e-12);
  EXPECT_EQ(DegradationRatio(base, base), 0.0);
  MapErrorReport zero;
  EXPECT_THROW(DegradationRatio(zero, pert), UndefinedRatioError);
}

}  // namespace
}  // namespace prmap
