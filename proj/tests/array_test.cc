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

#include "prmap/array.h"

#include <cmath>
#include <complex>

#include "gtest/gtest.h"
#include "oracles.h"
#include "prmap/common.h"

namespace prmap {
namespace {

using oracle::DirectGain;


TEST(ArrayTest, SingleElementIsFlat) {
  ArrayConfig c;
  c.n_elements = 1;
  const ArrayPattern p = SynthesizePattern(c, 30.0);
  for (double g : p.gains()) EXPECT_EQ(g, 1.0);
  EXPECT_EQ(TwoWayGain(p, 123.4), 1.0);
  EXPECT_THROW(HalfPowerBeamwidth(p), UndefinedBeamwidthError);
}

TEST(ArrayTest, UnquantizedPeakIsExactlyN) {
  for (int n : {2, 10, 16, 100}) {
    for (double steer : {-60.0, -17.5, 0.0, 5.0, 42.0}) {
      ArrayConfig c;
      c.n_elements = n;
      const ArrayPattern p = SynthesizePattern(c, steer);
      EXPECT_EQ(p.OneWayGain(0.0), static_cast<double>(n)) << n << " " << steer;
      EXPECT_EQ(TwoWayGain(p, 0.0), static_cast<double>(n) * n);
      for (double g : p.gains()) EXPECT_LE(g, n * (1.0 + 1e-12));
    }
  }
}

TEST(ArrayTest, FirstNullMatchesBruteForceScan) {
  ArrayConfig c;
  c.n_elements = 10;
  const ArrayPattern p = SynthesizePattern(c, 0.0);

  // Oracle: walk a 0.001 deg grid away from broadside until the array factor
  // stops decreasing.
  double oracle = 0.0;
  double prev = DirectGain(10, 0.0, 0.0);
  for (double a = 0.001; a < 90.0; a += 0.001) {
    const double g = DirectGain(10, 0.0, a);
    if (g > prev) {
      oracle = a - 0.001;
      break;
    }
    prev = g;
  }
  EXPECT_NEAR(oracle, std::asin(0.2) * 180.0 / kPi, 0.01);

  // Pattern samples: first local minimum on the positive side.
  int k0 = static_cast<int>(std::lround(180.0 / p.step_deg()));
  int k = k0 + 1;
  while (p.gains()[k + 1] < p.gains()[k]) ++k;
  EXPECT_NEAR(p.SampleBearing(k), oracle, 0.5);
  EXPECT_NEAR(p.SampleBearing(k), 11.54, 0.5);
}

TEST(ArrayTest, SamplesMatchDirectEvaluation) {
  ArrayConfig c;
  c.n_elements = 16;
  const ArrayPattern p = SynthesizePattern(c, 20.0, 0.5);
  for (int k = 0; k < static_cast<int>(p.gains().size()); k += 7) {
    const double abs_deg = WrapDeg180(20.0 + p.SampleBearing(k));
    const double expect =
        std::abs(abs_deg) > 90.0 ? 0.0 : DirectGain(16, 20.0, abs_deg);
    EXPECT_NEAR(p.gains()[k], expect, 1e-9);
  }
}

TEST(ArrayTest, OneBitRaisesSideLobes) {
  for (int n : {10, 16}) {
    for (double steer : {10.0, 25.0, 40.0}) {
      ArrayConfig c;
      c.n_elements = n;
      ArrayConfig q = c;
      q.phase_bits = 1;
      const ArrayPattern ideal = SynthesizePattern(c, steer);
      const ArrayPattern quant = SynthesizePattern(q, steer);
      EXPECT_GE(PeakSideLobeLevel(quant), PeakSideLobeLevel(ideal));
      EXPECT_LE(quant.PeakOneWayGain(), n * (1.0 + 1e-12));
    }
  }
}

TEST(ArrayTest, TwoWayGainIsSquaredOneWay) {
  ArrayConfig c;
  c.n_elements = 16;
  c.phase_bits = 1;
  const ArrayPattern p = SynthesizePattern(c, 12.0);
  for (int k = 0; k < static_cast<int>(p.gains().size()); ++k) {
    const double b = p.SampleBearing(k);
    EXPECT_EQ(TwoWayGain(p, b), p.gains()[k] * p.gains()[k]);
  }
  for (double b : {-33.3, 0.25, 7.77, 179.9}) {
    const double g = p.OneWayGain(b);
    EXPECT_EQ(TwoWayGain(p, b), g * g);
  }
}

TEST(ArrayTest, InterpolatesLinearly) {
  ArrayConfig c;
  c.n_elements = 8;
  const ArrayPattern p = SynthesizePattern(c, 0.0);
  const int k = 370;
  const double mid = 0.5 * (p.gains()[k] + p.gains()[k + 1]);
  EXPECT_NEAR(p.OneWayGain(p.SampleBearing(k) + 0.25), mid, 1e-12);
  EXPECT_EQ(p.OneWayGain(p.SampleBearing(k) + 360.0), p.gains()[k]);
}

TEST(ArrayTest, BeamwidthShrinksWithN) {
  ArrayConfig small;
  small.n_elements = 16;
  ArrayConfig large;
  large.n_elements = 100;
  const double w16 = HalfPowerBeamwidth(SynthesizePattern(small, 0.0));
  const double w100 = HalfPowerBeamwidth(SynthesizePattern(large, 0.0));
  EXPECT_LT(w100, w16);
  // 0.886 / N radians for a half-wavelength broadside array.
  EXPECT_NEAR(w16, 0.886 * 2.0 / 16 * 180.0 / kPi, 0.5);
}

TEST(ArrayTest, SymmetricPatternHasSymmetricCrossings) {
  ArrayConfig c;
  c.n_elements = 12;
  const ArrayPattern p = SynthesizePattern(c, 0.0);
  const double half = 0.5 * p.PeakOneWayGain();
  double right = 0.0;
  double left = 0.0;
  for (double b = 0.0; b < 90.0; b += 0.001) {
    if (p.OneWayGain(b) < half) {
      right = b;
      break;
    }
  }
  for (double b = 0.0; b > -90.0; b -= 0.001) {
    if (p.OneWayGain(b) < half) {
      left = -b;
      break;
    }
  }
  EXPECT_NEAR(right, left, p.step_deg());
  EXPECT_NEAR(HalfPowerBeamwidth(p), right + left, 0.01);
}

TEST(ArrayTest, PeakIsSteeringIndependent) {
  ArrayConfig c;
  c.n_elements = 20;
  const double ref = SynthesizePattern(c, 0.0).PeakOneWayGain();
  for (double s : {-45.0, -5.0, 15.0, 60.0}) {
    EXPECT_EQ(SynthesizePattern(c, s).PeakOneWayGain(), ref);
  }
}

TEST(ArrayTest, DeltaPattern) {
  const ArrayPattern d = ArrayPattern::Delta(30.0, 0.005);
  EXPECT_TRUE(d.is_delta());
  EXPECT_EQ(d.OneWayGain(0.0), 1.0);
  EXPECT_EQ(d.OneWayGain(0.1), 0.0);
  EXPECT_THROW(HalfPowerBeamwidth(d), UndefinedBeamwidthError);
}

TEST(ArrayTest, RejectsInvalidConfig) {
  ArrayConfig c;
  c.n_elements = 0;
  EXPECT_THROW(SynthesizePattern(c, 0.0), ValidationError);
  c.n_elements = 4;
  c.phase_bits = 0;
  EXPECT_THROW(SynthesizePattern(c, 0.0), ValidationError);
  c.phase_bits.reset();
  c.carrier_ghz = 0.0;
  EXPECT_THROW(SynthesizePattern(c, 0.0), ValidationError);
}

TEST(ArrayTest, WavelengthFromCarrier) {
  ArrayConfig c;
  EXPECT_NEAR(c.WavelengthM(), 0.299792458 / 60.5, 1e-15);
}

}  // namespace
}  // namespace prmap
