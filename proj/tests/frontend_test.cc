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

#include "prmap/frontend.h"

#include <cmath>
#include <sstream>

#include "gtest/gtest.h"

namespace prmap {
namespace {

RadarConfig Radar() {
  RadarConfig r;
  r.n_bins = 64;
  return r;
}

TEST(FrontendTest, DefaultsCoverTheSemiPlane) {
  const RadarConfig r;
  ASSERT_EQ(r.steering_deg.size(), 37u);
  EXPECT_EQ(r.steering_deg.front(), -90.0);
  EXPECT_EQ(r.steering_deg.back(), 90.0);
  EXPECT_NEAR(r.BinDurationNs(), 1.0 / 6.0, 1e-15);
  EXPECT_EQ(r.n_bins, 256);
}

TEST(FrontendTest, BinEnergies) {
  const RadarConfig r = Radar();
  const double t = r.BinDurationNs();
  ChannelRealization real{Pose({0, 0}, 0), 0.0, {}};
  auto b = BinEnergies(real, r);
  for (double e : b.energies) EXPECT_EQ(e, 0.0);

  real.mpcs = {{2.5 * t, 0.0, 3.0, {}}};
  b = BinEnergies(real, r);
  for (int j = 0; j < r.n_bins; ++j) {
    EXPECT_EQ(b.energies[j], j == 2 ? r.pulse_energy * 3.0 : 0.0);
  }

  real.mpcs = {{2.2 * t, 0.0, 1.0, {}}, {2.7 * t, 0.0, 2.0, {}},
               {1000.0, 0.0, 5.0, {}}};
  b = BinEnergies(real, r);
  EXPECT_EQ(b.energies[2], r.pulse_energy * 3.0);
  EXPECT_EQ(b.dropped, 1);
}

TEST(FrontendTest, EnergyConservationAndLinearity) {
  const RadarConfig r = Radar();
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ChannelRealization real{Pose({0, 0}, 0), 0.0, {}};
  double total = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double p = u(rng);
    real.mpcs.push_back({u(rng) * r.n_bins * r.BinDurationNs(), 0.0, p, {}});
    total += p;
  }
  const auto b = BinEnergies(real, r);
  double sum = 0.0;
  for (double e : b.energies) sum += e;
  EXPECT_NEAR(sum, r.pulse_energy * total, 1e-9 * sum);

  ChannelRealization scaled = real;
  for (Mpc& m : scaled.mpcs) m.power *= 0.5;
  const auto bs = BinEnergies(scaled, r);
  for (int j = 0; j < r.n_bins; ++j) {
    EXPECT_NEAR(bs.energies[j], 0.5 * b.energies[j], 1e-12 * b.energies[j]);
  }
}

TEST(FrontendTest, NoiselessAccumulationIsExact) {
  RadarConfig r = Radar();
  r.noise_energy_per_bin = 0.0;
  std::vector<double> x = {0.0, 1.5, 2.0};
  Rng rng(1);
  const auto acc = Accumulate(x, r, rng);
  for (size_t j = 0; j < x.size(); ++j) EXPECT_EQ(acc[j], r.n_pulses * x[j]);
}

TEST(FrontendTest, AccumulatedNoiseMean) {
  for (auto model : {NoiseModel::kGaussian, NoiseModel::kExponential}) {
    RadarConfig r = Radar();
    r.noise_model = model;
    r.n_pulses = 50;
    r.noise_energy_per_bin = 2.0;
    Rng rng(7);
    double sum = 0.0;
    const std::vector<double> zero(1, 0.0);
    for (int t = 0; t < 10000; ++t) sum += Accumulate(zero, r, rng)[0];
    EXPECT_NEAR(sum / 10000, 100.0, 2.0);
  }
}

TEST(FrontendTest, SnrGrowsWithSqrtPulses) {
  auto snr = [](int np) {
    RadarConfig r;
    r.n_pulses = np;
    const std::vector<double> x(1, 0.5);
    Rng rng(np);
    double s = 0.0;
    double s2 = 0.0;
    for (int t = 0; t < 10000; ++t) {
      const double v = Accumulate(x, r, rng)[0] - r.NoiseMean();
      s += v;
      s2 += v * v;
    }
    const double mean = s / 10000;
    return mean / std::sqrt(s2 / 10000 - mean * mean);
  };
  EXPECT_NEAR(snr(400) / snr(100), 2.0, 0.1);
}

TEST(FrontendTest, AccumulationNeverNegative) {
  RadarConfig r = Radar();
  r.n_pulses = 1;
  Rng rng(5);
  const std::vector<double> zero(1000, 0.0);
  for (double v : Accumulate(zero, r, rng)) EXPECT_GE(v, 0.0);
}

TEST(FrontendTest, EmptyMapNoiselessScanIsZero) {
  GridMap g(Vec2{0, 0}, 0.1, 30, 30);
  RadarConfig r = Radar();
  r.noise_energy_per_bin = 0.0;
  const auto m = Scan(g, nullptr, Pose({1.5, 1.5}, 0), r, ArrayConfig{}, {}, 1);
  for (double v : m.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(m.rows(), 37);
}

TEST(FrontendTest, ReflectorPeaksInItsRowAndBin) {
  GridMap g(Vec2{0, 0}, 0.1, 40, 40);
  const Pose pose(g.CellCenter(g.Index(10, 10)), 0.0);
  const int cell = g.Index(30, 10);  // 2 m along +x
  g.SetCell(cell, true, 1.0);
  RadarConfig r;
  r.noise_energy_per_bin = 0.0;
  ArrayConfig a;
  a.n_elements = 100;
  const auto m = Scan(g, nullptr, pose, r, a, {}, 3);
  const int row = 18;  // steering 0
  ASSERT_EQ(m.steering_deg()[row], 0.0);
  const int bin = static_cast<int>(2.0 * 2.0 / kSpeedOfLight / r.BinDurationNs());
  double best = 0.0;
  int best_bin = -1;
  for (int j = 0; j < m.cols(); ++j) {
    if (m.at(row, j) > best) {
      best = m.at(row, j);
      best_bin = j;
    }
  }
  EXPECT_EQ(best_bin, bin);
  const ArrayPattern p = SynthesizePattern(a, 0.0);
  for (int b = 0; b < m.rows(); ++b) {
    if (b == row) continue;
    EXPECT_LT(m.at(b, bin), m.at(row, bin));
    EXPECT_NEAR(m.at(b, bin) / m.at(row, bin),
                TwoWayGain(p, -m.steering_deg()[b]) / TwoWayGain(p, 0.0), 1e-9);
  }
}

TEST(FrontendTest, ScanIsDeterministic) {
  GridMap g(Vec2{0, 0}, 0.1, 40, 20);
  for (int ix = 0; ix < 40; ++ix) g.SetCell(g.Index(ix, 19), true, 1.0);
  const Layout lay({{0, 0}, {4, 0}, {4, 2}, {0, 2}});
  SvParams sv;
  const auto a = Scan(g, &lay, Pose({2, 1}, 90), RadarConfig{}, ArrayConfig{}, sv, 42);
  const auto b = Scan(g, &lay, Pose({2, 1}, 90), RadarConfig{}, ArrayConfig{}, sv, 42);
  EXPECT_EQ(a.values(), b.values());
  const auto c = Scan(g, &lay, Pose({2, 1}, 90), RadarConfig{}, ArrayConfig{}, sv, 43);
  EXPECT_NE(a.values(), c.values());
}

TEST(FrontendTest, CsvRoundTripIsExact) {
  EnergyMatrix m(Pose({1.25, -0.5}, 33.3), 1.0 / 6.0, {-5.0, 0.0, 5.0}, 4);
  Rng rng(9);
  std::uniform_real_distribution<double> u(0.0, 1e3);
  for (int r = 0; r < 3; ++r) {
    for (int j = 0; j < 4; ++j) m.at(r, j) = u(rng);
  }
  std::stringstream ss;
  m.Write(ss);
  const EnergyMatrix back = EnergyMatrix::Read(ss);
  EXPECT_EQ(back.values(), m.values());
  EXPECT_EQ(back.steering_deg(), m.steering_deg());
  EXPECT_EQ(back.bin_duration_ns(), m.bin_duration_ns());
  EXPECT_EQ(back.pose().heading_deg, m.pose().heading_deg);
  EXPECT_EQ(back.pose().position, m.pose().position);
}

TEST(FrontendTest, CsvErrorsNameTheLine) {
  std::stringstream ss(
      "x_m,y_m,heading_deg,bin_duration_ns\n0,0,0,0.1\nsteering_deg,bin_0,bin_1\n"
      "0,1,2\n5,1,oops\n");
  try {
    EnergyMatrix::Read(ss, "m.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("m.csv:5"), std::string::npos) << e.what();
  }
}

TEST(FrontendTest, RejectsBadRadarConfig) {
  RadarConfig r;
  r.steering_deg = {0.0, 0.0};
  EXPECT_THROW(r.Validate(), ValidationError);
  r = RadarConfig{};
  r.n_pulses = 0;
  EXPECT_THROW(r.Validate(), ValidationError);
}

}  // namespace
}  // namespace prmap
