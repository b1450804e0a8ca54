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

#include "prmap/io.h"

#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"

namespace prmap {
namespace {

namespace fs = std::filesystem;

const char* kLayout = R"({"perimeter": [[0,0],[3,0],[3,2],[0,2]], "default_rrcs": 2.0})";

std::string ScenarioText(const std::string& layout) {
  return std::string(R"({"layout": )") + layout + R"(,
    "resolution_m": 0.1,
    "array": {"n_elements": 8},
    "radar": {"n_bins": 64, "steering_deg": {"from": -30, "to": 30, "step": 10}},
    "trajectory": {"start": [0.5, 1.0], "step": [0.4, 0.0], "count": 3},
    "seed": 42,
    "mapping": {"og_q": 3.0, "ekf_prior_mean": 0.1},
    "experiment": {"eta_og": 0.6, "n_antennas": [4, 8]}})";
}

TEST(IoTest, ParsesInlineScenario) {
  const Scenario s = ParseScenarioJson(ScenarioText(kLayout), ".");
  EXPECT_EQ(s.array.n_elements, 8);
  EXPECT_EQ(s.radar.n_bins, 64);
  ASSERT_EQ(s.radar.steering_deg.size(), 7u);
  EXPECT_EQ(s.radar.steering_deg.front(), -30.0);
  ASSERT_EQ(s.trajectory.size(), 3u);
  EXPECT_NEAR(s.trajectory[2].position.x, 1.3, 1e-12);
  EXPECT_EQ(s.seed, 42u);
  EXPECT_EQ(s.Mapping().og_q, 3.0);
  EXPECT_EQ(s.Mapping().array.n_elements, 8);
  EXPECT_EQ(s.priors.ekf_prior_mean, 0.1);
  EXPECT_EQ(s.experiment.eta_og, 0.6);
  EXPECT_EQ(s.experiment.n_antennas, (std::vector<int>{4, 8}));
  EXPECT_EQ(s.layout->default_rrcs(), 2.0);
  EXPECT_EQ(s.Grid().width(), 30);
}

TEST(IoTest, ResolvesLayoutRelativeToScenario) {
  const fs::path dir = fs::temp_directory_path() / "prmap_io_test";
  fs::create_directories(dir);
  std::ofstream(dir / "room.json") << kLayout;
  std::ofstream(dir / "scn.json") << ScenarioText("\"room.json\"");
  const Scenario s = LoadScenario(dir / "scn.json");
  EXPECT_EQ(s.layout_path, dir / "room.json");
  fs::remove(dir / "room.json");
  EXPECT_THROW(LoadScenario(dir / "scn.json"), IoError);
  fs::remove_all(dir);
}

TEST(IoTest, RejectsBadInput) {
  EXPECT_THROW(ParseScenarioJson("{not json", "."), IoError);
  EXPECT_THROW(ParseScenarioJson(R"({"trajectory": []})", "."), ValidationError);
  std::string s = ScenarioText(kLayout);
  EXPECT_THROW(ParseScenarioJson(
                   ScenarioText(R"({"perimeter": [[0,0],[1,0]]})"), "."),
               ValidationError);
  auto with = [&](const std::string& from, const std::string& to) {
    std::string t = s;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_THROW(ParseScenarioJson(with("[0.5, 1.0]", "[5.0, 1.0]"), "."),
               ValidationError);
  EXPECT_THROW(ParseScenarioJson(with("\"seed\": 42", "\"seed\": -1"), "."),
               ValidationError);
  EXPECT_THROW(ParseScenarioJson(with("\"n_elements\": 8", "\"n_elements\": 0"), "."),
               ValidationError);
  EXPECT_THROW(ParseScenarioJson(with("\"eta_og\": 0.6", "\"eta_og\": 1.5"), "."),
               ValidationError);
  EXPECT_THROW(
      ParseScenarioJson(with("\"n_bins\": 64", "\"n_bins\": 64, \"beam\": \"laser\""),
                        "."),
      ValidationError);
}

TEST(IoTest, MissingMatrixFile) {
  EXPECT_THROW(LoadEnergyMatrix("/nonexistent/m.csv"), IoError);
}

}  // namespace
}  // namespace prmap
