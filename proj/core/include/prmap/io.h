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

#ifndef PRMAP_IO_H_
#define PRMAP_IO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prmap/array.h"
#include "prmap/channel.h"
#include "prmap/frontend.h"
#include "prmap/geometry.h"
#include "prmap/mapping.h"

namespace prmap {

// Parse failures raise IoError, schema violations ValidationError.
Layout ParseLayoutJson(const std::string& text);
Layout LoadLayout(const std::filesystem::path& path);

struct MapPriors {
  double ekf_prior_mean = 0.2;
  double ekf_prior_var = 0.25;
  double og_prior = 0.5;
};

// Settings of the batch experiments; eta values are used when no --eta is
// given on the command line.
struct ExperimentSettings {
  double eta_ekf = 0.5;
  double eta_og = 0.5;
  std::vector<int> n_antennas = {16, 100};
  // Relative scaling of the prior in the sensitivity experiment.
  double init_perturbation = 0.4;
  // Antenna sweep only: split every steering interval wider than the
  // broadside half-power beamwidth of the array under test, so that narrow
  // beams still overlap at half power.
  bool match_steering_to_beamwidth = true;
};

struct Scenario {
  std::string name;
  std::filesystem::path layout_path;
  std::optional<Layout> layout;
  double resolution_m = 0.1;
  ArrayConfig array;
  RadarConfig radar;
  std::optional<SvParams> sv;
  std::vector<Pose> trajectory;
  std::uint64_t seed = 1;
  // Filter constants; radar and array are filled in by Mapping().
  MappingConfig mapping;
  MapPriors priors;
  ExperimentSettings experiment;

  void Validate() const;
  GridMap Grid() const;
  MappingConfig Mapping() const;
};

// The layout path is resolved relative to the scenario file.
Scenario LoadScenario(const std::filesystem::path& path);
Scenario ParseScenarioJson(const std::string& text,
                           const std::filesystem::path& base_dir);

std::string ReadTextFile(const std::filesystem::path& path);
EnergyMatrix LoadEnergyMatrix(const std::filesystem::path& path);

}  // namespace prmap

#endif  // PRMAP_IO_H_
