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

#ifndef PRMAP_FRONTEND_H_
#define PRMAP_FRONTEND_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "prmap/array.h"
#include "prmap/channel.h"
#include "prmap/common.h"
#include "prmap/geometry.h"

namespace prmap {

enum class NoiseModel {
  // Central-limit approximation of the accumulated noise energy.
  kGaussian,
  // Per-pulse exponential energies, so the accumulated noise is Gamma.
  kExponential,
};

enum class SteerMode {
  // One broadside pattern turned to every steering direction.
  kRotate,
  // Electronic steering: a pattern is synthesized per direction.
  kPhase,
};

struct RadarConfig {
  double bandwidth_ghz = 6.0;
  double pulse_energy = 2e6;
  int n_pulses = 100;
  double noise_energy_per_bin = 1.0;
  int n_bins = 256;
  // Relative to the pose heading, strictly increasing.
  std::vector<double> steering_deg = SemiPlaneSteering(5.0);
  NoiseModel noise_model = NoiseModel::kGaussian;
  SteerMode steer_mode = SteerMode::kRotate;
  // Laser-like beams instead of the array pattern.
  bool delta_beam = false;

  double BinDurationNs() const { return 1.0 / bandwidth_ghz; }
  double NoiseMean() const { return n_pulses * noise_energy_per_bin; }
  double NoiseStd() const {
    return std::sqrt(static_cast<double>(n_pulses)) * noise_energy_per_bin;
  }
  void Validate() const;

  // -90..90 inclusive at the given step.
  static std::vector<double> SemiPlaneSteering(double step_deg);
};

struct Beam {
  // Absolute steering bearing.
  double steering_deg;
  ArrayPattern pattern;
};

// One beam per steering row for a radar with the given heading.
std::vector<Beam> MakeBeams(const RadarConfig& radar, const ArrayConfig& array,
                            double heading_deg);

struct BinnedEnergy {
  std::vector<double> energies;
  // MPCs outside [0, n_bins * T_bin).
  int dropped = 0;
};

BinnedEnergy BinEnergies(const ChannelRealization& realization,
                         const RadarConfig& config);

std::vector<double> Accumulate(const std::vector<double>& noiseless,
                               const RadarConfig& config, Rng& rng);

class EnergyMatrix {
 public:
  EnergyMatrix() = default;
  EnergyMatrix(Pose pose, double bin_duration_ns,
               std::vector<double> steering_deg, int n_bins);

  const Pose& pose() const { return pose_; }
  double bin_duration_ns() const { return bin_duration_ns_; }
  int rows() const { return static_cast<int>(steering_deg_.size()); }
  int cols() const { return n_bins_; }
  // Relative to the pose heading.
  const std::vector<double>& steering_deg() const { return steering_deg_; }
  double AbsoluteSteering(int row) const {
    return NormalizeDeg(pose_.heading_deg + steering_deg_[row]);
  }

  double at(int row, int bin) const { return values_[row * n_bins_ + bin]; }
  double& at(int row, int bin) { return values_[row * n_bins_ + bin]; }
  const std::vector<double>& values() const { return values_; }

  void Write(std::ostream& out) const;
  // Throws IoError naming the offending line.
  static EnergyMatrix Read(std::istream& in, const std::string& name = "");

 private:
  Pose pose_;
  double bin_duration_ns_ = 0.0;
  std::vector<double> steering_deg_;
  int n_bins_ = 0;
  std::vector<double> values_;
};

struct ScanStats {
  int dropped_mpcs = 0;
};

// `layout` is needed only when clutter is requested. Rows draw noise from
// streams derived from `seed` and the row index; clutter uses its own stream.
EnergyMatrix Scan(const GridMap& map, const Layout* layout, const Pose& pose,
                  const RadarConfig& radar, const ArrayConfig& array,
                  const std::optional<SvParams>& sv, std::uint64_t seed,
                  ScanStats* stats = nullptr);

}  // namespace prmap

#endif  // PRMAP_FRONTEND_H_
