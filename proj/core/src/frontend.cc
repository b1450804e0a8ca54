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

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace prmap {

namespace {

constexpr std::uint64_t kClutterStream = 0xc1077e4ULL;

}  // namespace

void RadarConfig::Validate() const {
  if (!(bandwidth_ghz > 0.0)) {
    throw ValidationError("radar: bandwidth must be > 0");
  }
  if (n_pulses < 1) throw ValidationError("radar: n_pulses must be >= 1");
  if (n_bins < 1) throw ValidationError("radar: n_bins must be >= 1");
  if (!(pulse_energy >= 0.0)) {
    throw ValidationError("radar: pulse_energy must be >= 0");
  }
  if (!(noise_energy_per_bin >= 0.0)) {
    throw ValidationError("radar: noise_energy_per_bin must be >= 0");
  }
  if (steering_deg.empty()) {
    throw ValidationError("radar: steering list is empty");
  }
  for (size_t i = 1; i < steering_deg.size(); ++i) {
    if (!(steering_deg[i] > steering_deg[i - 1])) {
      throw ValidationError("radar: steering list must be strictly increasing");
    }
  }
}

std::vector<double> RadarConfig::SemiPlaneSteering(double step_deg) {
  std::vector<double> out;
  const int n = static_cast<int>(std::floor(180.0 / step_deg + 1e-9));
  for (int k = 0; k <= n; ++k) out.push_back(-90.0 + k * step_deg);
  return out;
}

std::vector<Beam> MakeBeams(const RadarConfig& radar, const ArrayConfig& array,
                            double heading_deg) {
  std::vector<Beam> beams;
  beams.reserve(radar.steering_deg.size());
  const double lambda = array.WavelengthM();
  std::optional<ArrayPattern> shared;
  if (!radar.delta_beam && radar.steer_mode == SteerMode::kRotate) {
    shared = SynthesizePattern(array, 0.0);
  }
  for (double rel : radar.steering_deg) {
    const double abs_deg = NormalizeDeg(heading_deg + rel);
    if (radar.delta_beam) {
      beams.push_back({abs_deg, ArrayPattern::Delta(0.0, lambda)});
    } else if (shared) {
      beams.push_back({abs_deg, *shared});
    } else {
      beams.push_back({abs_deg, SynthesizePattern(array, rel)});
    }
  }
  return beams;
}

BinnedEnergy BinEnergies(const ChannelRealization& realization,
                         const RadarConfig& config) {
  BinnedEnergy out;
  out.energies.assign(config.n_bins, 0.0);
  const double t_bin = config.BinDurationNs();
  for (const Mpc& m : realization.mpcs) {
    const double pos = m.delay_ns / t_bin;
    if (!(pos >= 0.0) || pos >= config.n_bins) {
      ++out.dropped;
      continue;
    }
    out.energies[static_cast<int>(pos)] += config.pulse_energy * m.power;
  }
  return out;
}

std::vector<double> Accumulate(const std::vector<double>& noiseless,
                               const RadarConfig& config, Rng& rng) {
  std::vector<double> out(noiseless.size());
  const double np = config.n_pulses;
  const double n0 = config.noise_energy_per_bin;
  if (n0 == 0.0) {
    for (size_t j = 0; j < out.size(); ++j) out[j] = np * noiseless[j];
    return out;
  }
  if (config.noise_model == NoiseModel::kGaussian) {
    std::normal_distribution<double> noise(config.NoiseMean(), config.NoiseStd());
    for (size_t j = 0; j < out.size(); ++j) {
      out[j] = std::max(0.0, np * noiseless[j] + noise(rng));
    }
  } else {
    std::gamma_distribution<double> noise(np, n0);
    for (size_t j = 0; j < out.size(); ++j) {
      out[j] = np * noiseless[j] + noise(rng);
    }
  }
  return out;
}

EnergyMatrix::EnergyMatrix(Pose pose, double bin_duration_ns,
                           std::vector<double> steering_deg, int n_bins)
    : pose_(pose),
      bin_duration_ns_(bin_duration_ns),
      steering_deg_(std::move(steering_deg)),
      n_bins_(n_bins),
      values_(steering_deg_.size() * n_bins, 0.0) {}

void EnergyMatrix::Write(std::ostream& out) const {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "x_m,y_m,heading_deg,bin_duration_ns\n";
  out << num(pose_.position.x) << ',' << num(pose_.position.y) << ','
      << num(pose_.heading_deg) << ',' << num(bin_duration_ns_) << '\n';
  out << "steering_deg";
  for (int j = 0; j < n_bins_; ++j) out << ",bin_" << j;
  out << '\n';
  for (int r = 0; r < rows(); ++r) {
    out << num(steering_deg_[r]);
    for (int j = 0; j < n_bins_; ++j) out << ',' << num(at(r, j));
    out << '\n';
  }
}

namespace {

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseNumber(const std::string& text, const std::string& where) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw IoError(where + ": not a number: '" + text + "'");
  }
  if (used != text.size()) {
    throw IoError(where + ": not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

EnergyMatrix EnergyMatrix::Read(std::istream& in, const std::string& name) {
  const std::string prefix = name.empty() ? "energy matrix" : name;
  std::string line;
  int line_no = 0;
  auto next = [&](bool required) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    if (required) {
      throw IoError(prefix + ":" + std::to_string(line_no + 1) +
                    ": unexpected end of file");
    }
    return false;
  };
  auto where = [&] { return prefix + ":" + std::to_string(line_no); };

  next(true);
  if (line.rfind("x_m,y_m,heading_deg,bin_duration_ns", 0) != 0) {
    throw IoError(where() + ": missing pose header");
  }
  next(true);
  auto head = SplitCsv(line);
  if (head.size() != 4) throw IoError(where() + ": expected 4 pose fields");
  const Pose pose({ParseNumber(head[0], where()), ParseNumber(head[1], where())},
                  ParseNumber(head[2], where()));
  const double bin_ns = ParseNumber(head[3], where());
  if (!(bin_ns > 0.0)) throw IoError(where() + ": bin duration must be > 0");

  next(true);
  auto cols = SplitCsv(line);
  if (cols.size() < 2 || cols[0] != "steering_deg") {
    throw IoError(where() + ": missing column header");
  }
  const int n_bins = static_cast<int>(cols.size()) - 1;

  std::vector<double> steering;
  std::vector<double> values;
  while (next(false)) {
    auto fields = SplitCsv(line);
    if (static_cast<int>(fields.size()) != n_bins + 1) {
      throw IoError(where() + ": expected " + std::to_string(n_bins + 1) +
                    " fields, got " + std::to_string(fields.size()));
    }
    steering.push_back(ParseNumber(fields[0], where()));
    for (int j = 0; j < n_bins; ++j) {
      const double v = ParseNumber(fields[j + 1], where());
      if (!(v >= 0.0)) throw IoError(where() + ": negative energy");
      values.push_back(v);
    }
  }
  if (steering.empty()) throw IoError(prefix + ": no steering rows");
  EnergyMatrix m(pose, bin_ns, steering, n_bins);
  m.values_ = std::move(values);
  return m;
}

EnergyMatrix Scan(const GridMap& map, const Layout* layout, const Pose& pose,
                  const RadarConfig& radar, const ArrayConfig& array,
                  const std::optional<SvParams>& sv, std::uint64_t seed,
                  ScanStats* stats) {
  radar.Validate();
  array.Validate();
  if (!map.Contains(pose.position)) {
    throw ValidationError("scan: pose lies outside the grid");
  }
  if (sv && layout == nullptr) {
    throw ValidationError("scan: clutter requires a layout");
  }
  const std::vector<Beam> beams = MakeBeams(radar, array, pose.heading_deg);
  std::vector<VisibleCell> visible;
  if (!radar.delta_beam) visible = VisibleCells(map, pose);

  std::optional<ClutterField> clutter;
  if (sv) {
    Rng clutter_rng(DeriveSeed(seed, kClutterStream));
    clutter = SampleClutterField(*sv, *layout, pose, clutter_rng);
  }

  EnergyMatrix matrix(pose, radar.BinDurationNs(), radar.steering_deg,
                      radar.n_bins);
  int dropped = 0;
  for (int r = 0; r < static_cast<int>(beams.size()); ++r) {
    const Beam& beam = beams[r];
    ChannelRealization real =
        DeterministicEcho(map, visible, pose, beam.steering_deg, beam.pattern);
    if (clutter) {
      real = Merge(real, ApplyPattern(*clutter, beam.steering_deg, beam.pattern));
    }
    const BinnedEnergy binned = BinEnergies(real, radar);
    dropped += binned.dropped;
    Rng row_rng(DeriveSeed(seed, static_cast<std::uint64_t>(r)));
    const std::vector<double> acc = Accumulate(binned.energies, radar, row_rng);
    for (int j = 0; j < radar.n_bins; ++j) matrix.at(r, j) = acc[j];
  }
  if (stats != nullptr) stats->dropped_mpcs = dropped;
  return matrix;
}

}  // namespace prmap
