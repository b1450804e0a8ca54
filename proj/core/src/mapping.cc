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

#include "prmap/mapping.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace prmap {

void MappingConfig::Validate() const {
  radar.Validate();
  array.Validate();
  if (!(shell_floor >= 0.0)) {
    throw ValidationError("mapping: shell_floor must be >= 0");
  }
  if (!(ekf_beta >= 0.0)) throw ValidationError("mapping: ekf_beta must be >= 0");
  if (!(og_l_occ >= 0.0) || !(og_l_emp >= 0.0)) {
    throw ValidationError("mapping: OG evidence magnitudes must be >= 0");
  }
  if (!(og_clamp > 0.0)) throw ValidationError("mapping: og_clamp must be > 0");
  if (og_reference_rrcs && !(*og_reference_rrcs > 0.0)) {
    throw ValidationError("mapping: og_reference_rrcs must be > 0");
  }
}

double BinRangeLo(const RadarConfig& radar, int bin) {
  return RangeFromRoundTripNs(bin * radar.BinDurationNs());
}

double BinRangeHi(const RadarConfig& radar, int bin) {
  return RangeFromRoundTripNs((bin + 1) * radar.BinDurationNs());
}

double DetectableRangeM(const RadarConfig& radar, double wavelength_m,
                        double peak_two_way_gain, double rrcs, double q) {
  const double margin = q * radar.NoiseStd();
  if (!(margin > 0.0)) return std::numeric_limits<double>::infinity();
  const double energy = radar.n_pulses * radar.pulse_energy * peak_two_way_gain *
                        wavelength_m * wavelength_m * rrcs * rrcs /
                        std::pow(4.0 * kPi, 3);
  return std::pow(energy / margin, 0.25);
}

namespace {

RadarConfig RadarForMatrix(const MappingConfig& config,
                           const EnergyMatrix& matrix, const GridMap& grid,
                           int n_cells) {
  if (n_cells != grid.num_cells()) {
    throw ValidationError("mapping: belief has " + std::to_string(n_cells) +
                          " cells, grid has " + std::to_string(grid.num_cells()));
  }
  if (matrix.cols() != config.radar.n_bins) {
    throw ValidationError("mapping: matrix has " + std::to_string(matrix.cols()) +
                          " bins, radar config expects " +
                          std::to_string(config.radar.n_bins));
  }
  if (std::abs(matrix.bin_duration_ns() - config.radar.BinDurationNs()) >
      1e-9 * config.radar.BinDurationNs()) {
    throw ValidationError("mapping: matrix bin duration differs from the radar");
  }
  RadarConfig radar = config.radar;
  radar.steering_deg = matrix.steering_deg();
  return radar;
}

}  // namespace

EkfBelief EkfInit(int n_cells, double prior_mean, double prior_var) {
  if (n_cells < 1) throw ValidationError("ekf_init: need at least one cell");
  if (!(prior_var > 0.0)) {
    throw ValidationError("ekf_init: prior variance must be > 0");
  }
  if (!(prior_mean >= 0.0)) {
    throw ValidationError("ekf_init: prior mean must be >= 0");
  }
  EkfBelief b;
  b.mean = Eigen::VectorXd::Constant(n_cells, prior_mean);
  b.covariance = Eigen::MatrixXd::Identity(n_cells, n_cells) * prior_var;
  return b;
}

Observation EkfObserveModel(const Eigen::VectorXd& mean,
                            const std::vector<ShellCell>& shell,
                            double wavelength_m, const RadarConfig& radar) {
  const double four_pi = 4.0 * kPi;
  const double geo = wavelength_m * wavelength_m / (four_pi * four_pi * four_pi);
  const double scale = radar.n_pulses * radar.pulse_energy;
  Observation obs;
  double sum = 0.0;
  for (const ShellCell& c : shell) {
    const double d2 = c.distance * c.distance;
    const double kappa = c.weight * geo / (d2 * d2);
    const double s = mean[c.cell];
    obs.shell_cells.push_back(c.cell);
    obs.kappa.push_back(kappa);
    sum += kappa * s * s;
    const double g = 2.0 * scale * kappa * s;
    if (g != 0.0) {
      obs.cells.push_back(c.cell);
      obs.gradient.push_back(g);
    }
  }
  obs.predicted = radar.n_pulses * radar.noise_energy_per_bin + scale * sum;
  return obs;
}

Observation EkfObserveModel(const Eigen::VectorXd& mean,
                            const PoseGeometry& geometry, const Beam& beam,
                            int bin, const MappingConfig& config) {
  const auto shell = geometry.ShellCells(
      beam.steering_deg, beam.pattern, BinRangeLo(config.radar, bin),
      BinRangeHi(config.radar, bin), config.shell_floor);
  return EkfObserveModel(mean, shell, beam.pattern.wavelength_m(), config.radar);
}

void EkfScalarUpdate(EkfBelief* belief, const std::vector<int>& cells,
                     const std::vector<double>& h_row, double innovation,
                     double r) {
  Eigen::MatrixXd& p = belief->covariance;
  const Eigen::Index n = p.rows();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (size_t k = 0; k < cells.size(); ++k) u += p.col(cells[k]) * h_row[k];
  double c = 0.0;
  for (size_t k = 0; k < cells.size(); ++k) c += h_row[k] * u[cells[k]];
  const double s = c + r;
  const Eigen::VectorXd gain = u / s;
  belief->mean += gain * innovation;

  // Joseph form: (I - K H) P (I - K H)^T + K r K^T expanded with u = P H^T.
  Eigen::MatrixXd left(n, 2);
  Eigen::MatrixXd right(n, 2);
  left.col(0) = gain;
  left.col(1) = u - gain * c - gain * r;
  right.col(0) = u;
  right.col(1) = gain;
  p.noalias() -= left * right.transpose();
}

EkfStats EkfUpdate(EkfBelief* belief, const GridMap& grid,
                   const EnergyMatrix& matrix, const MappingConfig& config) {
  config.Validate();
  const RadarConfig radar = RadarForMatrix(
      config, matrix, grid, static_cast<int>(belief->mean.size()));
  const std::vector<Beam> beams =
      MakeBeams(radar, config.array, matrix.pose().heading_deg);
  const PoseGeometry geometry(grid, matrix.pose());
  const double noise_var =
      radar.n_pulses * radar.noise_energy_per_bin * radar.noise_energy_per_bin;

  EkfStats stats;
  for (int b = 0; b < matrix.rows(); ++b) {
    for (int j = 0; j < matrix.cols(); ++j) {
      const double z = matrix.at(b, j);
      if (!std::isfinite(z)) {
        ++stats.skipped_nonfinite;
        continue;
      }
      ++stats.consumed;
      const auto shell = geometry.ShellCells(
          beams[b].steering_deg, beams[b].pattern, BinRangeLo(radar, j),
          BinRangeHi(radar, j), config.shell_floor);
      if (shell.empty()) continue;
      const Observation obs = EkfObserveModel(
          belief->mean, shell, beams[b].pattern.wavelength_m(), radar);
      if (obs.cells.empty()) continue;
      const double r = noise_var + config.ekf_beta * obs.predicted;
      EkfScalarUpdate(belief, obs.cells, obs.gradient, z - obs.predicted, r);
      belief->mean = belief->mean.cwiseMax(0.0);
      ++stats.applied;
    }
  }
  return stats;
}

OgBelief::OgBelief(int n_cells, double prior_prob, double clamp)
    : clamp_(clamp) {
  const double l = std::log(prior_prob / (1.0 - prior_prob));
  const std::int64_t bound = Quantize(clamp_);
  log_odds_.assign(n_cells, std::clamp(Quantize(l), -bound, bound));
}

std::int64_t OgBelief::Quantize(double log_odds) {
  return std::llround(log_odds * kScale);
}

double OgBelief::Probability(int cell) const {
  return 1.0 / (1.0 + std::exp(-LogOdds(cell)));
}

void OgBelief::Apply(const std::vector<std::int64_t>& delta) {
  const std::int64_t bound = Quantize(clamp_);
  for (size_t i = 0; i < log_odds_.size(); ++i) {
    log_odds_[i] = std::clamp(log_odds_[i] + delta[i], -bound, bound);
  }
}

OgBelief OgInit(int n_cells, double prior_prob, double clamp) {
  if (n_cells < 1) throw ValidationError("og_init: need at least one cell");
  if (!(prior_prob > 0.0 && prior_prob < 1.0)) {
    throw ValidationError("og_init: prior probability must lie in (0, 1)");
  }
  if (!(clamp > 0.0)) throw ValidationError("og_init: clamp must be > 0");
  return OgBelief(n_cells, prior_prob, clamp);
}

void OgUpdate(OgBelief* belief, const GridMap& grid, const EnergyMatrix& matrix,
              const MappingConfig& config, const std::vector<int>& entry_order) {
  config.Validate();
  const RadarConfig radar =
      RadarForMatrix(config, matrix, grid, belief->size());
  const std::vector<Beam> beams =
      MakeBeams(radar, config.array, matrix.pose().heading_deg);
  const PoseGeometry geometry(grid, matrix.pose());
  const double threshold = radar.NoiseMean() + config.og_q * radar.NoiseStd();
  const int rows = matrix.rows();
  const int cols = matrix.cols();
  if (static_cast<int>(entry_order.size()) != rows * cols) {
    throw ValidationError("og_update: entry order must cover the matrix");
  }

  std::vector<int> first_detection(rows, cols);
  std::vector<double> half_lobe(rows, 180.0);
  std::vector<double> empty_range(rows, std::numeric_limits<double>::infinity());
  for (int b = 0; b < rows; ++b) {
    if (config.og_reference_rrcs) {
      empty_range[b] = DetectableRangeM(
          radar, config.array.WavelengthM(), beams[b].pattern.PeakTwoWayGain(),
          *config.og_reference_rrcs, config.og_q);
    }
    for (int j = 0; j < cols; ++j) {
      if (matrix.at(b, j) > threshold) {
        first_detection[b] = j;
        break;
      }
    }
    if (!beams[b].pattern.is_delta()) {
      try {
        half_lobe[b] = 0.5 * HalfPowerBeamwidth(beams[b].pattern);
      } catch (const UndefinedBeamwidthError&) {
        half_lobe[b] = 180.0;
      }
    }
  }

  // Expected echo energy of a reference cell per unit two-way gain at 1 m.
  double ref_energy = 0.0;
  const double margin = config.og_q * radar.NoiseStd();
  if (config.og_reference_rrcs) {
    const double lambda = config.array.WavelengthM();
    ref_energy = radar.n_pulses * radar.pulse_energy * lambda * lambda *
                 *config.og_reference_rrcs * *config.og_reference_rrcs /
                 std::pow(4.0 * kPi, 3);
  }
  auto detectable = [&](const ShellCell& c) {
    if (!config.og_reference_rrcs || !(margin > 0.0)) return true;
    const double d2 = c.distance * c.distance;
    return ref_energy * c.weight > margin * d2 * d2;
  };

  std::vector<std::int64_t> delta(belief->size(), 0);
  for (int entry : entry_order) {
    const int b = entry / cols;
    const int j = entry % cols;
    const bool detected = matrix.at(b, j) > threshold;
    if (!detected &&
        (j >= first_detection[b] || BinRangeLo(radar, j) >= empty_range[b])) {
      continue;
    }
    const auto shell = geometry.ShellCells(
        beams[b].steering_deg, beams[b].pattern, BinRangeLo(radar, j),
        BinRangeHi(radar, j), config.shell_floor);
    if (shell.empty()) continue;
    if (detected) {
      double total = 0.0;
      for (const ShellCell& c : shell) total += c.weight;
      for (const ShellCell& c : shell) {
        delta[c.cell] += OgBelief::Quantize(config.og_l_occ * c.weight / total);
      }
    } else {
      double total = 0.0;
      std::vector<const ShellCell*> lobe;
      for (const ShellCell& c : shell) {
        if (std::abs(WrapDeg180(c.bearing_deg - beams[b].steering_deg)) <=
                half_lobe[b] &&
            detectable(c)) {
          lobe.push_back(&c);
          total += c.weight;
        }
      }
      for (const ShellCell* c : lobe) {
        delta[c->cell] -= OgBelief::Quantize(config.og_l_emp * c->weight / total);
      }
    }
  }
  belief->Apply(delta);
}

void OgUpdate(OgBelief* belief, const GridMap& grid, const EnergyMatrix& matrix,
              const MappingConfig& config) {
  std::vector<int> order(static_cast<size_t>(matrix.rows()) * matrix.cols());
  std::iota(order.begin(), order.end(), 0);
  OgUpdate(belief, grid, matrix, config, order);
}

Bitmap TruthBitmap(const GridMap& grid) {
  return {grid.width(), grid.height(), grid.occupancy()};
}

Bitmap ThresholdMap(const EkfBelief& belief, const GridMap& grid, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ValidationError("threshold_map: EKF eta must be a finite RRCS >= 0");
  }
  if (belief.mean.size() != grid.num_cells()) {
    throw ValidationError("threshold_map: belief and grid sizes differ");
  }
  Bitmap out{grid.width(), grid.height(),
             std::vector<std::uint8_t>(grid.num_cells(), 0)};
  for (int i = 0; i < grid.num_cells(); ++i) out.occupied[i] = belief.mean[i] > eta;
  return out;
}

Bitmap ThresholdMap(const OgBelief& belief, const GridMap& grid, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw ValidationError("threshold_map: OG eta must lie in (0, 1)");
  }
  if (belief.size() != grid.num_cells()) {
    throw ValidationError("threshold_map: belief and grid sizes differ");
  }
  Bitmap out{grid.width(), grid.height(),
             std::vector<std::uint8_t>(grid.num_cells(), 0)};
  for (int i = 0; i < grid.num_cells(); ++i) {
    out.occupied[i] = belief.Probability(i) > eta;
  }
  return out;
}

void WritePgm(const Bitmap& bitmap, std::ostream& out) {
  out << "P5\n" << bitmap.width << ' ' << bitmap.height << "\n255\n";
  std::string row(bitmap.width, '\0');
  for (int iy = bitmap.height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < bitmap.width; ++ix) {
      row[ix] = bitmap.occupied[iy * bitmap.width + ix] ? '\0' : '\xff';
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void WriteBeliefCsv(const std::vector<double>& values, const GridMap& grid,
                    std::ostream& out) {
  char buf[64];
  for (int iy = grid.height() - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.width(); ++ix) {
      std::snprintf(buf, sizeof(buf), "%.17g", values[grid.Index(ix, iy)]);
      if (ix > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

std::vector<double> BeliefValues(const EkfBelief& belief) {
  return {belief.mean.data(), belief.mean.data() + belief.mean.size()};
}

std::vector<double> BeliefValues(const OgBelief& belief) {
  std::vector<double> out(belief.size());
  for (int i = 0; i < belief.size(); ++i) out[i] = belief.Probability(i);
  return out;
}

}  // namespace prmap
