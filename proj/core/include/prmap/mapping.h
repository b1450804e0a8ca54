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

#ifndef PRMAP_MAPPING_H_
#define PRMAP_MAPPING_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "prmap/array.h"
#include "prmap/frontend.h"
#include "prmap/geometry.h"

namespace prmap {

struct MappingConfig {
  // Energy constants, bin count, steering mode and beam type of the radar that
  // produced the matrices. The steering list is taken from each matrix.
  RadarConfig radar;
  ArrayConfig array;
  double shell_floor = kDefaultShellFloor;

  // EKF measurement variance R = N_p * N0^2 + beta * h.
  double ekf_beta = 0.1;

  double og_l_occ = 1.0986122886681098;  // ln 3
  double og_l_emp = 0.69314718055994531;  // ln 2
  // Detection threshold in noise standard deviations above the noise mean.
  double og_q = 4.0;
  double og_clamp = 10.0;
  // Emptiness evidence only reaches cells that would have been detected had
  // they held a reflector of this RRCS: the expected echo through the cell's
  // own two-way gain must exceed the detection margin. Unset disables the
  // check.
  std::optional<double> og_reference_rrcs = 1.0;

  void Validate() const;
};

// Range interval of delay bin j: [j, j + 1) * T_bin * c / 2.
double BinRangeLo(const RadarConfig& radar, int bin);
double BinRangeHi(const RadarConfig& radar, int bin);

// Largest range at which a cell of RRCS `rrcs` on the axis of a beam with the
// given peak two-way gain produces an expected echo energy above q noise
// standard deviations. Infinite when the noise is zero.
double DetectableRangeM(const RadarConfig& radar, double wavelength_m,
                        double peak_two_way_gain, double rrcs, double q);

struct EkfBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

struct EkfStats {
  // Finite entries processed, including those whose Jacobian row is zero.
  long consumed = 0;
  long skipped_nonfinite = 0;
  // Entries that changed the belief.
  long applied = 0;
};

// Throws ValidationError unless prior_var > 0 and prior_mean >= 0.
EkfBelief EkfInit(int n_cells, double prior_mean, double prior_var);

struct Observation {
  double predicted;
  // Sparse gradient: cells with a nonzero partial derivative.
  std::vector<int> cells;
  std::vector<double> gradient;
  // Every cell of the shell with its kappa, zero-valued cells included.
  std::vector<int> shell_cells;
  std::vector<double> kappa;
};

// kappa_i = two-way gain * lambda^2 / ((4 pi)^3 d_i^4).
Observation EkfObserveModel(const Eigen::VectorXd& mean,
                            const std::vector<ShellCell>& shell,
                            double wavelength_m, const RadarConfig& radar);
Observation EkfObserveModel(const Eigen::VectorXd& mean,
                            const PoseGeometry& geometry, const Beam& beam,
                            int bin, const MappingConfig& config);

// One scalar update with a given linearization; used by EkfUpdate and exposed
// for oracle tests. The mean is not projected here.
void EkfScalarUpdate(EkfBelief* belief, const std::vector<int>& cells,
                     const std::vector<double>& h_row, double innovation,
                     double r);

// Sequential updates over every (row, bin) entry in row-major order.
EkfStats EkfUpdate(EkfBelief* belief, const GridMap& grid,
                   const EnergyMatrix& matrix, const MappingConfig& config);

class OgBelief {
 public:
  // Log-odds are kept in fixed point so that evidence sums are exact.
  static constexpr double kScale = 4294967296.0;  // 2^32

  OgBelief() = default;
  OgBelief(int n_cells, double prior_prob, double clamp = 10.0);

  int size() const { return static_cast<int>(log_odds_.size()); }
  double clamp() const { return clamp_; }
  double LogOdds(int cell) const { return log_odds_[cell] / kScale; }
  double Probability(int cell) const;
  std::int64_t raw(int cell) const { return log_odds_[cell]; }

  static std::int64_t Quantize(double log_odds);
  // Adds fixed-point deltas, then clamps.
  void Apply(const std::vector<std::int64_t>& delta);

 private:
  std::vector<std::int64_t> log_odds_;
  double clamp_ = 10.0;
};

// Throws ValidationError unless 0 < prior_prob < 1.
OgBelief OgInit(int n_cells, double prior_prob, double clamp = 10.0);

// Gain-weighted evidence sharing. Emptiness evidence reaches only the main
// lobe of shells in front of the first detection of a row.
void OgUpdate(OgBelief* belief, const GridMap& grid, const EnergyMatrix& matrix,
              const MappingConfig& config);

// Same rule with the (row, bin) entries visited in the given order.
void OgUpdate(OgBelief* belief, const GridMap& grid, const EnergyMatrix& matrix,
              const MappingConfig& config, const std::vector<int>& entry_order);

struct Bitmap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> occupied;
};

Bitmap TruthBitmap(const GridMap& grid);
// occupied = mean RRCS > eta; eta must be >= 0.
Bitmap ThresholdMap(const EkfBelief& belief, const GridMap& grid, double eta);
// occupied = probability > eta; eta must lie in (0, 1).
Bitmap ThresholdMap(const OgBelief& belief, const GridMap& grid, double eta);

// P5, occupied black. The first image row is the top of the map (largest y).
void WritePgm(const Bitmap& bitmap, std::ostream& out);
// One line per grid row, top row first.
void WriteBeliefCsv(const std::vector<double>& values, const GridMap& grid,
                    std::ostream& out);
std::vector<double> BeliefValues(const EkfBelief& belief);
std::vector<double> BeliefValues(const OgBelief& belief);

}  // namespace prmap

#endif  // PRMAP_MAPPING_H_
