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

#ifndef PRMAP_MPC_H_
#define PRMAP_MPC_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prmap/array.h"
#include "prmap/channel.h"
#include "prmap/frontend.h"
#include "prmap/geometry.h"

namespace prmap {

struct ExtractionConfig {
  // Multiple of the noise floor a peak must exceed.
  double energy_threshold = 6.0;
  // Half-widths of the suppression window. Unset delay defaults to two bins;
  // unset angle defaults to the half-power beamwidth of the row pattern.
  std::optional<double> delay_window_ns;
  std::optional<double> angle_window_deg;
  // Estimated from the matrix when unset.
  std::optional<double> noise_floor;

  void Validate() const;
};

// Median of all cells divided by ln 2.
double EstimateNoiseFloor(const EnergyMatrix& matrix);

// Greedy peak picking. Equal energies are taken in order of smaller bin, then
// smaller row. `patterns_per_row` may be empty when angle_window_deg is set.
std::vector<Mpc> ExtractMpcs(const EnergyMatrix& matrix,
                             const ExtractionConfig& config,
                             const std::vector<ArrayPattern>& patterns_per_row);

struct KMeansResult {
  std::vector<int> labels;
  // k rows of the input dimension.
  std::vector<std::vector<double>> centers;
  double inertia = 0.0;
  // Objective after every Lloyd iteration of the returned restart.
  std::vector<double> history;
};

// Lloyd iterations from k-means++ seeding; the best of `restarts` runs wins.
KMeansResult KMeans(const std::vector<std::vector<double>>& points, int k,
                    std::uint64_t seed, int restarts = 10,
                    int max_iterations = 300);

// Mean silhouette; singleton clusters score 0.
double Silhouette(const std::vector<std::vector<double>>& points,
                  const std::vector<int>& labels);

struct Cluster {
  double delay_ns;
  double aoa_deg;
  std::vector<Mpc> members;
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  double silhouette = 0.0;
};

struct ClusterConfig {
  int k_max = 8;
  double min_silhouette = 0.25;
  int restarts = 10;
  std::uint64_t seed = 0;
};

// K-means over standardized (delay, aoa); K by best mean silhouette.
ClusterSet ClusterMpcs(const std::vector<Mpc>& mpcs, const ClusterConfig& config);

struct FittedValue {
  std::optional<double> estimate;
  int count = 0;
  // 95% normal-approximation half-width.
  std::optional<double> half_width;
};

struct FittedChannelParams {
  FittedValue inter_cluster_rate;
  FittedValue inter_cluster_perimeter_distance_std;
  FittedValue intra_cluster_rate;
  FittedValue intra_aoa_std;
  // Half-normal scale of the centroid distance to the closest edge.
  FittedValue dp_std;
  int n_scans = 0;
  int n_clusters = 0;
  int n_mpcs = 0;
};

// Raw samples pooled over scans.
class FitAccumulator {
 public:
  // `layout` may be null, which skips the perimeter statistics.
  void Add(const ClusterSet& clusters, const Layout* layout, const Pose& pose);
  FittedChannelParams Result() const;

  const std::vector<double>& inter_spacings() const { return inter_; }
  const std::vector<double>& intra_spacings() const { return intra_; }
  const std::vector<double>& aoa_deviations() const { return aoa_dev_; }

 private:
  std::vector<double> inter_;
  std::vector<double> intra_;
  std::vector<double> aoa_dev_;
  std::vector<double> perimeter_ns_;
  std::vector<double> dp_;
  int n_scans_ = 0;
  int n_clusters_ = 0;
  int n_mpcs_ = 0;
};

FittedChannelParams FitParams(const ClusterSet& clusters, const Layout* layout,
                              const Pose& pose);

// Exponential rate MLE, 1 / mean.
double ExponentialRateMle(const std::vector<double>& samples);
// sqrt(2) * mean |x - median(x)|.
double LaplacianStd(const std::vector<double>& samples);

std::string FitReportJson(const FittedChannelParams& params);

}  // namespace prmap

#endif  // PRMAP_MPC_H_
