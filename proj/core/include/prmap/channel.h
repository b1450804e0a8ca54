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

#ifndef PRMAP_CHANNEL_H_
#define PRMAP_CHANNEL_H_

#include <optional>
#include <ostream>
#include <vector>

#include "prmap/array.h"
#include "prmap/common.h"
#include "prmap/geometry.h"

namespace prmap {

struct Mpc {
  // Round-trip delay.
  double delay_ns = 0.0;
  // Absolute bearing, degrees in [0, 360).
  double aoa_deg = 0.0;
  double power = 0.0;
  std::optional<int> cluster_id;
};

enum class ClusterMode {
  // Cluster count and delays from Poisson arrivals along the delay axis.
  kDelayAxis,
  // Cluster count from arrivals along one lap of the perimeter; delays follow
  // from the centroid positions.
  kPerimeter,
};

struct SvParams {
  double inter_cluster_rate = 0.21;  // 1/ns
  // Std of the one-way delay between adjacent centroid projections.
  double inter_cluster_perimeter_distance_std = 5.02;  // ns
  double intra_cluster_rate = 0.43;  // 1/ns
  double intra_aoa_std = 16.9;       // deg
  double cluster_decay = 10.0;       // ns
  double ray_decay = 4.0;            // ns
  double dp_std = 0.5;               // m

  ClusterMode mode = ClusterMode::kDelayAxis;
  // Power of the first ray of a cluster at zero delay, before antenna gain.
  double reference_power = 1e-6;
  int rays_per_cluster = 8;
  // Delay-axis mode: the first cluster arrives after first_cluster_delay_ns
  // plus an exponential gap; the count is Poisson with mean
  // inter_cluster_rate * cluster_window_ns (at least one cluster).
  double first_cluster_delay_ns = 10.0;
  double cluster_window_ns = 10.0;
  // Delay-axis mode: redraw centroid bearings until adjacent clusters are at
  // least this far apart.
  double min_bearing_separation_deg = 0.0;

  void Validate() const;
};

struct ChannelRealization {
  Pose pose;
  double steering_deg = 0.0;
  // Sorted by delay.
  std::vector<Mpc> mpcs;
};

// A statistical clutter draw for one pose, independent of the beam. Powers
// exclude the antenna gain.
struct ClutterField {
  Pose pose;
  std::vector<Mpc> mpcs;
  // Centroid positions, indexed by cluster id.
  std::vector<Vec2> centroids;
  std::vector<double> cluster_delays_ns;
};

// Occupied cells seen directly from a pose (hard occlusion): some ray from the
// pose through the cell meets it before any other occupied cell.
struct VisibleCell {
  int cell;
  double distance;
  double bearing_deg;
};
std::vector<VisibleCell> VisibleCells(const GridMap& map, const Pose& pose);

// Single-bounce echoes from every visible occupied cell. A delta pattern only
// sees the cell hit by the steering ray.
ChannelRealization DeterministicEcho(const GridMap& map, const Pose& pose,
                                     double steering_deg,
                                     const ArrayPattern& pattern);
ChannelRealization DeterministicEcho(const GridMap& map,
                                     const std::vector<VisibleCell>& visible,
                                     const Pose& pose, double steering_deg,
                                     const ArrayPattern& pattern);

ClutterField SampleClutterField(const SvParams& params, const Layout& layout,
                                const Pose& pose, Rng& rng);
ChannelRealization ApplyPattern(const ClutterField& field, double steering_deg,
                                const ArrayPattern& pattern);

ChannelRealization SampleClutter(const SvParams& params, const Layout& layout,
                                 const Pose& pose, double steering_deg,
                                 const ArrayPattern& pattern, Rng& rng);

// Throws ValidationError when pose or steering differ.
ChannelRealization Merge(const ChannelRealization& echo,
                         const ChannelRealization& clutter);

// Columns: delay_ns,aoa_deg,power,cluster_id (empty for echoes).
void WriteMpcCsv(const ChannelRealization& realization, std::ostream& out);

}  // namespace prmap

#endif  // PRMAP_CHANNEL_H_
