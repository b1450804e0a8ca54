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

#include "prmap/channel.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <string>

namespace prmap {

void SvParams::Validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw ValidationError(std::string("sv params: ") + name + " must be > 0");
    }
  };
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) {
      throw ValidationError(std::string("sv params: ") + name + " must be >= 0");
    }
  };
  positive(inter_cluster_rate, "inter_cluster_rate");
  positive(intra_cluster_rate, "intra_cluster_rate");
  positive(cluster_decay, "cluster_decay");
  positive(ray_decay, "ray_decay");
  nonneg(inter_cluster_perimeter_distance_std,
         "inter_cluster_perimeter_distance_std");
  nonneg(intra_aoa_std, "intra_aoa_std");
  nonneg(dp_std, "dp_std");
  nonneg(reference_power, "reference_power");
  nonneg(first_cluster_delay_ns, "first_cluster_delay_ns");
  positive(cluster_window_ns, "cluster_window_ns");
  nonneg(min_bearing_separation_deg, "min_bearing_separation_deg");
  if (rays_per_cluster < 1) {
    throw ValidationError("sv params: rays_per_cluster must be >= 1");
  }
}

std::vector<VisibleCell> VisibleCells(const GridMap& map, const Pose& pose) {
  if (!map.Contains(pose.position)) {
    throw ValidationError("deterministic_echo: pose lies outside the grid");
  }
  constexpr int kSubRays = 16;
  std::vector<VisibleCell> out;
  for (int i = 0; i < map.num_cells(); ++i) {
    if (!map.occupied(i)) continue;
    const Vec2 c = map.CellCenter(i);
    const double d = (c - pose.position).Norm();
    if (d < 1e-12) continue;
    const double bearing = BearingDeg(pose.position, c);
    auto first_hit = [&](double deg) {
      const auto hit = RayCast(map, pose, deg);
      return hit && hit->cell == i;
    };
    bool visible = first_hit(bearing);
    if (!visible) {
      // Angular span of the cell square seen from the pose.
      const double h = 0.5 * map.resolution();
      double lo = 0.0;
      double hi = 0.0;
      for (double dx : {-h, h}) {
        for (double dy : {-h, h}) {
          const double off =
              WrapDeg180(BearingDeg(pose.position, c + Vec2{dx, dy}) - bearing);
          lo = std::min(lo, off);
          hi = std::max(hi, off);
        }
      }
      for (int k = 0; k < kSubRays && !visible; ++k) {
        visible = first_hit(bearing + lo + (hi - lo) * (k + 0.5) / kSubRays);
      }
    }
    if (visible) out.push_back({i, d, bearing});
  }
  return out;
}

namespace {

double EchoPower(double gain2, double wavelength, double rrcs, double d) {
  const double four_pi = 4.0 * kPi;
  return gain2 * wavelength * wavelength * rrcs * rrcs /
         (four_pi * four_pi * four_pi * d * d * d * d);
}

void SortByDelay(std::vector<Mpc>* mpcs) {
  std::stable_sort(mpcs->begin(), mpcs->end(), [](const Mpc& a, const Mpc& b) {
    return a.delay_ns < b.delay_ns;
  });
}

}  // namespace

ChannelRealization DeterministicEcho(const GridMap& map,
                                     const std::vector<VisibleCell>& visible,
                                     const Pose& pose, double steering_deg,
                                     const ArrayPattern& pattern) {
  ChannelRealization out{pose, steering_deg, {}};
  const double lambda = pattern.wavelength_m();
  if (pattern.is_delta()) {
    const auto hit = RayCast(map, pose, steering_deg);
    if (hit) {
      const double d = hit->distance;
      out.mpcs.push_back({RoundTripDelayNs(d), NormalizeDeg(steering_deg),
                          EchoPower(1.0, lambda, map.rrcs(hit->cell), d),
                          std::nullopt});
    }
    return out;
  }
  for (const VisibleCell& v : visible) {
    const double g2 = TwoWayGain(pattern, v.bearing_deg - steering_deg);
    out.mpcs.push_back({RoundTripDelayNs(v.distance), v.bearing_deg,
                        EchoPower(g2, lambda, map.rrcs(v.cell), v.distance),
                        std::nullopt});
  }
  SortByDelay(&out.mpcs);
  return out;
}

ChannelRealization DeterministicEcho(const GridMap& map, const Pose& pose,
                                     double steering_deg,
                                     const ArrayPattern& pattern) {
  if (!map.Contains(pose.position)) {
    throw ValidationError("deterministic_echo: pose lies outside the grid");
  }
  std::vector<VisibleCell> visible;
  if (!pattern.is_delta()) visible = VisibleCells(map, pose);
  return DeterministicEcho(map, visible, pose, steering_deg, pattern);
}

namespace {

// Laplacian with scale b as the difference of two exponentials.
double SampleLaplace(double b, Rng& rng) {
  if (b == 0.0) return 0.0;
  std::exponential_distribution<double> e(1.0 / b);
  const double x = e(rng);
  return x - e(rng);
}

// Centroid pushed inward from the perimeter point at arc-length s.
Vec2 CentroidAt(const Layout& layout, double s, double offset) {
  const Vec2 base = layout.PerimeterPoint(s);
  const Vec2 normal = layout.InwardNormal(s);
  for (int k = 0; k < 40; ++k) {
    const Vec2 p = base + normal * offset;
    if (layout.Contains(p)) return p;
    offset *= 0.5;
  }
  return base;
}

std::vector<Vec2> PlaceAlongPerimeter(const SvParams& params,
                                      const Layout& layout, int count,
                                      Rng& rng) {
  const double length = layout.perimeter_length();
  const double mean_gap_m =
      params.inter_cluster_perimeter_distance_std * kSpeedOfLight;
  std::uniform_real_distribution<double> start(0.0, length);
  std::normal_distribution<double> dp(0.0, 1.0);
  const double s0 = start(rng);
  double travelled = 0.0;
  std::vector<Vec2> out;
  // A negative count means one lap of the perimeter.
  while (true) {
    const double offset = std::abs(dp(rng)) * params.dp_std;
    out.push_back(CentroidAt(layout, s0 + travelled, offset));
    if (count >= 0 && static_cast<int>(out.size()) >= count) break;
    if (mean_gap_m == 0.0) {
      if (count < 0) break;
      continue;
    }
    travelled += std::exponential_distribution<double>(1.0 / mean_gap_m)(rng);
    if (count < 0 && travelled >= length) break;
  }
  return out;
}

bool BearingsSeparated(std::vector<double> bearings, double min_sep) {
  if (bearings.size() < 2 || min_sep <= 0.0) return true;
  std::sort(bearings.begin(), bearings.end());
  for (size_t i = 0; i < bearings.size(); ++i) {
    const double next = i + 1 < bearings.size() ? bearings[i + 1]
                                                : bearings[0] + 360.0;
    if (next - bearings[i] < min_sep) return false;
  }
  return true;
}

}  // namespace

ClutterField SampleClutterField(const SvParams& params, const Layout& layout,
                                const Pose& pose, Rng& rng) {
  params.Validate();
  if (!layout.Contains(pose.position)) {
    throw ValidationError("sample_clutter: pose lies outside the layout");
  }
  ClutterField field;
  field.pose = pose;

  if (params.mode == ClusterMode::kPerimeter) {
    field.centroids = PlaceAlongPerimeter(params, layout, -1, rng);
    for (const Vec2& c : field.centroids) {
      field.cluster_delays_ns.push_back(
          RoundTripDelayNs((c - pose.position).Norm()));
    }
  } else {
    std::poisson_distribution<int> count_dist(params.inter_cluster_rate *
                                              params.cluster_window_ns);
    const int count = std::max(1, count_dist(rng));
    std::exponential_distribution<double> gap(params.inter_cluster_rate);
    double t = params.first_cluster_delay_ns;
    for (int k = 0; k < count; ++k) {
      t += gap(rng);
      field.cluster_delays_ns.push_back(t);
    }
    std::vector<Vec2> placed;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      placed = PlaceAlongPerimeter(params, layout, count, rng);
      std::vector<double> bearings;
      for (const Vec2& c : placed) bearings.push_back(BearingDeg(pose.position, c));
      if (BearingsSeparated(bearings, params.min_bearing_separation_deg)) break;
    }
    for (int k = 0; k < count; ++k) {
      const double bearing = BearingDeg(pose.position, placed[k]);
      const double range = RangeFromRoundTripNs(field.cluster_delays_ns[k]);
      field.centroids.push_back(pose.position + UnitVector(bearing) * range);
    }
  }

  std::exponential_distribution<double> ray_gap(params.intra_cluster_rate);
  const double b = params.intra_aoa_std / std::sqrt(2.0);
  const int m = params.rays_per_cluster;
  for (size_t k = 0; k < field.centroids.size(); ++k) {
    const double t_cluster = field.cluster_delays_ns[k];
    const double bearing = BearingDeg(pose.position, field.centroids[k]);
    std::vector<double> excess(m, 0.0);
    for (int r = 1; r < m; ++r) excess[r] = excess[r - 1] + ray_gap(rng);
    // Rays are centred so the member mean delay equals the cluster delay.
    const double mean = std::accumulate(excess.begin(), excess.end(), 0.0) / m;
    const double cluster_power =
        params.reference_power * std::exp(-t_cluster / params.cluster_decay);
    for (int r = 0; r < m; ++r) {
      const double aoa = NormalizeDeg(bearing + SampleLaplace(b, rng));
      const double delay = t_cluster + excess[r] - mean;
      if (delay < 0.0) continue;
      field.mpcs.push_back({delay, aoa,
                            cluster_power * std::exp(-excess[r] / params.ray_decay),
                            static_cast<int>(k)});
    }
  }
  SortByDelay(&field.mpcs);
  return field;
}

ChannelRealization ApplyPattern(const ClutterField& field, double steering_deg,
                                const ArrayPattern& pattern) {
  ChannelRealization out{field.pose, steering_deg, {}};
  out.mpcs.reserve(field.mpcs.size());
  for (const Mpc& mpc : field.mpcs) {
    Mpc weighted = mpc;
    weighted.power *= TwoWayGain(pattern, mpc.aoa_deg - steering_deg);
    out.mpcs.push_back(weighted);
  }
  return out;
}

ChannelRealization SampleClutter(const SvParams& params, const Layout& layout,
                                 const Pose& pose, double steering_deg,
                                 const ArrayPattern& pattern, Rng& rng) {
  return ApplyPattern(SampleClutterField(params, layout, pose, rng),
                      steering_deg, pattern);
}

ChannelRealization Merge(const ChannelRealization& echo,
                         const ChannelRealization& clutter) {
  if (!(echo.pose.position == clutter.pose.position) ||
      echo.pose.heading_deg != clutter.pose.heading_deg ||
      echo.steering_deg != clutter.steering_deg) {
    throw ValidationError("merge: realizations differ in pose or steering");
  }
  ChannelRealization out{echo.pose, echo.steering_deg, echo.mpcs};
  out.mpcs.insert(out.mpcs.end(), clutter.mpcs.begin(), clutter.mpcs.end());
  SortByDelay(&out.mpcs);
  return out;
}

void WriteMpcCsv(const ChannelRealization& realization, std::ostream& out) {
  out << "delay_ns,aoa_deg,power,cluster_id\n";
  char buf[128];
  for (const Mpc& m : realization.mpcs) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,", m.delay_ns,
                  m.aoa_deg, m.power);
    out << buf;
    if (m.cluster_id) out << *m.cluster_id;
    out << '\n';
  }
}

}  // namespace prmap
