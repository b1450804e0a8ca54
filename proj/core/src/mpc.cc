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

#include "prmap/mpc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace prmap {

void ExtractionConfig::Validate() const {
  if (!(energy_threshold > 0.0)) {
    throw ValidationError("extraction: energy_threshold must be > 0");
  }
  if (delay_window_ns && !(*delay_window_ns > 0.0)) {
    throw ValidationError("extraction: delay_window must be > 0");
  }
  if (angle_window_deg && !(*angle_window_deg > 0.0)) {
    throw ValidationError("extraction: angle_window must be > 0");
  }
  if (noise_floor && !(*noise_floor > 0.0)) {
    throw ValidationError("extraction: noise_floor must be > 0");
  }
}

namespace {

double Median(std::vector<double> v) {
  const size_t n = v.size();
  std::sort(v.begin(), v.end());
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

}  // namespace

double EstimateNoiseFloor(const EnergyMatrix& matrix) {
  if (matrix.values().empty()) {
    throw ValidationError("noise floor: empty matrix");
  }
  return Median(matrix.values()) / std::log(2.0);
}

std::vector<Mpc> ExtractMpcs(const EnergyMatrix& matrix,
                             const ExtractionConfig& config,
                             const std::vector<ArrayPattern>& patterns_per_row) {
  config.Validate();
  const int rows = matrix.rows();
  const int cols = matrix.cols();
  if (rows == 0 || cols == 0) {
    throw ValidationError("extract_mpcs: empty matrix");
  }
  if (!config.angle_window_deg &&
      static_cast<int>(patterns_per_row.size()) != rows) {
    throw ValidationError(
        "extract_mpcs: need one pattern per row without an angle window");
  }
  const double t_bin = matrix.bin_duration_ns();
  const double floor =
      config.noise_floor ? *config.noise_floor : EstimateNoiseFloor(matrix);
  const double threshold = config.energy_threshold * floor;
  const double delay_window = config.delay_window_ns.value_or(2.0 * t_bin);

  std::vector<double> angle_window(rows);
  for (int r = 0; r < rows; ++r) {
    angle_window[r] = config.angle_window_deg
                          ? *config.angle_window_deg
                          : HalfPowerBeamwidth(patterns_per_row[r]);
  }

  std::vector<int> order;
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < cols; ++j) {
      if (matrix.at(r, j) > threshold) order.push_back(r * cols + j);
    }
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ea = matrix.values()[a];
    const double eb = matrix.values()[b];
    if (ea != eb) return ea > eb;
    if (a % cols != b % cols) return a % cols < b % cols;
    return a / cols < b / cols;
  });

  std::vector<char> suppressed(static_cast<size_t>(rows) * cols, 0);
  const int bin_reach = static_cast<int>(std::floor(delay_window / t_bin + 1e-9));
  std::vector<Mpc> out;
  for (int idx : order) {
    if (suppressed[idx]) continue;
    const int r = idx / cols;
    const int j = idx % cols;
    const double aoa = matrix.AbsoluteSteering(r);
    out.push_back({(j + 0.5) * t_bin, aoa, matrix.at(r, j), std::nullopt});
    for (int rr = 0; rr < rows; ++rr) {
      const double diff =
          std::abs(WrapDeg180(matrix.AbsoluteSteering(rr) - aoa));
      if (diff > angle_window[r] + 1e-9) continue;
      const int lo = std::max(0, j - bin_reach);
      const int hi = std::min(cols - 1, j + bin_reach);
      for (int jj = lo; jj <= hi; ++jj) suppressed[rr * cols + jj] = 1;
    }
  }
  return out;
}

namespace {

double SquaredDistance(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double s = 0.0;
  for (size_t d = 0; d < a.size(); ++d) {
    const double t = a[d] - b[d];
    s += t * t;
  }
  return s;
}

KMeansResult LloydRun(const std::vector<std::vector<double>>& points, int k,
                      Rng& rng, int max_iterations) {
  const int n = static_cast<int>(points.size());
  const size_t dim = points[0].size();
  KMeansResult res;

  // k-means++ seeding.
  std::uniform_int_distribution<int> pick(0, n - 1);
  res.centers.push_back(points[pick(rng)]);
  std::vector<double> d2(n);
  while (static_cast<int>(res.centers.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : res.centers) best = std::min(best, SquaredDistance(points[i], c));
      d2[i] = best;
      total += best;
    }
    int chosen = pick(rng);
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (int i = 0; i < n; ++i) {
        target -= d2[i];
        if (target <= 0.0) {
          chosen = i;
          break;
        }
        chosen = i;
      }
    }
    res.centers.push_back(points[chosen]);
  }

  res.labels.assign(n, -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best_c = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = SquaredDistance(points[i], res.centers[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      if (res.labels[i] != best_c) changed = true;
      res.labels[i] = best_c;
      inertia += best;
    }
    res.history.push_back(inertia);
    res.inertia = inertia;
    if (!changed && iter > 0) break;

    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      ++counts[res.labels[i]];
      for (size_t d = 0; d < dim; ++d) sums[res.labels[i]][d] += points[i][d];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // keep the old center
      for (size_t d = 0; d < dim; ++d) res.centers[c][d] = sums[c][d] / counts[c];
    }
  }
  // Final objective for the converged centers.
  double inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    inertia += SquaredDistance(points[i], res.centers[res.labels[i]]);
  }
  if (inertia < res.inertia) res.history.push_back(inertia);
  res.inertia = inertia;
  return res;
}

}  // namespace

KMeansResult KMeans(const std::vector<std::vector<double>>& points, int k,
                    std::uint64_t seed, int restarts, int max_iterations) {
  if (points.empty()) throw ValidationError("kmeans: no points");
  if (k < 1 || k > static_cast<int>(points.size())) {
    throw ValidationError("kmeans: k must lie in [1, number of points]");
  }
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(k),
                       static_cast<std::uint64_t>(r)));
    KMeansResult run = LloydRun(points, k, rng, max_iterations);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

double Silhouette(const std::vector<std::vector<double>>& points,
                  const std::vector<int>& labels) {
  const int n = static_cast<int>(points.size());
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> counts(k, 0);
  for (int l : labels) ++counts[l];
  double total = 0.0;
  std::vector<double> sum(k);
  for (int i = 0; i < n; ++i) {
    if (counts[labels[i]] <= 1) continue;
    std::fill(sum.begin(), sum.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[labels[j]] += std::sqrt(SquaredDistance(points[i], points[j]));
    }
    const double a = sum[labels[i]] / (counts[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == labels[i] || counts[c] == 0) continue;
      b = std::min(b, sum[c] / counts[c]);
    }
    if (!std::isfinite(b)) continue;
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / n;
}

ClusterSet ClusterMpcs(const std::vector<Mpc>& mpcs, const ClusterConfig& config) {
  if (mpcs.empty()) throw ValidationError("cluster_mpcs: no MPCs");
  if (config.k_max < 1) throw ValidationError("cluster_mpcs: k_max must be >= 1");
  const int n = static_cast<int>(mpcs.size());

  // Cut the circle at the widest empty arc so that angles are linear.
  std::vector<double> angles;
  for (const Mpc& m : mpcs) angles.push_back(NormalizeDeg(m.aoa_deg));
  std::vector<double> sorted = angles;
  std::sort(sorted.begin(), sorted.end());
  double cut = sorted.front();
  double widest = 360.0 - sorted.back() + sorted.front();
  for (int i = 1; i < n; ++i) {
    if (sorted[i] - sorted[i - 1] > widest) {
      widest = sorted[i] - sorted[i - 1];
      cut = sorted[i];
    }
  }
  std::vector<std::vector<double>> raw(n, std::vector<double>(2));
  for (int i = 0; i < n; ++i) {
    raw[i][0] = mpcs[i].delay_ns;
    raw[i][1] = NormalizeDeg(angles[i] - cut);
  }

  std::vector<std::vector<double>> z = raw;
  for (int d = 0; d < 2; ++d) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += raw[i][d];
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += (raw[i][d] - mean) * (raw[i][d] - mean);
    double sd = std::sqrt(var / n);
    if (!(sd > 0.0)) sd = 1.0;
    for (int i = 0; i < n; ++i) z[i][d] = (raw[i][d] - mean) / sd;
  }

  int distinct = 0;
  {
    std::vector<std::vector<double>> uniq = z;
    std::sort(uniq.begin(), uniq.end());
    distinct = static_cast<int>(std::unique(uniq.begin(), uniq.end()) - uniq.begin());
  }

  std::vector<int> labels(n, 0);
  double best_sil = -std::numeric_limits<double>::infinity();
  const int k_top = std::min({config.k_max, n, distinct});
  for (int k = 2; k <= k_top; ++k) {
    KMeansResult km = KMeans(z, k, config.seed, config.restarts);
    const double s = Silhouette(z, km.labels);
    if (s > best_sil) {
      best_sil = s;
      if (s >= config.min_silhouette) labels = km.labels;
    }
  }
  ClusterSet out;
  out.silhouette = std::isfinite(best_sil) && best_sil >= config.min_silhouette
                       ? best_sil
                       : 0.0;
  if (!(best_sil >= config.min_silhouette)) std::fill(labels.begin(), labels.end(), 0);

  // Relabel densely and build clusters ordered by centroid delay.
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<Cluster> clusters;
  for (int c = 0; c < k; ++c) {
    Cluster cl{0.0, 0.0, {}};
    double lin = 0.0;
    for (int i = 0; i < n; ++i) {
      if (labels[i] != c) continue;
      cl.members.push_back(mpcs[i]);
      cl.delay_ns += raw[i][0];
      lin += raw[i][1];
    }
    if (cl.members.empty()) continue;
    const double m = static_cast<double>(cl.members.size());
    cl.delay_ns /= m;
    cl.aoa_deg = NormalizeDeg(lin / m + cut);
    clusters.push_back(std::move(cl));
  }
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const Cluster& a, const Cluster& b) {
                     return a.delay_ns < b.delay_ns;
                   });
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (Mpc& m : clusters[c].members) m.cluster_id = static_cast<int>(c);
  }
  out.clusters = std::move(clusters);
  return out;
}

double ExponentialRateMle(const std::vector<double>& samples) {
  if (samples.empty()) throw ValidationError("exponential fit: no samples");
  return 1.0 / Mean(samples);
}

double LaplacianStd(const std::vector<double>& samples) {
  if (samples.empty()) throw ValidationError("laplacian fit: no samples");
  const double med = Median(samples);
  double s = 0.0;
  for (double x : samples) s += std::abs(x - med);
  return std::sqrt(2.0) * s / samples.size();
}

void FitAccumulator::Add(const ClusterSet& clusters, const Layout* layout,
                         const Pose& pose) {
  ++n_scans_;
  std::vector<double> delays;
  std::vector<double> arc;
  for (const Cluster& c : clusters.clusters) {
    ++n_clusters_;
    n_mpcs_ += static_cast<int>(c.members.size());
    delays.push_back(c.delay_ns);

    std::vector<double> member_delays;
    double sx = 0.0;
    double sy = 0.0;
    for (const Mpc& m : c.members) {
      member_delays.push_back(m.delay_ns);
      sx += std::cos(DegToRad(m.aoa_deg));
      sy += std::sin(DegToRad(m.aoa_deg));
    }
    std::sort(member_delays.begin(), member_delays.end());
    for (size_t i = 1; i < member_delays.size(); ++i) {
      intra_.push_back(member_delays[i] - member_delays[i - 1]);
    }
    if (c.members.size() >= 2) {
      const double ref = RadToDeg(std::atan2(sy, sx));
      std::vector<double> offsets;
      for (const Mpc& m : c.members) offsets.push_back(WrapDeg180(m.aoa_deg - ref));
      const double med = Median(offsets);
      for (double o : offsets) aoa_dev_.push_back(std::abs(o - med));
    }

    if (layout != nullptr) {
      const Vec2 p = pose.position +
                     UnitVector(c.aoa_deg) * RangeFromRoundTripNs(c.delay_ns);
      if (layout->Contains(p)) {
        const PerimeterProjection proj = ProjectOntoPerimeter(*layout, p);
        dp_.push_back(proj.distance);
        arc.push_back(proj.arc_length);
      }
    }
  }
  std::sort(delays.begin(), delays.end());
  for (size_t i = 1; i < delays.size(); ++i) {
    inter_.push_back(delays[i] - delays[i - 1]);
  }
  std::sort(arc.begin(), arc.end());
  for (size_t i = 1; i < arc.size(); ++i) {
    perimeter_ns_.push_back((arc[i] - arc[i - 1]) / kSpeedOfLight);
  }
}

FittedChannelParams FitAccumulator::Result() const {
  constexpr double kZ = 1.959963984540054;
  FittedChannelParams out;
  out.n_scans = n_scans_;
  out.n_clusters = n_clusters_;
  out.n_mpcs = n_mpcs_;
  auto rate = [&](const std::vector<double>& s, FittedValue* v) {
    v->count = static_cast<int>(s.size());
    const double mean = s.empty() ? 0.0 : Mean(s);
    if (s.empty() || !(mean > 0.0)) return;
    v->estimate = 1.0 / mean;
    v->half_width = kZ * *v->estimate / std::sqrt(static_cast<double>(s.size()));
  };
  rate(inter_, &out.inter_cluster_rate);
  rate(intra_, &out.intra_cluster_rate);

  out.intra_aoa_std.count = static_cast<int>(aoa_dev_.size());
  if (!aoa_dev_.empty()) {
    const double est = std::sqrt(2.0) * Mean(aoa_dev_);
    out.intra_aoa_std.estimate = est;
    out.intra_aoa_std.half_width =
        kZ * est / std::sqrt(static_cast<double>(aoa_dev_.size()));
  }

  out.inter_cluster_perimeter_distance_std.count =
      static_cast<int>(perimeter_ns_.size());
  if (perimeter_ns_.size() >= 2) {
    const double mean = Mean(perimeter_ns_);
    double var = 0.0;
    for (double x : perimeter_ns_) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / (perimeter_ns_.size() - 1));
    out.inter_cluster_perimeter_distance_std.estimate = sd;
    out.inter_cluster_perimeter_distance_std.half_width =
        kZ * sd / std::sqrt(2.0 * (perimeter_ns_.size() - 1));
  }

  out.dp_std.count = static_cast<int>(dp_.size());
  if (!dp_.empty()) {
    double s2 = 0.0;
    for (double d : dp_) s2 += d * d;
    const double sigma = std::sqrt(s2 / dp_.size());
    out.dp_std.estimate = sigma;
    out.dp_std.half_width = kZ * sigma / std::sqrt(2.0 * dp_.size());
  }
  return out;
}

FittedChannelParams FitParams(const ClusterSet& clusters, const Layout* layout,
                              const Pose& pose) {
  if (layout != nullptr && !layout->Contains(pose.position)) {
    throw ValidationError("fit_params: pose lies outside the layout");
  }
  FitAccumulator acc;
  acc.Add(clusters, layout, pose);
  return acc.Result();
}

std::string FitReportJson(const FittedChannelParams& params) {
  using nlohmann::ordered_json;
  auto entry = [](const char* name, const char* unit, const char* dist,
                  const FittedValue& v) {
    ordered_json j;
    j["parameter"] = name;
    j["unit"] = unit;
    j["distribution"] = dist;
    j["estimate"] = v.estimate ? ordered_json(*v.estimate) : ordered_json(nullptr);
    j["half_width_95"] =
        v.half_width ? ordered_json(*v.half_width) : ordered_json(nullptr);
    j["sample_count"] = v.count;
    return j;
  };
  ordered_json report;
  report["n_scans"] = params.n_scans;
  report["n_clusters"] = params.n_clusters;
  report["n_mpcs"] = params.n_mpcs;
  report["parameters"] = ordered_json::array({
      entry("inter_cluster_rate", "1/ns", "exponential", params.inter_cluster_rate),
      entry("inter_cluster_perimeter_distance_std", "ns", "-",
            params.inter_cluster_perimeter_distance_std),
      entry("intra_cluster_rate", "1/ns", "exponential", params.intra_cluster_rate),
      entry("intra_aoa_std", "deg", "laplacian", params.intra_aoa_std),
      entry("dp_std", "m", "half-normal", params.dp_std),
  });
  return report.dump(2) + "\n";
}

}  // namespace prmap
