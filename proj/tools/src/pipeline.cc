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

#include "prmap_app/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace prmap::app {

namespace {

constexpr std::uint64_t kPoseStream = 0x9053ULL;

}  // namespace

Algorithm ParseAlgorithm(const std::string& name) {
  if (name == "ekf") return Algorithm::kEkf;
  if (name == "og") return Algorithm::kOg;
  throw ValidationError("unknown algorithm '" + name + "' (expected ekf or og)");
}

const char* AlgorithmName(Algorithm algorithm) {
  return algorithm == Algorithm::kEkf ? "ekf" : "og";
}

void ParallelFor(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t PoseSeed(std::uint64_t seed, int pose_index) {
  return DeriveSeed(seed, kPoseStream, static_cast<std::uint64_t>(pose_index));
}

std::vector<EnergyMatrix> SimulateScans(const Scenario& scenario,
                                        std::uint64_t seed, int workers) {
  scenario.Validate();
  const GridMap grid = scenario.Grid();
  const int n = static_cast<int>(scenario.trajectory.size());
  std::vector<std::optional<EnergyMatrix>> slots(n);
  ParallelFor(n, workers, [&](int k) {
    slots[k] = Scan(grid, &*scenario.layout, scenario.trajectory[k],
                    scenario.radar, scenario.array, scenario.sv,
                    PoseSeed(seed, k));
  });
  std::vector<EnergyMatrix> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

MapResult RunMap(const Scenario& scenario,
                 const std::vector<EnergyMatrix>& scans, Algorithm algorithm,
                 double eta, const MapPriors& priors) {
  if (scans.empty()) throw ValidationError("map: no energy matrices");
  const GridMap grid = scenario.Grid();
  const MappingConfig config = scenario.Mapping();
  MapResult out;
  out.truth = TruthBitmap(grid);
  if (algorithm == Algorithm::kEkf) {
    EkfBelief belief =
        EkfInit(grid.num_cells(), priors.ekf_prior_mean, priors.ekf_prior_var);
    for (const EnergyMatrix& m : scans) EkfUpdate(&belief, grid, m, config);
    out.estimate = ThresholdMap(belief, grid, eta);
    out.belief = BeliefValues(belief);
  } else {
    OgBelief belief = OgInit(grid.num_cells(), priors.og_prior, config.og_clamp);
    for (const EnergyMatrix& m : scans) OgUpdate(&belief, grid, m, config);
    out.estimate = ThresholdMap(belief, grid, eta);
    out.belief = BeliefValues(belief);
  }
  out.error = MapError(out.estimate, out.truth);
  return out;
}

FittedChannelParams FitMatrices(const std::vector<EnergyMatrix>& matrices,
                                const Layout* layout, const ArrayConfig& array,
                                const RadarConfig& radar,
                                const FitSettings& settings, std::uint64_t seed,
                                int workers) {
  if (matrices.empty()) throw ValidationError("fit: no energy matrices");
  const int n = static_cast<int>(matrices.size());
  std::vector<ClusterSet> sets(n);
  ParallelFor(n, workers, [&](int i) {
    const EnergyMatrix& m = matrices[i];
    RadarConfig r = radar;
    r.steering_deg = m.steering_deg();
    std::vector<ArrayPattern> patterns;
    for (const Beam& b : MakeBeams(r, array, m.pose().heading_deg)) {
      patterns.push_back(b.pattern);
    }
    const std::vector<Mpc> mpcs = ExtractMpcs(m, settings.extraction, patterns);
    // A pose can face away from every cluster; such scans add nothing.
    if (mpcs.empty()) return;
    ClusterConfig cc = settings.cluster;
    cc.seed = DeriveSeed(seed, static_cast<std::uint64_t>(i));
    sets[i] = ClusterMpcs(mpcs, cc);
  });
  FitAccumulator acc;
  for (int i = 0; i < n; ++i) acc.Add(sets[i], layout, matrices[i].pose());
  return acc.Result();
}

MapPriors PerturbPriors(const MapPriors& priors, double perturbation) {
  MapPriors p = priors;
  p.ekf_prior_mean *= 1.0 + perturbation;
  p.og_prior *= 1.0 + perturbation;
  if (!(p.og_prior > 0.0 && p.og_prior < 1.0)) {
    throw ValidationError("perturbed OG prior leaves (0, 1)");
  }
  return p;
}

namespace {

double EtaFor(const Scenario& s, Algorithm a) {
  return a == Algorithm::kEkf ? s.experiment.eta_ekf : s.experiment.eta_og;
}

SweepRow Row(std::uint64_t seed, int n, Algorithm a, const char* init,
             const MapErrorReport& e) {
  return {seed, n, a, init, e.error_rate, e.false_occupied, e.false_free};
}

}  // namespace

std::vector<double> RefineSteering(const std::vector<double>& steering_deg,
                                   double max_step_deg) {
  if (!(max_step_deg > 0.0)) {
    throw ValidationError("steering refinement: step must be > 0");
  }
  std::vector<double> out;
  for (size_t i = 0; i < steering_deg.size(); ++i) {
    if (i > 0) {
      const double a = steering_deg[i - 1];
      const double gap = steering_deg[i] - a;
      const int parts = std::max(
          1, static_cast<int>(std::ceil(std::abs(gap) / max_step_deg - 1e-9)));
      for (int k = 1; k < parts; ++k) out.push_back(a + gap * k / parts);
    }
    out.push_back(steering_deg[i]);
  }
  return out;
}

ExperimentResult AntennaSweep(const Scenario& scenario,
                              const SweepOptions& options) {
  struct Job {
    std::uint64_t seed;
    int n_antennas;
  };
  std::vector<Job> jobs;
  for (int n : scenario.experiment.n_antennas) {
    for (std::uint64_t seed : options.seeds) jobs.push_back({seed, n});
  }
  const size_t per_job = options.algorithms.size();
  std::vector<SweepRow> rows(jobs.size() * per_job);
  ParallelFor(static_cast<int>(jobs.size()), options.workers, [&](int i) {
    Scenario s = scenario;
    s.array.n_elements = jobs[i].n_antennas;
    if (s.experiment.match_steering_to_beamwidth && !s.radar.delta_beam) {
      s.radar.steering_deg = RefineSteering(
          s.radar.steering_deg,
          HalfPowerBeamwidth(SynthesizePattern(s.array, 0.0)));
    }
    const auto scans = SimulateScans(s, jobs[i].seed);
    for (size_t a = 0; a < per_job; ++a) {
      const Algorithm alg = options.algorithms[a];
      const MapResult r = RunMap(s, scans, alg, EtaFor(s, alg), s.priors);
      rows[i * per_job + a] =
          Row(jobs[i].seed, jobs[i].n_antennas, alg, "baseline", r.error);
    }
  });
  return {"antenna-sweep", rows};
}

ExperimentResult InitSensitivity(const Scenario& scenario,
                                 const SweepOptions& options) {
  const MapPriors perturbed =
      PerturbPriors(scenario.priors, scenario.experiment.init_perturbation);
  const size_t per_job = 2 * options.algorithms.size();
  std::vector<SweepRow> rows(options.seeds.size() * per_job);
  ParallelFor(static_cast<int>(options.seeds.size()), options.workers, [&](int i) {
    const std::uint64_t seed = options.seeds[i];
    const auto scans = SimulateScans(scenario, seed);
    size_t slot = i * per_job;
    for (Algorithm alg : options.algorithms) {
      const double eta = EtaFor(scenario, alg);
      rows[slot++] = Row(seed, scenario.array.n_elements, alg, "baseline",
                         RunMap(scenario, scans, alg, eta, scenario.priors).error);
      rows[slot++] = Row(seed, scenario.array.n_elements, alg, "perturbed",
                         RunMap(scenario, scans, alg, eta, perturbed).error);
    }
  });
  return {"init-sensitivity", rows};
}

double MeanErrorRate(const ExperimentResult& result, Algorithm algorithm,
                     int n_antennas, const std::string& init) {
  double sum = 0.0;
  int count = 0;
  for (const SweepRow& r : result.rows) {
    if (r.algorithm == algorithm && r.n_antennas == n_antennas && r.init == init) {
      sum += r.error_rate;
      ++count;
    }
  }
  if (count == 0) throw ValidationError("no runs for the requested mean");
  return sum / count;
}

double MeanDegradation(const ExperimentResult& result, Algorithm algorithm) {
  double sum = 0.0;
  int count = 0;
  for (const SweepRow& base : result.rows) {
    if (base.algorithm != algorithm || base.init != "baseline") continue;
    for (const SweepRow& pert : result.rows) {
      if (pert.algorithm == algorithm && pert.init == "perturbed" &&
          pert.seed == base.seed && pert.n_antennas == base.n_antennas) {
        MapErrorReport b;
        b.error_rate = base.error_rate;
        MapErrorReport p;
        p.error_rate = pert.error_rate;
        sum += DegradationRatio(b, p);
        ++count;
      }
    }
  }
  if (count == 0) throw ValidationError("no paired runs for the degradation mean");
  return sum / count;
}

}  // namespace prmap::app
