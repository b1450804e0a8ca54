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

#ifndef PRMAP_APP_PIPELINE_H_
#define PRMAP_APP_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "prmap/frontend.h"
#include "prmap/io.h"
#include "prmap/mapping.h"
#include "prmap/metrics.h"
#include "prmap/mpc.h"

namespace prmap::app {

enum class Algorithm { kEkf, kOg };

// Throws ValidationError on anything but "ekf" or "og".
Algorithm ParseAlgorithm(const std::string& name);
const char* AlgorithmName(Algorithm algorithm);

// Calls fn(i) for every i in [0, n) on up to `workers` threads. Results must
// be written to per-index slots; the first exception is rethrown.
void ParallelFor(int n, int workers, const std::function<void(int)>& fn);

// Seed of pose k; independent of the worker count.
std::uint64_t PoseSeed(std::uint64_t seed, int pose_index);

// One matrix per trajectory pose.
std::vector<EnergyMatrix> SimulateScans(const Scenario& scenario,
                                        std::uint64_t seed, int workers = 1);

struct MapResult {
  Bitmap estimate;
  Bitmap truth;
  std::vector<double> belief;
  MapErrorReport error;
};

// Sequential belief updates over `scans` in order.
MapResult RunMap(const Scenario& scenario,
                 const std::vector<EnergyMatrix>& scans, Algorithm algorithm,
                 double eta, const MapPriors& priors);

struct FitSettings {
  ExtractionConfig extraction;
  ClusterConfig cluster;
};

// Extraction, clustering and parameter fitting over a set of scans. Matrix i
// clusters with seed DeriveSeed(seed, i); `layout` may be null.
FittedChannelParams FitMatrices(const std::vector<EnergyMatrix>& matrices,
                                const Layout* layout, const ArrayConfig& array,
                                const RadarConfig& radar,
                                const FitSettings& settings, std::uint64_t seed,
                                int workers = 1);

// Prior scaled by (1 + perturbation); OG probabilities must stay below 1.
MapPriors PerturbPriors(const MapPriors& priors, double perturbation);

struct SweepRow {
  std::uint64_t seed;
  int n_antennas;
  Algorithm algorithm;
  // "baseline" or "perturbed".
  std::string init;
  double error_rate;
  long false_occupied;
  long false_free;
};

struct ExperimentResult {
  std::string name;
  std::vector<SweepRow> rows;
};

struct SweepOptions {
  std::vector<std::uint64_t> seeds;
  int workers = 1;
  std::vector<Algorithm> algorithms = {Algorithm::kEkf, Algorithm::kOg};
};

// Splits each gap between consecutive steering angles into the fewest equal
// parts no wider than max_step_deg. The original angles are kept.
std::vector<double> RefineSteering(const std::vector<double>& steering_deg,
                                   double max_step_deg);

// Error rates per antenna count, seed and algorithm.
ExperimentResult AntennaSweep(const Scenario& scenario,
                              const SweepOptions& options);
// Baseline and perturbed priors on the same scans.
ExperimentResult InitSensitivity(const Scenario& scenario,
                                 const SweepOptions& options);

double MeanErrorRate(const ExperimentResult& result, Algorithm algorithm,
                     int n_antennas, const std::string& init = "baseline");
// Mean over seeds of the per-seed degradation ratio. Throws
// UndefinedRatioError when any baseline error is zero.
double MeanDegradation(const ExperimentResult& result, Algorithm algorithm);

}  // namespace prmap::app

#endif  // PRMAP_APP_PIPELINE_H_
