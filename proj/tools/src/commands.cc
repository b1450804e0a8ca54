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

#include "prmap_app/commands.h"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "prmap/io.h"
#include "prmap_app/pipeline.h"

namespace prmap::app {

using nlohmann::ordered_json;

std::string Sha256Hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 failed");
  }
  static const char* kHex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

void OutputSet::Add(std::string name, std::string content) {
  files_.emplace_back(std::move(name), std::move(content));
}

void OutputSet::Commit(const fs::path& out_dir, const std::string& command) const {
  ordered_json manifest;
  manifest["command"] = command;
  manifest["files"] = ordered_json::array();
  for (const auto& [name, content] : files_) {
    ordered_json f;
    f["path"] = name;
    f["bytes"] = content.size();
    f["sha256"] = Sha256Hex(content);
    manifest["files"].push_back(f);
  }
  std::vector<std::pair<std::string, std::string>> all = files_;
  all.emplace_back("manifest.json", manifest.dump(2) + "\n");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  try {
    for (const auto& [name, content] : all) {
      const fs::path path = out_dir / name;
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError(path.string() + ": cannot open for writing");
      written.push_back(path);
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.close();
      if (!out) throw IoError(path.string() + ": write failed");
    }
  } catch (...) {
    for (const fs::path& p : written) fs::remove(p, ec);
    throw;
  }
}

std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ValidationError("seeds: bad entry '" + s + "'");
    }
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ValidationError("seeds: bad entry '" + s + "'");
    }
  };
  while (std::getline(ss, item, ',')) {
    const size_t dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(number(item));
      continue;
    }
    const std::uint64_t lo = number(item.substr(0, dash));
    const std::uint64_t hi = number(item.substr(dash + 1));
    if (hi < lo || hi - lo > 100000) throw ValidationError("seeds: bad range " + item);
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ValidationError("seeds: empty list");
  return out;
}

namespace {

std::string Render(const EnergyMatrix& m) {
  std::ostringstream out;
  m.Write(out);
  return out.str();
}

std::string PoseFileName(size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pose_%03zu.csv", k);
  return buf;
}

Scenario LoadWithOverrides(const fs::path& path, std::optional<int> n_antennas) {
  Scenario s = LoadScenario(path);
  if (n_antennas) {
    s.array.n_elements = *n_antennas;
    s.Validate();
  }
  return s;
}

std::vector<EnergyMatrix> LoadMatrices(const std::vector<fs::path>& paths) {
  std::vector<EnergyMatrix> out;
  for (const fs::path& p : paths) out.push_back(LoadEnergyMatrix(p));
  return out;
}

ordered_json ErrorJson(const MapErrorReport& e) {
  ordered_json j;
  j["error_rate"] = e.error_rate;
  j["false_occupied"] = e.false_occupied;
  j["false_free"] = e.false_free;
  j["total_cells"] = e.total_cells;
  return j;
}

std::string PgmBytes(const Bitmap& b) {
  std::ostringstream out;
  WritePgm(b, out);
  return out.str();
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

OutputSet CmdSimulate(const SimulateOptions& options) {
  const Scenario s = LoadWithOverrides(options.scenario, options.n_antennas);
  const std::uint64_t seed = options.seed.value_or(s.seed);
  const auto scans = SimulateScans(s, seed, options.workers);
  OutputSet out;
  for (size_t k = 0; k < scans.size(); ++k) out.Add(PoseFileName(k), Render(scans[k]));
  return out;
}

OutputSet CmdFit(const FitOptions& options) {
  if (options.matrices.empty()) throw ValidationError("fit: no matrix files given");
  std::optional<Scenario> scenario;
  if (options.scenario) {
    scenario = LoadWithOverrides(*options.scenario, options.n_antennas);
  }
  std::optional<Layout> layout;
  if (options.layout) {
    layout = LoadLayout(*options.layout);
  } else if (scenario) {
    layout = scenario->layout;
  }
  ArrayConfig array = scenario ? scenario->array : ArrayConfig{};
  if (!scenario && options.n_antennas) array.n_elements = *options.n_antennas;
  const RadarConfig radar = scenario ? scenario->radar : RadarConfig{};
  const std::uint64_t seed = options.seed.value_or(scenario ? scenario->seed : 1);
  const auto matrices = LoadMatrices(options.matrices);
  const FittedChannelParams params = FitMatrices(
      matrices, layout ? &*layout : nullptr, array, radar, FitSettings{}, seed,
      options.workers);
  OutputSet out;
  out.Add("fit_report.json", FitReportJson(params));
  return out;
}

OutputSet CmdMap(const MapOptions& options) {
  const Algorithm algorithm = ParseAlgorithm(options.algorithm);
  Scenario s = LoadWithOverrides(options.scenario, options.n_antennas);
  const GridMap grid = s.Grid();
  // Reject a bad threshold before any work is done.
  if (algorithm == Algorithm::kEkf) {
    ThresholdMap(EkfInit(grid.num_cells(), 0.0, 1.0), grid, options.eta);
  } else {
    ThresholdMap(OgInit(grid.num_cells(), 0.5), grid, options.eta);
  }
  const std::uint64_t seed = options.seed.value_or(s.seed);
  const auto scans = options.matrices.empty()
                         ? SimulateScans(s, seed, options.workers)
                         : LoadMatrices(options.matrices);
  const MapResult r = RunMap(s, scans, algorithm, options.eta, s.priors);

  std::ostringstream belief;
  WriteBeliefCsv(r.belief, grid, belief);
  ordered_json report;
  report["scenario"] = s.name;
  report["algorithm"] = AlgorithmName(algorithm);
  report["eta"] = options.eta;
  report["n_antennas"] = s.array.n_elements;
  report["seed"] = seed;
  report["n_scans"] = scans.size();
  report["truth_sha256"] = Sha256Hex(PgmBytes(r.truth));
  report["map_error"] = ErrorJson(r.error);

  OutputSet out;
  out.Add("map.pgm", PgmBytes(r.estimate));
  out.Add("belief.csv", belief.str());
  out.Add("report.json", report.dump(2) + "\n");
  return out;
}

OutputSet CmdExperiment(const ExperimentOptions& options, std::ostream& log) {
  if (options.name != "antenna-sweep" && options.name != "init-sensitivity") {
    throw ValidationError("unknown experiment '" + options.name +
                          "' (expected antenna-sweep or init-sensitivity)");
  }
  Scenario s = LoadWithOverrides(options.scenario, std::nullopt);
  SweepOptions sweep;
  sweep.seeds = options.seeds.empty() ? std::vector<std::uint64_t>{s.seed}
                                      : options.seeds;
  sweep.workers = options.workers;
  if (options.algorithm) sweep.algorithms = {ParseAlgorithm(*options.algorithm)};
  if (options.eta) {
    if (!options.algorithm) {
      throw ValidationError("experiment: --eta needs --algorithm");
    }
    if (sweep.algorithms[0] == Algorithm::kEkf) {
      s.experiment.eta_ekf = *options.eta;
    } else {
      s.experiment.eta_og = *options.eta;
    }
  }
  if (options.n_antennas) {
    if (options.name == "antenna-sweep") {
      s.experiment.n_antennas = {*options.n_antennas};
    } else {
      s.array.n_elements = *options.n_antennas;
    }
  }
  s.Validate();
  if (sweep.seeds.size() < 5) {
    log << "warning: " << sweep.seeds.size()
        << " seed(s); statistical claims need at least 5\n";
  }
  const ExperimentResult r = options.name == "antenna-sweep"
                                 ? AntennaSweep(s, sweep)
                                 : InitSensitivity(s, sweep);

  std::ostringstream csv;
  csv << "seed,n_antennas,algorithm,init,error_rate,false_occupied,false_free\n";
  for (const SweepRow& row : r.rows) {
    csv << row.seed << ',' << row.n_antennas << ',' << AlgorithmName(row.algorithm)
        << ',' << row.init << ',' << Num(row.error_rate) << ',' << row.false_occupied
        << ',' << row.false_free << '\n';
  }

  ordered_json summary;
  summary["experiment"] = r.name;
  summary["scenario"] = s.name;
  summary["seeds"] = sweep.seeds;
  ordered_json per = ordered_json::array();
  for (Algorithm a : sweep.algorithms) {
    ordered_json j;
    j["algorithm"] = AlgorithmName(a);
    j["eta"] = a == Algorithm::kEkf ? s.experiment.eta_ekf : s.experiment.eta_og;
    if (r.name == "antenna-sweep") {
      ordered_json means = ordered_json::array();
      for (int n : s.experiment.n_antennas) {
        ordered_json m;
        m["n_antennas"] = n;
        m["mean_error_rate"] = MeanErrorRate(r, a, n);
        means.push_back(m);
      }
      j["per_n_antennas"] = means;
    } else {
      j["n_antennas"] = s.array.n_elements;
      j["init_perturbation"] = s.experiment.init_perturbation;
      j["mean_error_rate_baseline"] = MeanErrorRate(r, a, s.array.n_elements);
      j["mean_error_rate_perturbed"] =
          MeanErrorRate(r, a, s.array.n_elements, "perturbed");
      try {
        j["mean_degradation_ratio"] = MeanDegradation(r, a);
      } catch (const UndefinedRatioError&) {
        j["mean_degradation_ratio"] = nullptr;
        log << "warning: " << AlgorithmName(a)
            << " has a zero baseline error; degradation ratio undefined\n";
      }
    }
    per.push_back(j);
  }
  summary["algorithms"] = per;

  OutputSet out;
  out.Add("runs.csv", csv.str());
  out.Add("summary.json", summary.dump(2) + "\n");
  return out;
}

int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Personal-radar mapping simulator and estimator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 1;
  int n_antennas = 0;
  std::string algorithm;
  double eta = 0.0;
  std::string experiment;
  std::string seeds;
  std::vector<std::string> matrices;
  std::string layout;

  auto common = [&](CLI::App* c, bool needs_scenario) {
    auto* opt = c->add_option("--scenario", scenario, "Scenario JSON file");
    if (needs_scenario) opt->required();
    c->add_option("--out", out_dir, "Output directory")->required();
    c->add_option("--seed", seed, "Root seed (overrides the scenario)");
    c->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1, 256));
    c->add_option("--n-antennas", n_antennas, "Array size override")
        ->check(CLI::Range(1, 100000));
  };

  CLI::App* sim = app.add_subcommand("simulate", "Write one energy matrix per pose");
  common(sim, true);
  CLI::App* fit = app.add_subcommand("fit", "Fit channel parameters to matrices");
  common(fit, false);
  fit->add_option("--matrices", matrices, "Energy matrix CSV files")->required();
  fit->add_option("--layout", layout, "Layout JSON for the perimeter statistics");
  CLI::App* map = app.add_subcommand("map", "Build a map with the EKF or OG filter");
  common(map, true);
  map->add_option("--algorithm", algorithm, "ekf or og")->required();
  map->add_option("--eta", eta, "Decision threshold")->required();
  map->add_option("--matrices", matrices, "Use these matrices instead of simulating");
  CLI::App* exp = app.add_subcommand("experiment", "Run a seed sweep");
  common(exp, true);
  exp->add_option("--experiment", experiment, "antenna-sweep or init-sensitivity")
      ->required();
  exp->add_option("--seeds", seeds, "Seed list such as 1-10 or 1,4,9");
  exp->add_option("--algorithm", algorithm, "Restrict to ekf or og");
  exp->add_option("--eta", eta, "Threshold for the selected algorithm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  auto opt_seed = [&](CLI::App* c) -> std::optional<std::uint64_t> {
    if (c->count("--seed") > 0) return seed;
    return std::nullopt;
  };
  auto opt_n = [&](CLI::App* c) -> std::optional<int> {
    if (c->count("--n-antennas") > 0) return n_antennas;
    return std::nullopt;
  };
  std::vector<fs::path> matrix_paths(matrices.begin(), matrices.end());

  try {
    OutputSet result;
    std::string name;
    if (sim->parsed()) {
      name = "simulate";
      result = CmdSimulate({scenario, out_dir, opt_seed(sim), opt_n(sim), workers});
    } else if (fit->parsed()) {
      name = "fit";
      FitOptions o;
      o.matrices = matrix_paths;
      if (!scenario.empty()) o.scenario = scenario;
      if (!layout.empty()) o.layout = layout;
      o.out = out_dir;
      o.seed = opt_seed(fit);
      o.n_antennas = opt_n(fit);
      o.workers = workers;
      result = CmdFit(o);
    } else if (map->parsed()) {
      name = "map";
      MapOptions o;
      o.scenario = scenario;
      o.matrices = matrix_paths;
      o.algorithm = algorithm;
      o.eta = eta;
      o.n_antennas = opt_n(map);
      o.seed = opt_seed(map);
      o.out = out_dir;
      o.workers = workers;
      result = CmdMap(o);
    } else {
      name = "experiment";
      ExperimentOptions o;
      o.scenario = scenario;
      o.name = experiment;
      if (!seeds.empty()) o.seeds = ParseSeedList(seeds);
      if (exp->count("--seed") > 0 && o.seeds.empty()) o.seeds = {seed};
      if (!algorithm.empty()) o.algorithm = algorithm;
      if (exp->count("--eta") > 0) o.eta = eta;
      o.n_antennas = opt_n(exp);
      o.out = out_dir;
      o.workers = workers;
      result = CmdExperiment(o, err);
    }
    result.Commit(out_dir, name);
    for (const auto& f : result.files()) out << (fs::path(out_dir) / f.first).string() << '\n';
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UndefinedRatioError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace prmap::app
