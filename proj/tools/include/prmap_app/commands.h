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

#ifndef PRMAP_APP_COMMANDS_H_
#define PRMAP_APP_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace prmap::app {

namespace fs = std::filesystem;

// Files are rendered in memory and written only once the command succeeded,
// together with manifest.json listing a SHA-256 per file.
class OutputSet {
 public:
  void Add(std::string name, std::string content);
  // Throws IoError; files written before the failure are removed again.
  void Commit(const fs::path& out_dir, const std::string& command) const;
  const std::vector<std::pair<std::string, std::string>>& files() const {
    return files_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string Sha256Hex(const std::string& data);

// "1,2,5-8" -> {1, 2, 5, 6, 7, 8}.
std::vector<std::uint64_t> ParseSeedList(const std::string& text);

struct SimulateOptions {
  fs::path scenario;
  fs::path out;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_antennas;
  int workers = 1;
};

struct FitOptions {
  std::vector<fs::path> matrices;
  // Supplies the array and, unless --layout is given, the layout.
  std::optional<fs::path> scenario;
  std::optional<fs::path> layout;
  fs::path out;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_antennas;
  int workers = 1;
};

struct MapOptions {
  fs::path scenario;
  // Simulated from the scenario when empty.
  std::vector<fs::path> matrices;
  std::string algorithm;
  double eta = 0.0;
  std::optional<int> n_antennas;
  std::optional<std::uint64_t> seed;
  fs::path out;
  int workers = 1;
};

struct ExperimentOptions {
  fs::path scenario;
  std::string name;
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> algorithm;
  std::optional<double> eta;
  std::optional<int> n_antennas;
  fs::path out;
  int workers = 1;
};

OutputSet CmdSimulate(const SimulateOptions& options);
OutputSet CmdFit(const FitOptions& options);
OutputSet CmdMap(const MapOptions& options);
// Warnings go to `log`.
OutputSet CmdExperiment(const ExperimentOptions& options, std::ostream& log);

// Parses arguments, runs one command and commits its outputs. Returns the
// process exit code: 0 success, 1 validation error, 2 I/O error.
int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace prmap::app

#endif  // PRMAP_APP_COMMANDS_H_
