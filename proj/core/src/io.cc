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

#include "prmap/io.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace prmap {

using nlohmann::json;

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

namespace {

json Parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(what + ": " + e.what());
  }
}

Vec2 ParsePoint(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError(what + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Polygon ParsePolygon(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": expected a vertex array");
  Polygon out;
  for (const json& v : j) out.push_back(ParsePoint(v, what));
  return out;
}

double Number(const json& obj, const char* key, double fallback,
              const std::string& what) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw ValidationError(what + "." + key + ": expected a number");
  }
  return obj[key].get<double>();
}

int Integer(const json& obj, const char* key, int fallback,
            const std::string& what) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) {
    throw ValidationError(what + "." + key + ": expected an integer");
  }
  return obj[key].get<int>();
}

bool Flag(const json& obj, const char* key, bool fallback,
          const std::string& what) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) {
    throw ValidationError(what + "." + key + ": expected true or false");
  }
  return obj[key].get<bool>();
}

std::string Text(const json& obj, const char* key, const std::string& fallback,
                 const std::string& what) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) {
    throw ValidationError(what + "." + key + ": expected a string");
  }
  return obj[key].get<std::string>();
}

Layout LayoutFromJson(const json& j) {
  if (!j.is_object() || !j.contains("perimeter")) {
    throw ValidationError("layout: missing perimeter");
  }
  Polygon perimeter = ParsePolygon(j["perimeter"], "layout.perimeter");
  std::vector<Polygon> obstacles;
  if (j.contains("obstacles")) {
    if (!j["obstacles"].is_array()) {
      throw ValidationError("layout.obstacles: expected an array");
    }
    for (const json& o : j["obstacles"]) {
      obstacles.push_back(ParsePolygon(o, "layout.obstacles"));
    }
  }
  return Layout(std::move(perimeter), std::move(obstacles),
                Number(j, "default_rrcs", 1.0, "layout"));
}

ArrayConfig ArrayFromJson(const json& j) {
  ArrayConfig a;
  a.n_elements = Integer(j, "n_elements", a.n_elements, "array");
  a.element_spacing = Number(j, "spacing_wavelengths", a.element_spacing, "array");
  a.carrier_ghz = Number(j, "carrier_ghz", a.carrier_ghz, "array");
  if (j.contains("phase_bits") && !j["phase_bits"].is_null()) {
    a.phase_bits = Integer(j, "phase_bits", 1, "array");
  }
  a.Validate();
  return a;
}

RadarConfig RadarFromJson(const json& j) {
  RadarConfig r;
  r.bandwidth_ghz = Number(j, "bandwidth_ghz", r.bandwidth_ghz, "radar");
  r.pulse_energy = Number(j, "pulse_energy", r.pulse_energy, "radar");
  r.n_pulses = Integer(j, "n_pulses", r.n_pulses, "radar");
  r.noise_energy_per_bin =
      Number(j, "noise_energy_per_bin", r.noise_energy_per_bin, "radar");
  r.n_bins = Integer(j, "n_bins", r.n_bins, "radar");
  if (j.contains("steering_deg")) {
    const json& s = j["steering_deg"];
    r.steering_deg.clear();
    if (s.is_array()) {
      for (const json& v : s) {
        if (!v.is_number()) {
          throw ValidationError("radar.steering_deg: expected numbers");
        }
        r.steering_deg.push_back(v.get<double>());
      }
    } else if (s.is_object()) {
      const double from = Number(s, "from", -90.0, "radar.steering_deg");
      const double to = Number(s, "to", 90.0, "radar.steering_deg");
      const double step = Number(s, "step", 5.0, "radar.steering_deg");
      if (!(step > 0.0) || to < from) {
        throw ValidationError("radar.steering_deg: need step > 0 and to >= from");
      }
      const int n = static_cast<int>(std::floor((to - from) / step + 1e-9));
      for (int k = 0; k <= n; ++k) r.steering_deg.push_back(from + k * step);
    } else {
      throw ValidationError("radar.steering_deg: expected a list or a range");
    }
  }
  const std::string noise = Text(j, "noise_model", "gaussian", "radar");
  if (noise == "gaussian") {
    r.noise_model = NoiseModel::kGaussian;
  } else if (noise == "exponential") {
    r.noise_model = NoiseModel::kExponential;
  } else {
    throw ValidationError("radar.noise_model: unknown value '" + noise + "'");
  }
  const std::string steer = Text(j, "steer_mode", "rotate", "radar");
  if (steer == "rotate") {
    r.steer_mode = SteerMode::kRotate;
  } else if (steer == "phase") {
    r.steer_mode = SteerMode::kPhase;
  } else {
    throw ValidationError("radar.steer_mode: unknown value '" + steer + "'");
  }
  const std::string beam = Text(j, "beam", "array", "radar");
  if (beam != "array" && beam != "delta") {
    throw ValidationError("radar.beam: unknown value '" + beam + "'");
  }
  r.delta_beam = beam == "delta";
  r.Validate();
  return r;
}

SvParams SvFromJson(const json& j) {
  SvParams p;
  const std::string w = "sv";
  p.inter_cluster_rate = Number(j, "inter_cluster_rate", p.inter_cluster_rate, w);
  p.inter_cluster_perimeter_distance_std =
      Number(j, "inter_cluster_perimeter_distance_std",
             p.inter_cluster_perimeter_distance_std, w);
  p.intra_cluster_rate = Number(j, "intra_cluster_rate", p.intra_cluster_rate, w);
  p.intra_aoa_std = Number(j, "intra_aoa_std", p.intra_aoa_std, w);
  p.cluster_decay = Number(j, "cluster_decay", p.cluster_decay, w);
  p.ray_decay = Number(j, "ray_decay", p.ray_decay, w);
  p.dp_std = Number(j, "dp_std", p.dp_std, w);
  p.reference_power = Number(j, "reference_power", p.reference_power, w);
  p.rays_per_cluster = Integer(j, "rays_per_cluster", p.rays_per_cluster, w);
  p.first_cluster_delay_ns =
      Number(j, "first_cluster_delay_ns", p.first_cluster_delay_ns, w);
  p.cluster_window_ns = Number(j, "cluster_window_ns", p.cluster_window_ns, w);
  p.min_bearing_separation_deg =
      Number(j, "min_bearing_separation_deg", p.min_bearing_separation_deg, w);
  const std::string mode = Text(j, "cluster_mode", "delay", w);
  if (mode == "delay") {
    p.mode = ClusterMode::kDelayAxis;
  } else if (mode == "perimeter") {
    p.mode = ClusterMode::kPerimeter;
  } else {
    throw ValidationError("sv.cluster_mode: unknown value '" + mode + "'");
  }
  p.Validate();
  return p;
}

std::vector<Pose> TrajectoryFromJson(const json& j) {
  std::vector<Pose> out;
  if (j.is_array()) {
    for (const json& p : j) {
      if (!p.is_object()) throw ValidationError("trajectory: expected objects");
      out.emplace_back(Vec2{Number(p, "x", 0.0, "trajectory"),
                            Number(p, "y", 0.0, "trajectory")},
                       Number(p, "heading_deg", 0.0, "trajectory"));
    }
  } else if (j.is_object()) {
    const Vec2 start = ParsePoint(j.value("start", json::array({0.0, 0.0})),
                                  "trajectory.start");
    const Vec2 step =
        ParsePoint(j.value("step", json::array({0.0, 0.0})), "trajectory.step");
    const int count = Integer(j, "count", 1, "trajectory");
    const double heading = Number(j, "heading_deg", 0.0, "trajectory");
    for (int k = 0; k < count; ++k) out.emplace_back(start + step * k, heading);
  } else {
    throw ValidationError("trajectory: expected a list or a line");
  }
  return out;
}

}  // namespace

Layout ParseLayoutJson(const std::string& text) {
  return LayoutFromJson(Parse(text, "layout"));
}

Layout LoadLayout(const std::filesystem::path& path) {
  return LayoutFromJson(Parse(ReadTextFile(path), path.string()));
}

void Scenario::Validate() const {
  if (!layout) throw ValidationError("scenario: no layout");
  if (!(resolution_m > 0.0)) {
    throw ValidationError("scenario: resolution must be > 0");
  }
  array.Validate();
  radar.Validate();
  if (sv) sv->Validate();
  if (trajectory.empty()) throw ValidationError("scenario: empty trajectory");
  const GridMap grid = Grid();
  for (size_t k = 0; k < trajectory.size(); ++k) {
    if (!layout->Contains(trajectory[k].position) ||
        !grid.Contains(trajectory[k].position)) {
      throw ValidationError("scenario: pose " + std::to_string(k) +
                            " lies outside the layout");
    }
  }
  Mapping().Validate();
  if (!(priors.ekf_prior_var > 0.0) || !(priors.ekf_prior_mean >= 0.0)) {
    throw ValidationError("scenario: invalid EKF prior");
  }
  if (!(priors.og_prior > 0.0 && priors.og_prior < 1.0)) {
    throw ValidationError("scenario: OG prior must lie in (0, 1)");
  }
  if (!(experiment.eta_ekf >= 0.0) || !std::isfinite(experiment.eta_ekf)) {
    throw ValidationError("experiment: eta_ekf must be a finite RRCS >= 0");
  }
  if (!(experiment.eta_og > 0.0 && experiment.eta_og < 1.0)) {
    throw ValidationError("experiment: eta_og must lie in (0, 1)");
  }
  if (experiment.n_antennas.empty()) {
    throw ValidationError("experiment: n_antennas is empty");
  }
  if (!(experiment.init_perturbation > -1.0) ||
      !std::isfinite(experiment.init_perturbation)) {
    throw ValidationError("experiment: init_perturbation must be > -1");
  }
}

GridMap Scenario::Grid() const { return RasterizeLayout(*layout, resolution_m); }

MappingConfig Scenario::Mapping() const {
  MappingConfig m = mapping;
  m.radar = radar;
  m.array = array;
  return m;
}

Scenario ParseScenarioJson(const std::string& text,
                           const std::filesystem::path& base_dir) {
  const json j = Parse(text, "scenario");
  if (!j.is_object()) throw ValidationError("scenario: expected an object");
  Scenario s;
  try {
    s.name = Text(j, "name", "scenario", "scenario");
    if (!j.contains("layout")) throw ValidationError("scenario: missing layout");
    if (j["layout"].is_string()) {
      s.layout_path = base_dir / j["layout"].get<std::string>();
      s.layout = LoadLayout(s.layout_path);
    } else {
      s.layout = LayoutFromJson(j["layout"]);
    }
    s.resolution_m = Number(j, "resolution_m", s.resolution_m, "scenario");
    if (j.contains("array")) s.array = ArrayFromJson(j["array"]);
    if (j.contains("radar")) s.radar = RadarFromJson(j["radar"]);
    if (j.contains("sv") && !j["sv"].is_null()) s.sv = SvFromJson(j["sv"]);
    if (!j.contains("trajectory")) {
      throw ValidationError("scenario: missing trajectory");
    }
    s.trajectory = TrajectoryFromJson(j["trajectory"]);
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) {
        throw ValidationError("scenario.seed: expected an unsigned integer");
      }
      s.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("mapping")) {
      const json& m = j["mapping"];
      const std::string w = "mapping";
      s.mapping.shell_floor = Number(m, "shell_floor", s.mapping.shell_floor, w);
      s.mapping.ekf_beta = Number(m, "ekf_beta", s.mapping.ekf_beta, w);
      s.mapping.og_l_occ = Number(m, "og_l_occ", s.mapping.og_l_occ, w);
      s.mapping.og_l_emp = Number(m, "og_l_emp", s.mapping.og_l_emp, w);
      s.mapping.og_q = Number(m, "og_q", s.mapping.og_q, w);
      s.mapping.og_clamp = Number(m, "og_clamp", s.mapping.og_clamp, w);
      if (m.contains("og_reference_rrcs")) {
        if (m["og_reference_rrcs"].is_null()) {
          s.mapping.og_reference_rrcs.reset();
        } else {
          s.mapping.og_reference_rrcs = Number(m, "og_reference_rrcs", 1.0, w);
        }
      }
      s.priors.ekf_prior_mean =
          Number(m, "ekf_prior_mean", s.priors.ekf_prior_mean, w);
      s.priors.ekf_prior_var = Number(m, "ekf_prior_var", s.priors.ekf_prior_var, w);
      s.priors.og_prior = Number(m, "og_prior", s.priors.og_prior, w);
    }
    if (j.contains("experiment")) {
      const json& e = j["experiment"];
      const std::string w = "experiment";
      ExperimentSettings& x = s.experiment;
      x.eta_ekf = Number(e, "eta_ekf", x.eta_ekf, w);
      x.eta_og = Number(e, "eta_og", x.eta_og, w);
      x.init_perturbation = Number(e, "init_perturbation", x.init_perturbation, w);
      x.match_steering_to_beamwidth = Flag(e, "match_steering_to_beamwidth",
                                           x.match_steering_to_beamwidth, w);
      if (e.contains("n_antennas")) {
        if (!e["n_antennas"].is_array()) {
          throw ValidationError("experiment.n_antennas: expected a list");
        }
        x.n_antennas.clear();
        for (const json& n : e["n_antennas"]) {
          if (!n.is_number_integer() || n.get<int>() < 1) {
            throw ValidationError("experiment.n_antennas: expected integers >= 1");
          }
          x.n_antennas.push_back(n.get<int>());
        }
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
  s.Validate();
  return s;
}

Scenario LoadScenario(const std::filesystem::path& path) {
  return ParseScenarioJson(ReadTextFile(path), path.parent_path());
}

EnergyMatrix LoadEnergyMatrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return EnergyMatrix::Read(in, path.string());
}

}  // namespace prmap
