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

#include "prmap/array.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "prmap/common.h"

namespace prmap {

double ArrayConfig::WavelengthM() const {
  // carrier in GHz, c in m/ns: lambda = c / f.
  return kSpeedOfLight / carrier_ghz;
}

void ArrayConfig::Validate() const {
  if (n_elements < 1) {
    throw ValidationError("array: n_elements must be >= 1, got " +
                          std::to_string(n_elements));
  }
  if (!(element_spacing > 0.0)) {
    throw ValidationError("array: element_spacing must be > 0");
  }
  if (!(carrier_ghz > 0.0)) {
    throw ValidationError("array: carrier_ghz must be > 0");
  }
  if (phase_bits.has_value() && *phase_bits < 1) {
    throw ValidationError("array: phase_bits must be >= 1");
  }
}

ArrayPattern::ArrayPattern(double steering_deg, double step_deg,
                           std::vector<double> gains, double wavelength_m)
    : steering_deg_(steering_deg),
      step_deg_(step_deg),
      gains_(std::move(gains)),
      wavelength_m_(wavelength_m) {
  if (!(step_deg_ > 0.0) || gains_.empty()) {
    throw ValidationError("pattern: empty or invalid sampling");
  }
  peak_ = *std::max_element(gains_.begin(), gains_.end());
}

ArrayPattern ArrayPattern::Delta(double steering_deg, double wavelength_m) {
  const int n = static_cast<int>(std::lround(360.0 / kDefaultPatternStepDeg));
  std::vector<double> gains(n, 0.0);
  gains[n / 2] = 1.0;
  ArrayPattern pattern(steering_deg, kDefaultPatternStepDeg, std::move(gains),
                       wavelength_m);
  pattern.is_delta_ = true;
  return pattern;
}

double ArrayPattern::OneWayGain(double relative_bearing_deg) const {
  const double rel = WrapDeg180(relative_bearing_deg);
  if (is_delta_) {
    return std::abs(rel) < 1e-9 ? 1.0 : 0.0;
  }
  const int n = static_cast<int>(gains_.size());
  const double pos = (rel + 180.0) / step_deg_;
  int i0 = static_cast<int>(std::floor(pos));
  const double frac = pos - i0;
  i0 = ((i0 % n) + n) % n;
  const int i1 = (i0 + 1) % n;
  if (frac == 0.0) return gains_[i0];
  return gains_[i0] + frac * (gains_[i1] - gains_[i0]);
}

ArrayPattern SynthesizePattern(const ArrayConfig& config, double steering_deg,
                               double step_deg) {
  config.Validate();
  const int n_samples = static_cast<int>(std::lround(360.0 / step_deg));
  const int n = config.n_elements;
  std::vector<double> gains(n_samples, 1.0);
  if (n == 1) {
    return ArrayPattern(steering_deg, step_deg, std::move(gains),
                        config.WavelengthM());
  }

  const double k_d = 2.0 * kPi * config.element_spacing;
  // Steering phases use the same angle path as the sample at relative bearing
  // zero, so the unquantized coherent sum is exact there.
  const double steer_abs = WrapDeg180(steering_deg + 0.0);
  const double steer_sin = std::sin(DegToRad(steer_abs));
  std::vector<double> phase(n);
  for (int e = 0; e < n; ++e) {
    double psi = k_d * e * steer_sin;
    if (config.phase_bits.has_value()) {
      const double q = 2.0 * kPi / std::pow(2.0, *config.phase_bits);
      psi = std::fmod(psi, 2.0 * kPi);
      if (psi < 0.0) psi += 2.0 * kPi;
      psi = std::round(psi / q) * q;
    }
    phase[e] = psi;
  }

  for (int k = 0; k < n_samples; ++k) {
    const double rel = -180.0 + k * step_deg;
    const double abs_deg = WrapDeg180(steering_deg + rel);
    if (std::abs(abs_deg) > 90.0) {
      gains[k] = 0.0;
      continue;
    }
    const double s = std::sin(DegToRad(abs_deg));
    double re = 0.0;
    double im = 0.0;
    for (int e = 0; e < n; ++e) {
      const double arg = k_d * e * s - phase[e];
      re += std::cos(arg);
      im += std::sin(arg);
    }
    gains[k] = (re * re + im * im) / n;
  }
  return ArrayPattern(steering_deg, step_deg, std::move(gains),
                      config.WavelengthM());
}

double TwoWayGain(const ArrayPattern& pattern, double relative_bearing_deg) {
  const double g = pattern.OneWayGain(relative_bearing_deg);
  return g * g;
}

namespace {

int PeakIndex(const std::vector<double>& gains) {
  return static_cast<int>(std::max_element(gains.begin(), gains.end()) -
                          gains.begin());
}

}  // namespace

double HalfPowerBeamwidth(const ArrayPattern& pattern) {
  if (pattern.is_delta()) throw UndefinedBeamwidthError();
  const auto& g = pattern.gains();
  const int n = static_cast<int>(g.size());
  const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
  if (*hi - *lo <= 1e-12 * *hi) throw UndefinedBeamwidthError();

  const int kp = PeakIndex(g);
  const double half = 0.5 * g[kp];
  auto crossing = [&](int dir) -> double {
    // Returns the offset (in samples) from the peak to the half-power point.
    for (int step = 1; step < n; ++step) {
      const int k = ((kp + dir * step) % n + n) % n;
      if (g[k] < half) {
        const int kprev = ((k - dir) % n + n) % n;
        const double frac = (g[kprev] - half) / (g[kprev] - g[k]);
        return step - 1 + frac;
      }
    }
    throw UndefinedBeamwidthError();
  };
  return (crossing(+1) + crossing(-1)) * pattern.step_deg();
}

double PeakSideLobeLevel(const ArrayPattern& pattern) {
  const auto& g = pattern.gains();
  const int n = static_cast<int>(g.size());
  const int kp = PeakIndex(g);
  auto null_offset = [&](int dir) {
    int step = 1;
    while (step < n / 2) {
      const int k = ((kp + dir * step) % n + n) % n;
      const int knext = ((kp + dir * (step + 1)) % n + n) % n;
      if (g[knext] > g[k]) break;
      ++step;
    }
    return step;
  };
  const int right = null_offset(+1);
  const int left = null_offset(-1);
  double sll = 0.0;
  for (int step = right + 1; step < n - left; ++step) {
    sll = std::max(sll, g[(kp + step) % n]);
  }
  return sll;
}

}  // namespace prmap
