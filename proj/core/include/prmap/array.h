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

#ifndef PRMAP_ARRAY_H_
#define PRMAP_ARRAY_H_

#include <optional>
#include <vector>

namespace prmap {

// Uniform linear array, modelling the azimuth cut of a planar aperture.
struct ArrayConfig {
  int n_elements = 16;
  // Element spacing in wavelengths.
  double element_spacing = 0.5;
  double carrier_ghz = 60.5;
  // Phase quantization; 1 means 1-bit (0 or pi) phase shifters.
  std::optional<int> phase_bits;

  double WavelengthM() const;
  // Throws ValidationError.
  void Validate() const;
};

class UndefinedBeamwidthError : public std::exception {
 public:
  const char* what() const noexcept override { return "undefined beamwidth"; }
};

// One-way power gain sampled over relative bearing [-180, 180) at a fixed
// step. Sample k sits at -180 + k * step.
class ArrayPattern {
 public:
  ArrayPattern(double steering_deg, double step_deg, std::vector<double> gains,
               double wavelength_m);

  // Laser-like beam: unit gain on the steering ray only.
  static ArrayPattern Delta(double steering_deg, double wavelength_m);

  double steering_deg() const { return steering_deg_; }
  double step_deg() const { return step_deg_; }
  double wavelength_m() const { return wavelength_m_; }
  bool is_delta() const { return is_delta_; }
  const std::vector<double>& gains() const { return gains_; }

  // Relative bearing of sample k.
  double SampleBearing(int k) const { return -180.0 + k * step_deg_; }

  // Linear interpolation between samples; periodic in bearing.
  double OneWayGain(double relative_bearing_deg) const;
  double PeakOneWayGain() const { return peak_; }
  double PeakTwoWayGain() const { return peak_ * peak_; }

 private:
  double steering_deg_;
  double step_deg_;
  std::vector<double> gains_;
  double wavelength_m_;
  double peak_ = 0.0;
  bool is_delta_ = false;
};

inline constexpr double kDefaultPatternStepDeg = 0.5;

// `steering_deg` is the electronic steering angle measured from the array
// broadside. Radiation is confined to the front half-space for arrays with
// more than one element; a single element is isotropic.
ArrayPattern SynthesizePattern(const ArrayConfig& config, double steering_deg,
                               double step_deg = kDefaultPatternStepDeg);

// Quasi-monostatic: transmit and receive gains coincide, so this is the square
// of the one-way gain at the given bearing relative to the steering direction.
double TwoWayGain(const ArrayPattern& pattern, double relative_bearing_deg);

// Width between the half-power crossings around the global peak. Throws
// UndefinedBeamwidthError for flat and delta patterns.
double HalfPowerBeamwidth(const ArrayPattern& pattern);

// Largest one-way gain outside the main lobe (bounded by the first nulls).
double PeakSideLobeLevel(const ArrayPattern& pattern);

}  // namespace prmap

#endif  // PRMAP_ARRAY_H_
