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

#ifndef PRMAP_COMMON_H_
#define PRMAP_COMMON_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace prmap {

// Raised for inputs that violate a documented precondition. The CLI maps it
// to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for filesystem and parse failures. The CLI maps it to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Propagation speed in meters per nanosecond.
inline constexpr double kSpeedOfLight = 0.299792458;

inline constexpr double kPi = std::numbers::pi;

inline double DegToRad(double deg) { return deg * kPi / 180.0; }
inline double RadToDeg(double rad) { return rad * 180.0 / kPi; }

// Wraps to [0, 360).
inline double NormalizeDeg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

// Wraps to [-180, 180).
inline double WrapDeg180(double deg) {
  double r = NormalizeDeg(deg + 180.0) - 180.0;
  return r;
}

inline double RoundTripDelayNs(double range_m) {
  return 2.0 * range_m / kSpeedOfLight;
}

inline double RangeFromRoundTripNs(double delay_ns) {
  return 0.5 * delay_ns * kSpeedOfLight;
}

using Rng = std::mt19937_64;

// Counter-based stream split: the same (root, a, b) always yields the same
// child seed, independent of the order in which streams are requested.
inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t a,
                                std::uint64_t b = 0) {
  return SplitMix64(SplitMix64(SplitMix64(root) ^ (a + 1)) ^ (b + 0x51ed27ULL));
}

}  // namespace prmap

#endif  // PRMAP_COMMON_H_
