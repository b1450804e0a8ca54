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

#ifndef PRMAP_METRICS_H_
#define PRMAP_METRICS_H_

#include <stdexcept>

#include "prmap/mapping.h"

namespace prmap {

struct MapErrorReport {
  double error_rate = 0.0;
  long false_occupied = 0;
  long false_free = 0;
  long total_cells = 0;
};

// Normalized Hamming distance between two bitmaps of equal size.
MapErrorReport MapError(const Bitmap& estimate, const Bitmap& truth);

class UndefinedRatioError : public std::domain_error {
 public:
  UndefinedRatioError() : std::domain_error("undefined ratio: baseline error is 0") {}
};

// (perturbed - baseline) / baseline on the error rates.
double DegradationRatio(const MapErrorReport& baseline,
                        const MapErrorReport& perturbed);

}  // namespace prmap

#endif  // PRMAP_METRICS_H_
