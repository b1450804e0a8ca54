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

#include "prmap/metrics.h"

#include "prmap/common.h"

namespace prmap {

MapErrorReport MapError(const Bitmap& estimate, const Bitmap& truth) {
  if (estimate.width != truth.width || estimate.height != truth.height ||
      estimate.occupied.size() != truth.occupied.size()) {
    throw ValidationError("map_error: bitmap dimensions differ");
  }
  MapErrorReport r;
  r.total_cells = static_cast<long>(truth.occupied.size());
  for (size_t i = 0; i < truth.occupied.size(); ++i) {
    const bool e = estimate.occupied[i] != 0;
    const bool t = truth.occupied[i] != 0;
    if (e && !t) ++r.false_occupied;
    if (!e && t) ++r.false_free;
  }
  if (r.total_cells > 0) {
    r.error_rate =
        static_cast<double>(r.false_occupied + r.false_free) / r.total_cells;
  }
  return r;
}

double DegradationRatio(const MapErrorReport& baseline,
                        const MapErrorReport& perturbed) {
  if (!(baseline.error_rate > 0.0)) throw UndefinedRatioError();
  return (perturbed.error_rate - baseline.error_rate) / baseline.error_rate;
}

}  // namespace prmap
