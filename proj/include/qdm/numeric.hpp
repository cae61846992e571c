/* Copyright 2026 The qdmtk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <span>
#include <vector>

namespace qdm {

// Fixed-order pairwise summation; deterministic and O(log n) error growth.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

// Type-7 order statistic: linear interpolation between closest ranks on the
// sorted sample. `q` in [0, 1]. `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

// Convenience over an unsorted sample (copies and sorts).
double median(std::span<const double> values);

} // namespace qdm
