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
#include "qdm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "qdm/errors.hpp"

namespace qdm {

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n <= 32) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
    if (values.empty())
        throw ValidationError("mean of empty sample");
    return pairwise_sum(values) / static_cast<double>(values.size());
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty())
        throw ValidationError("quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0))
        throw ValidationError("quantile fraction outside [0, 1]");
    if (sorted.size() == 1) return sorted[0];
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double median(std::span<const double> values) {
    std::vector<double> copy(values.begin(), values.end());
    std::sort(copy.begin(), copy.end());
    return quantile_sorted(copy, 0.5);
}

} // namespace qdm
