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

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qdm::rng {

// Counter-based generator "qdm-rng-v1": the splitmix64 finalizer applied to
// seed-offset counters. Every sample is addressed by (seed, index), so any
// parallel evaluation order reproduces the same stream bit for bit, and a
// reimplementation in another language needs only this one function.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derive an independent sub-stream seed (documented stream tags live with
// their call sites).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
    return counter_hash(seed, tag ^ 0xA5A5A5A5A5A5A5A5ull);
}

// Uniform in [0, 1), 53-bit resolution.
inline double uniform01(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(counter_hash(seed, index) >> 11) * 0x1.0p-53;
}

// Uniform in [-1, 1).
inline double uniform_pm1(std::uint64_t seed, std::uint64_t index) {
    return 2.0 * uniform01(seed, index) - 1.0;
}

// Standard normal via Box-Muller; consumes counter slots 2*index and
// 2*index + 1, so gaussian streams index samples independently of each other.
inline double gaussian(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t a = counter_hash(seed, 2 * index);
    const std::uint64_t b = counter_hash(seed, 2 * index + 1);
    const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53; // (0, 1]
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;       // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace qdm::rng
