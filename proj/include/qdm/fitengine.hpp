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

#include <array>
#include <vector>

#include "qdm/datacube.hpp"
#include "qdm/lm.hpp"
#include "qdm/models.hpp"

namespace qdm::fit {

// Per-pixel fit status. Failure is data: batch drivers record it and keep
// going, so the status plane accounts for every pixel.
enum class PixelStatus : std::uint8_t {
    converged = 0,
    max_iter = 1,
    singular = 2,
    bounds_stuck = 3,
    masked = 4,        // input pixel was flagged invalid
    invalid_input = 5, // non-finite series
    degenerate = 6,    // fit converged onto a model with no resolvable feature
};

const char* to_string(PixelStatus s);

// Per-pixel fit results stored as planes co-registered with the input cube.
struct FitResultCube {
    int width = 0;
    int height = 0;
    models::ModelSpec model;
    std::vector<std::vector<double>> params; // [param][pixel], NaN where no fit
    std::vector<double> chisq;               // [pixel]
    std::vector<std::int32_t> iterations;    // [pixel]
    std::vector<std::uint8_t> status;        // [pixel], PixelStatus codes

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x);
    }
    PixelStatus status_at(int x, int y) const {
        return static_cast<PixelStatus>(status[index(x, y)]);
    }
    std::size_t converged_count() const;

    // Export one parameter (or chisq/status/iterations) as a map; pixels
    // without a converged fit are masked.
    cube::MapImage param_map(int param) const;
    cube::MapImage status_map() const;
    cube::MapImage iterations_map() const;

    bool bit_identical(const FitResultCube& other) const;
};

// Coarse-to-fine seeds: parameters fitted on block-averaged traces of an
// N x N dicing of the image, handed to every member pixel.
struct SeedGrid {
    int dicing = 1;
    int block_w = 0, block_h = 0;
    int blocks_x = 0, blocks_y = 0;
    std::vector<std::vector<double>> seeds; // [block][param]
    std::vector<std::uint8_t> inherited;    // 1 = seed copied from a neighbor

    int block_count() const { return blocks_x * blocks_y; }
    int block_of(int x, int y) const {
        return (y / block_h) * blocks_x + (x / block_w);
    }
    static SeedGrid layout(int dicing, int width, int height);
};

// Admissible box for a model given the sweep window it will be fit on.
Bounds default_bounds(const models::ModelSpec& spec, const cube::SweepAxis& sweep);

// Data-driven initializer for a single averaged trace (discrete-spectrum
// peak for rabi, log-linear envelope regressions for the decay models,
// depth centroid for the resonance triplet).
std::vector<double> heuristic_seed(const models::ModelSpec& spec,
                                   const cube::SweepAxis& sweep,
                                   std::span<const double> trace);

// Single-series fit against a model spec; bounds default to
// default_bounds(spec, sweep) unless options.bounds is set.
FitOutcome lm_fit(std::span<const double> series, const models::ModelSpec& spec,
                  const cube::SweepAxis& sweep, std::span<const double> seed,
                  const FitOptions& options = {});

// Multi-start fit of one trace: the heuristic seed plus options.block_restarts
// jittered copies; best converged result wins. rng_key makes the jitter
// deterministic and independent of scheduling.
FitOutcome multistart_fit(std::span<const double> trace,
                          const models::ModelSpec& spec,
                          const cube::SweepAxis& sweep, const FitOptions& options,
                          std::uint64_t rng_key);

SeedGrid seed_by_dicing(const cube::DataCube& cube, const models::ModelSpec& spec,
                        int dicing, const FitOptions& options);

// Embarrassingly parallel per-pixel driver. Pixel results are a pure
// function of (cube, spec, seeds, options minus worker_count): fixed-order
// chunking and disjoint writes make the output bit-identical for any worker
// count.
FitResultCube fit_cube(const cube::DataCube& cube, const models::ModelSpec& spec,
                       const SeedGrid& seeds, const FitOptions& options);

// Stage 1 fits the stretch exponent on the image-mean trace; stage 2 fixes
// it and runs the per-pixel batch with two free parameters. The fitted
// exponent is reported on the result's ModelSpec.
FitResultCube fit_t1_two_stage(const cube::DataCube& cube, const FitOptions& options);

struct OdmrGroupWindow {
    double center_mhz = 0.0;
    double half_width_mhz = 0.0;
    double amp_est = 0.0;
    double fwhm_est_mhz = 0.0;
    bool overlapped = false;

    double lo() const { return center_mhz - half_width_mhz; }
    double hi() const { return center_mhz + half_width_mhz; }
};

// Locates the resonance groups (hyperfine triplets) of a mean spectrum and
// returns one seeded window per group, ordered by frequency. Finding a
// different number of groups than expected raises PeakCountError carrying
// the found count.
std::vector<OdmrGroupWindow> find_odmr_peaks(std::span<const double> spectrum,
                                             const cube::SweepAxis& freq,
                                             int expected_groups,
                                             double hyperfine_mhz);

// One windowed triplet fit per group, in window order. Pixels whose fit
// collapses to a featureless model (no detectable dip) are marked
// PixelStatus::degenerate.
std::vector<FitResultCube> fit_odmr_cube(const cube::DataCube& cube,
                                         const std::vector<OdmrGroupWindow>& windows,
                                         const models::ModelSpec& spec,
                                         const FitOptions& options);

} // namespace qdm::fit
