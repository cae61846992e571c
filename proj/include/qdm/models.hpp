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
#include <string_view>

#include "qdm/datacube.hpp"

namespace qdm::models {

// Closed-form pixel models. All are pure functions; safe to call from any
// number of threads.
//
//   hahn     visibility(tau) = A exp(-tau k)                    tau in ms
//   t1       contrast(tau)   = 1 - A exp(-(tau k)^eps)          tau in ms
//   rabi     contrast(tau)   = 1 - A/2 (1 - cos(2 pi f tau) exp(-tau k)),
//                                                               tau in us
//   ramsey   visibility(tau) = [sum_j A_j (1 - sin(2 pi f_j tau))] exp(-tau k)
//            with f_j = f - d, f, f + d (detuning f, hyperfine d), tau in us
//   odmr     contrast(nu)    = 1 - A [L(nu; c-d) + L(nu; c) + L(nu; c+d)]
//            with unit-peak Lorentzians L(nu; c) = (G/2)^2 / ((nu-c)^2 + (G/2)^2),
//            so A reads directly as the fractional dip depth. nu in MHz.
enum class ModelKind : std::uint8_t {
    odmr_triplet = 0,
    rabi = 1,
    ramsey = 2,
    hahn = 3,
    t1 = 4,
};

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

// Which model to fit plus its fixed constants. Free-parameter layout:
//   odmr_triplet: [amplitude, center_MHz, fwhm_MHz]
//   rabi:         [amplitude, frequency_MHz, decay_per_us]
//   ramsey:       [amp_m1, amp_0, amp_p1, decay_per_us]
//   hahn:         [amplitude, decay_per_ms]
//   t1:           [amplitude, decay_per_ms] (+ [stretch] when stretch_free)
struct ModelSpec {
    ModelKind kind = ModelKind::rabi;
    double hyperfine_mhz = 2.158; // 14N hyperfine triplet spacing
    double detuning_mhz = 5.0;    // ramsey drive offset from line center
    double stretch_exponent = 1.0;
    bool stretch_free = false;    // t1 only: fit the stretch as a parameter

    int param_count() const;
    const char* param_name(int i) const;
    cube::MapQuantity param_quantity(int i) const;
    cube::SweepKind sweep_kind() const;
    cube::Quantity quantity() const;
    void validate() const;
};

void eval_hahn(std::span<const double> tau_ms, double amplitude,
               double decay_per_ms, std::span<double> out);

void eval_t1(std::span<const double> tau_ms, double amplitude,
             double decay_per_ms, double stretch, std::span<double> out);

void eval_rabi(std::span<const double> tau_us, double amplitude,
               double frequency_mhz, double decay_per_us, std::span<double> out);

void eval_ramsey(std::span<const double> tau_us, double amp_m1, double amp_0,
                 double amp_p1, double decay_per_us, double detuning_mhz,
                 double hyperfine_mhz, std::span<double> out);

void eval_odmr(std::span<const double> freq_mhz, double amplitude,
               double center_mhz, double fwhm_mhz, double hyperfine_mhz,
               std::span<double> out);

// Dispatch on spec.kind with admissibility checks on the parameters.
void eval_model(const ModelSpec& spec, std::span<const double> params,
                std::span<const double> x, std::span<double> out);

// Values plus analytic partials, row-major jac[point * n_params + j].
void eval_model_jacobian(const ModelSpec& spec, std::span<const double> params,
                         std::span<const double> x, std::span<double> values,
                         std::span<double> jac);

// Throws ValidationError when params violate the model's admissible region.
void check_params(const ModelSpec& spec, std::span<const double> params);

} // namespace qdm::models
