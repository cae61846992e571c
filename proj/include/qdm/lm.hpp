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

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace qdm::fit {

// Box constraints, sized to the parameter count. Entries may be +-inf for
// an unconstrained side.
struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    static Bounds unconstrained(int n_params);
    void validate(int n_params) const;
    double clamp(double value, int j) const;
};

struct FitOptions {
    int max_iterations = 200;
    double damping_init = 1e-3;
    double damping_up = 10.0;
    double damping_down = 10.0;
    double damping_max = 1e12;
    double chisq_rtol = 1e-9; // relative chi^2 reduction at convergence
    double step_tol = 1e-8;   // scaled step norm at convergence
    int worker_count = 0;     // 0 = all hardware threads
    int dicing = 8;           // N for coarse seeding grids
    int block_restarts = 5;   // jittered restarts per seeding block
    double restart_jitter = 0.2;
    std::optional<Bounds> bounds; // overrides the per-model defaults
    bool record_trace = false;    // keep accepted-step chi^2 history
};

enum class FailureReason : std::uint8_t {
    none = 0,
    max_iter = 1,
    singular_normal_matrix = 2,
    bounds_stuck = 3,
};

const char* to_string(FailureReason r);

struct FitOutcome {
    std::vector<double> params;
    double chisq = std::numeric_limits<double>::quiet_NaN(); // sum of squared residuals
    int iterations = 0;
    bool converged = false;
    FailureReason failure = FailureReason::none;
    std::vector<double> chisq_trace; // initial + accepted steps, when recorded
};

// A curve y(x_i; p) sampled on a fixed abscissa, with analytic partials.
// Implementations must be pure and re-entrant.
class CurveModel {
public:
    virtual ~CurveModel() = default;
    virtual int param_count() const = 0;
    virtual std::size_t point_count() const = 0;
    virtual void eval(std::span<const double> params,
                      std::span<double> values) const = 0;
    // jac is row-major [point][param]; values filled as well.
    virtual void eval_jacobian(std::span<const double> params,
                               std::span<double> values,
                               std::span<double> jac) const = 0;
};

// Reusable scratch buffers for tight per-pixel loops.
struct LmWorkspace {
    std::vector<double> f, f_try, jac, params, cand, delta, normal, damped, grad, rhs;
};

// Damped Gauss-Newton with the classic multiplicative schedule: accepted
// steps scale the damping down, rejected ones scale it up, so the accepted
// chi^2 sequence never increases. Bounds are enforced by projecting each
// trial step onto the box before evaluation. Non-finite data is an error;
// numerical breakdown is reported in the outcome, never thrown.
FitOutcome lm_fit(const CurveModel& model, std::span<const double> y,
                  std::span<const double> seed, const Bounds& bounds,
                  const FitOptions& options, LmWorkspace& workspace);

FitOutcome lm_fit(const CurveModel& model, std::span<const double> y,
                  std::span<const double> seed, const Bounds& bounds,
                  const FitOptions& options = {});

} // namespace qdm::fit
