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
#include "qdm/lm.hpp"

#include <algorithm>
#include <cmath>

#include "qdm/errors.hpp"

namespace qdm::fit {
namespace {

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double chisq_of(std::span<const double> f, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = f[i] - y[i];
        s += r * r;
    }
    return s;
}

// In-place Cholesky solve of A x = b for small symmetric A (row-major n*n).
// Returns false when A is not positive definite or not finite.
bool cholesky_solve(std::vector<double>& a, std::span<const double> b,
                    std::span<double> x, int n) {
    const auto at = [&](int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(j)];
    };
    for (int j = 0; j < n; ++j) {
        double d = at(j, j);
        for (int k = 0; k < j; ++k) d -= at(j, k) * at(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        at(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = at(i, j);
            for (int k = 0; k < j; ++k) s -= at(i, k) * at(j, k);
            at(i, j) = s / at(j, j);
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= at(i, k) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / at(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= at(k, i) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / at(i, i);
    }
    return all_finite(x.first(static_cast<std::size_t>(n)));
}

} // namespace

Bounds Bounds::unconstrained(int n_params) {
    const double inf = std::numeric_limits<double>::infinity();
    Bounds b;
    b.lower.assign(static_cast<std::size_t>(n_params), -inf);
    b.upper.assign(static_cast<std::size_t>(n_params), inf);
    return b;
}

void Bounds::validate(int n_params) const {
    if (lower.size() != static_cast<std::size_t>(n_params) ||
        upper.size() != static_cast<std::size_t>(n_params))
        throw ValidationError("bounds size does not match parameter count");
    for (std::size_t j = 0; j < lower.size(); ++j)
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || !(lower[j] <= upper[j]))
            throw ValidationError("invalid bounds (lower must be <= upper)");
}

double Bounds::clamp(double value, int j) const {
    const auto sj = static_cast<std::size_t>(j);
    return std::min(std::max(value, lower[sj]), upper[sj]);
}

const char* to_string(FailureReason r) {
    switch (r) {
    case FailureReason::none: return "none";
    case FailureReason::max_iter: return "max_iter";
    case FailureReason::singular_normal_matrix: return "singular_normal_matrix";
    case FailureReason::bounds_stuck: return "bounds_stuck";
    }
    return "unknown";
}

FitOutcome lm_fit(const CurveModel& model, std::span<const double> y,
                  std::span<const double> seed, const Bounds& bounds,
                  const FitOptions& options, LmWorkspace& ws) {
    const int n = model.param_count();
    const std::size_t sn = static_cast<std::size_t>(n);
    const std::size_t m = model.point_count();
    if (y.size() != m)
        throw ValidationError("series length does not match the model abscissa");
    if (m < sn + 1)
        throw ValidationError("series shorter than parameter count + 1");
    if (!all_finite(y))
        throw ValidationError("series contains a non-finite value");
    if (seed.size() != sn)
        throw ValidationError("seed length does not match parameter count");
    if (options.max_iterations < 1)
        throw ValidationError("max_iterations must be >= 1");
    bounds.validate(n);

    ws.f.resize(m);
    ws.f_try.resize(m);
    ws.jac.resize(m * sn);
    ws.params.assign(seed.begin(), seed.end());
    ws.cand.resize(sn);
    ws.delta.resize(sn);
    ws.normal.resize(sn * sn);
    ws.damped.resize(sn * sn);
    ws.grad.resize(sn);
    ws.rhs.resize(sn);

    for (int j = 0; j < n; ++j) ws.params[static_cast<std::size_t>(j)] =
        bounds.clamp(ws.params[static_cast<std::size_t>(j)], j);

    FitOutcome out;
    out.params = ws.params;

    model.eval_jacobian(ws.params, ws.f, ws.jac);
    if (!all_finite(ws.f))
        throw ValidationError("model is not finite at the seed");
    double chisq = chisq_of(ws.f, y);
    out.chisq = chisq;
    if (options.record_trace) out.chisq_trace.push_back(chisq);

    double lambda = options.damping_init;
    bool done = false;

    for (int iter = 1; iter <= options.max_iterations && !done; ++iter) {
        out.iterations = iter;

        if (chisq <= 1e-300) { // exact data; nothing to improve
            out.converged = true;
            break;
        }

        // normal matrix and gradient from the jacobian at the current point
        for (int a = 0; a < n; ++a) {
            const auto sa = static_cast<std::size_t>(a);
            double g = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                g += ws.jac[i * sn + sa] * (ws.f[i] - y[i]);
            ws.grad[sa] = g;
            for (int b = a; b < n; ++b) {
                const auto sb = static_cast<std::size_t>(b);
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    s += ws.jac[i * sn + sa] * ws.jac[i * sn + sb];
                ws.normal[sa * sn + sb] = s;
                ws.normal[sb * sn + sa] = s;
            }
        }
        if (!all_finite(ws.normal) || !all_finite(ws.grad)) {
            out.failure = FailureReason::singular_normal_matrix;
            break;
        }
        double diag_max = 0.0;
        for (std::size_t a = 0; a < sn; ++a)
            diag_max = std::max(diag_max, ws.normal[a * sn + a]);
        const double diag_floor = 1e-12 * std::max(diag_max, 1.0);

        double param_norm = 0.0;
        for (double p : ws.params) param_norm += p * p;
        const double step_floor = options.step_tol * (std::sqrt(param_norm) + 1.0);

        bool accepted = false;
        bool blocked_by_bounds = false;
        bool any_solve_ok = false;

        while (lambda <= options.damping_max) {
            ws.damped = ws.normal;
            for (std::size_t a = 0; a < sn; ++a)
                ws.damped[a * sn + a] =
                    ws.normal[a * sn + a] * (1.0 + lambda) + lambda * diag_floor;
            for (std::size_t a = 0; a < sn; ++a) ws.rhs[a] = -ws.grad[a];
            if (!cholesky_solve(ws.damped, ws.rhs, ws.delta, n)) {
                lambda *= options.damping_up;
                continue;
            }
            any_solve_ok = true;

            double raw_step = 0.0, proj_step = 0.0;
            for (int a = 0; a < n; ++a) {
                const auto sa = static_cast<std::size_t>(a);
                ws.cand[sa] = bounds.clamp(ws.params[sa] + ws.delta[sa], a);
                raw_step += ws.delta[sa] * ws.delta[sa];
                const double moved = ws.cand[sa] - ws.params[sa];
                proj_step += moved * moved;
            }
            raw_step = std::sqrt(raw_step);
            proj_step = std::sqrt(proj_step);

            if (proj_step <= step_floor) {
                if (raw_step > step_floor) {
                    // the box swallowed the whole step; damp harder
                    blocked_by_bounds = true;
                    lambda *= options.damping_up;
                    continue;
                }
                if (blocked_by_bounds)
                    out.failure = FailureReason::bounds_stuck;
                else
                    out.converged = true;
                done = true;
                break;
            }

            model.eval(ws.cand, ws.f_try);
            double chisq_try = std::numeric_limits<double>::infinity();
            if (all_finite(ws.f_try)) chisq_try = chisq_of(ws.f_try, y);

            if (chisq_try < chisq) {
                const double reduction = chisq - chisq_try;
                ws.params = ws.cand;
                ws.f.swap(ws.f_try);
                chisq = chisq_try;
                lambda = std::max(lambda / options.damping_down, 1e-12);
                accepted = true;
                if (options.record_trace) out.chisq_trace.push_back(chisq);
                if (reduction <= options.chisq_rtol * std::max(chisq, 1e-300)) {
                    out.converged = true;
                    done = true;
                }
                break;
            }
            lambda *= options.damping_up;
        }

        if (done) break;

        if (!accepted) { // damping exhausted
            if (!any_solve_ok)
                out.failure = FailureReason::singular_normal_matrix;
            else if (blocked_by_bounds)
                out.failure = FailureReason::bounds_stuck;
            else
                out.converged = true; // steps shrank below resolution
            break;
        }

        if (iter == options.max_iterations) {
            out.failure = FailureReason::max_iter;
            break;
        }

        model.eval_jacobian(ws.params, ws.f, ws.jac);
        if (!all_finite(ws.f)) {
            out.failure = FailureReason::singular_normal_matrix;
            break;
        }
    }

    out.params = ws.params;
    out.chisq = chisq;
    if (out.converged) out.failure = FailureReason::none;
    return out;
}

FitOutcome lm_fit(const CurveModel& model, std::span<const double> y,
                  std::span<const double> seed, const Bounds& bounds,
                  const FitOptions& options) {
    LmWorkspace ws;
    return lm_fit(model, y, seed, bounds, options, ws);
}

} // namespace qdm::fit
