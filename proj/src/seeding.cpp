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
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qdm/errors.hpp"
#include "qdm/fitengine.hpp"
#include "qdm/numeric.hpp"
#include "qdm/parallel.hpp"
#include "qdm/rng.hpp"
#include "spec_curve.hpp"

namespace qdm::fit {
namespace {

constexpr std::uint64_t kJitterStream = 0x6A69747465727331ull; // "jitters1"

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool ok = false;
};

LinFit linear_regression(std::span<const double> x, std::span<const double> y) {
    LinFit out;
    const std::size_t n = x.size();
    if (n < 2) return out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = static_cast<double>(n) * sxx - sx * sx;
    if (det <= 0.0) return out;
    out.slope = (static_cast<double>(n) * sxy - sx * sy) / det;
    out.intercept = (sy - out.slope * sx) / static_cast<double>(n);
    out.ok = std::isfinite(out.slope) && std::isfinite(out.intercept);
    return out;
}

// Decay rate and zero-time amplitude of |y| ~ A exp(-k t) via regression on
// the log of the positive samples.
LinFit log_envelope(std::span<const double> t, std::span<const double> y,
                    double floor) {
    std::vector<double> xs, ys;
    xs.reserve(t.size());
    ys.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        if (y[i] > floor) {
            xs.push_back(t[i]);
            ys.push_back(std::log(y[i]));
        }
    return linear_regression(xs, ys);
}

// Dominant frequency of the demeaned trace by direct evaluation of the
// discrete spectrum on a dense grid, refined parabolically.
double dominant_frequency(std::span<const double> t, std::span<const double> y,
                          double f_lo, double f_hi) {
    const std::size_t n = t.size();
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= static_cast<double>(n);

    const double span = t.back() - t.front();
    const double df = 0.25 / span;
    const int bins = std::max(4, static_cast<int>((f_hi - f_lo) / df));
    std::vector<double> power(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) {
        const double f = f_lo + (f_hi - f_lo) * b / (bins - 1);
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double phase = 2.0 * std::numbers::pi * f * t[i];
            const double d = y[i] - ybar;
            re += d * std::cos(phase);
            im += d * std::sin(phase);
        }
        power[static_cast<std::size_t>(b)] = re * re + im * im;
    }
    int best = 0;
    for (int b = 1; b < bins; ++b)
        if (power[static_cast<std::size_t>(b)] > power[static_cast<std::size_t>(best)])
            best = b;
    double refined = static_cast<double>(best);
    if (best > 0 && best + 1 < bins) {
        const double pm = power[static_cast<std::size_t>(best - 1)];
        const double p0 = power[static_cast<std::size_t>(best)];
        const double pp = power[static_cast<std::size_t>(best + 1)];
        const double denom = pm - 2.0 * p0 + pp;
        if (denom < 0.0) refined += 0.5 * (pm - pp) / denom;
    }
    return f_lo + (f_hi - f_lo) * refined / (bins - 1);
}

double clamp_to(const Bounds& b, int j, double v) {
    if (!std::isfinite(v)) v = 0.5 * (b.lower[static_cast<std::size_t>(j)] +
                                      b.upper[static_cast<std::size_t>(j)]);
    return b.clamp(v, j);
}

struct PeakCluster {
    std::vector<int> peak_idx;
};

} // namespace

Bounds default_bounds(const models::ModelSpec& spec, const cube::SweepAxis& sweep) {
    spec.validate();
    if (sweep.kind != spec.sweep_kind())
        throw ValidationError(std::string("model \"") + to_string(spec.kind) +
                              "\" expects a " + to_string(spec.sweep_kind()) +
                              " axis but the cube sweep is " +
                              to_string(sweep.kind));
    const double span = sweep.span();
    const double step = sweep.min_step();
    Bounds b;
    switch (spec.kind) {
    case models::ModelKind::odmr_triplet:
        b.lower = {0.0, sweep.values.front() - 0.25 * span, 0.25 * step};
        b.upper = {1.0, sweep.values.back() + 0.25 * span, 2.0 * span};
        break;
    case models::ModelKind::rabi:
        b.lower = {0.0, 0.25 / span, 0.0};
        b.upper = {1.0, 0.5 / step, 20.0 / span};
        break;
    case models::ModelKind::ramsey:
        b.lower = {0.0, 0.0, 0.0, 0.0};
        b.upper = {2.0, 2.0, 2.0, 20.0 / span};
        break;
    case models::ModelKind::hahn:
        b.lower = {0.0, 0.0};
        b.upper = {2.0, 50.0 / span};
        break;
    case models::ModelKind::t1:
        b.lower = {0.0, 1e-9};
        b.upper = {1.0, 50.0 / span};
        if (spec.stretch_free) {
            b.lower.push_back(0.05);
            b.upper.push_back(3.0);
        }
        break;
    }
    return b;
}

std::vector<double> heuristic_seed(const models::ModelSpec& spec,
                                   const cube::SweepAxis& sweep,
                                   std::span<const double> trace) {
    if (trace.size() != static_cast<std::size_t>(sweep.points()))
        throw ValidationError("trace length does not match sweep");
    const Bounds b = default_bounds(spec, sweep);
    const std::span<const double> t(sweep.values);
    const double span = sweep.span();
    std::vector<double> seed(static_cast<std::size_t>(spec.param_count()));

    switch (spec.kind) {
    case models::ModelKind::rabi: {
        const double m = mean(trace);
        seed[0] = clamp_to(b, 0, 2.0 * (1.0 - m));
        seed[1] = clamp_to(b, 1, dominant_frequency(t, trace, b.lower[1], b.upper[1]));
        // decay from the oscillation amplitude of the first vs last third
        const std::size_t third = trace.size() / 3;
        const auto swing = [&](std::size_t lo, std::size_t hi) {
            double mn = trace[lo], mx = trace[lo];
            for (std::size_t i = lo; i < hi; ++i) {
                mn = std::min(mn, trace[i]);
                mx = std::max(mx, trace[i]);
            }
            return mx - mn;
        };
        const double a1 = swing(0, third);
        const double a3 = swing(trace.size() - third, trace.size());
        double kappa = 1.0 / span;
        if (a1 > 0.0 && a3 > 0.0) {
            const double dt = t[trace.size() - third / 2 - 1] - t[third / 2];
            if (dt > 0.0) kappa = std::log(a1 / a3) / dt;
        }
        seed[2] = clamp_to(b, 2, kappa);
        break;
    }
    case models::ModelKind::hahn: {
        const double peak = *std::max_element(trace.begin(), trace.end());
        const LinFit fit = log_envelope(t, trace, std::max(1e-12, 1e-3 * peak));
        seed[0] = clamp_to(b, 0, fit.ok ? std::exp(fit.intercept) : peak);
        seed[1] = clamp_to(b, 1, fit.ok ? -fit.slope : 1.0 / span);
        break;
    }
    case models::ModelKind::t1: {
        std::vector<double> w(trace.size());
        for (std::size_t i = 0; i < trace.size(); ++i) w[i] = 1.0 - trace[i];
        const double peak = *std::max_element(w.begin(), w.end());
        const LinFit fit = log_envelope(t, w, std::max(1e-12, 1e-3 * peak));
        seed[0] = clamp_to(b, 0, fit.ok ? std::exp(fit.intercept) : peak);
        seed[1] = clamp_to(b, 1, fit.ok ? -fit.slope : 1.0 / span);
        if (spec.stretch_free) seed[2] = clamp_to(b, 2, 1.0);
        break;
    }
    case models::ModelKind::ramsey: {
        // envelope of extrema decays like exp(-kappa t)
        std::vector<double> xt, xv;
        for (std::size_t i = 1; i + 1 < trace.size(); ++i)
            if (trace[i] >= trace[i - 1] && trace[i] >= trace[i + 1] && trace[i] > 0.0) {
                xt.push_back(t[i]);
                xv.push_back(std::log(trace[i]));
            }
        const LinFit fit = linear_regression(xt, xv);
        double amp_sum = std::max(trace[0], 0.0);
        double kappa = 1.0 / span;
        if (fit.ok) {
            amp_sum = std::exp(fit.intercept) / 2.0;
            kappa = -fit.slope;
        }
        for (int j = 0; j < 3; ++j) seed[static_cast<std::size_t>(j)] =
            clamp_to(b, j, amp_sum / 3.0);
        seed[3] = clamp_to(b, 3, kappa);
        break;
    }
    case models::ModelKind::odmr_triplet: {
        std::vector<double> depth(trace.size());
        double dmax = 0.0;
        std::size_t imax = 0;
        double wsum = 0.0, fsum = 0.0;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            depth[i] = std::max(1.0 - trace[i], 0.0);
            if (depth[i] > dmax) {
                dmax = depth[i];
                imax = i;
            }
            wsum += depth[i];
            fsum += depth[i] * t[i];
        }
        seed[0] = clamp_to(b, 0, dmax);
        seed[1] = clamp_to(b, 1, wsum > 0.0 ? fsum / wsum
                                            : 0.5 * (t.front() + t.back()));
        // half-depth width of the tallest dip
        double lo = t.front(), hi = t.back();
        for (std::size_t i = imax; i-- > 0;)
            if (depth[i] < 0.5 * dmax) {
                lo = t[i + 1];
                break;
            }
        for (std::size_t i = imax + 1; i < trace.size(); ++i)
            if (depth[i] < 0.5 * dmax) {
                hi = t[i - 1];
                break;
            }
        seed[2] = clamp_to(b, 2, std::max(hi - lo, sweep.min_step()));
        break;
    }
    }
    return seed;
}

FitOutcome multistart_fit(std::span<const double> trace,
                          const models::ModelSpec& spec,
                          const cube::SweepAxis& sweep, const FitOptions& options,
                          std::uint64_t rng_key) {
    const Bounds bounds = options.bounds ? *options.bounds
                                         : default_bounds(spec, sweep);
    const std::vector<double> h = heuristic_seed(spec, sweep, trace);
    const int n = spec.param_count();
    const std::uint64_t stream = rng::derive(kJitterStream, rng_key);

    SpecCurve curve(spec, sweep.values);
    LmWorkspace ws;
    FitOutcome best;
    bool have_best = false;

    std::vector<double> seed(h);
    for (int r = 0; r <= options.block_restarts; ++r) {
        if (r == 0) {
            seed = h;
        } else {
            for (int j = 0; j < n; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                double scale = std::abs(h[sj]);
                const double range = bounds.upper[sj] - bounds.lower[sj];
                if (std::isfinite(range)) scale = std::max(scale, 0.05 * range);
                const double u = rng::uniform_pm1(
                    stream, static_cast<std::uint64_t>(r) * 32 +
                                static_cast<std::uint64_t>(j));
                seed[sj] = bounds.clamp(h[sj] + options.restart_jitter * u * scale, j);
            }
        }
        FitOutcome trial = lm_fit(curve, trace, seed, bounds, options, ws);
        const bool better =
            !have_best ||
            (trial.converged && !best.converged) ||
            (trial.converged == best.converged && trial.chisq < best.chisq);
        if (better) {
            best = std::move(trial);
            have_best = true;
        }
    }
    return best;
}

SeedGrid SeedGrid::layout(int dicing, int width, int height) {
    if (dicing < 1 || dicing > 10)
        throw ValidationError("dicing factor must be in [1, 10]");
    SeedGrid g;
    g.dicing = dicing;
    g.block_w = (width + dicing - 1) / dicing;
    g.block_h = (height + dicing - 1) / dicing;
    g.blocks_x = (width + g.block_w - 1) / g.block_w;
    g.blocks_y = (height + g.block_h - 1) / g.block_h;
    g.seeds.resize(static_cast<std::size_t>(g.block_count()));
    g.inherited.assign(static_cast<std::size_t>(g.block_count()), 0);
    return g;
}

SeedGrid seed_by_dicing(const cube::DataCube& cube, const models::ModelSpec& spec,
                        int dicing, const FitOptions& options) {
    if (cube.quantity() != spec.quantity())
        throw ValidationError(std::string("cube holds ") +
                              to_string(cube.quantity()) + " but model \"" +
                              to_string(spec.kind) + "\" fits " +
                              to_string(spec.quantity()));
    SeedGrid grid = SeedGrid::layout(dicing, cube.width(), cube.height());
    const int points = cube.sweep().points();
    const int nb = grid.block_count();

    std::vector<std::uint8_t> fitted(static_cast<std::size_t>(nb), 0);

    parallel_for(static_cast<std::size_t>(nb), options.worker_count,
                 [&](std::size_t b0, std::size_t b1) {
        std::vector<double> trace(static_cast<std::size_t>(points));
        for (std::size_t b = b0; b < b1; ++b) {
            const int bx = static_cast<int>(b) % grid.blocks_x;
            const int by = static_cast<int>(b) / grid.blocks_x;
            const int x0 = bx * grid.block_w;
            const int y0 = by * grid.block_h;
            const int x1 = std::min(x0 + grid.block_w, cube.width());
            const int y1 = std::min(y0 + grid.block_h, cube.height());

            std::size_t members = 0;
            std::fill(trace.begin(), trace.end(), 0.0);
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) {
                    if (!cube.pixel_valid(x, y)) continue;
                    ++members;
                    for (int p = 0; p < points; ++p)
                        trace[static_cast<std::size_t>(p)] += cube.at(p, y, x);
                }
            if (members == 0) continue; // inherits below

            for (auto& v : trace) v /= static_cast<double>(members);
            FitOutcome fit = multistart_fit(trace, spec, cube.sweep(), options,
                                            static_cast<std::uint64_t>(b));
            if (fit.converged) {
                grid.seeds[b] = std::move(fit.params);
                fitted[b] = 1;
            }
        }
    }, 1);

    // blocks whose restarts all failed inherit the nearest fitted seed
    bool any = false;
    for (auto f : fitted) any = any || f != 0;
    if (!any)
        throw ProcessingError("no dicing block fit converged; cannot seed the image");

    for (int b = 0; b < nb; ++b) {
        if (fitted[static_cast<std::size_t>(b)]) continue;
        const int bx = b % grid.blocks_x;
        const int by = b / grid.blocks_x;
        const int max_r = std::max(grid.blocks_x, grid.blocks_y);
        bool found = false;
        for (int r = 1; r <= max_r && !found; ++r) {
            for (int dy = -r; dy <= r && !found; ++dy) {
                for (int dx = -r; dx <= r && !found; ++dx) {
                    if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
                    const int nx = bx + dx, ny = by + dy;
                    if (nx < 0 || ny < 0 || nx >= grid.blocks_x || ny >= grid.blocks_y)
                        continue;
                    const int nbk = ny * grid.blocks_x + nx;
                    if (fitted[static_cast<std::size_t>(nbk)]) {
                        grid.seeds[static_cast<std::size_t>(b)] =
                            grid.seeds[static_cast<std::size_t>(nbk)];
                        grid.inherited[static_cast<std::size_t>(b)] = 1;
                        found = true;
                    }
                }
            }
        }
    }
    return grid;
}

std::vector<OdmrGroupWindow> find_odmr_peaks(std::span<const double> spectrum,
                                             const cube::SweepAxis& freq,
                                             int expected_groups,
                                             double hyperfine_mhz) {
    if (freq.kind != cube::SweepKind::frequency_mhz)
        throw ValidationError("peak search needs a frequency axis");
    if (spectrum.size() != static_cast<std::size_t>(freq.points()))
        throw ValidationError("spectrum length does not match frequency axis");
    if (expected_groups < 1)
        throw ValidationError("expected group count must be >= 1");
    if (!(hyperfine_mhz > 0.0))
        throw ValidationError("hyperfine splitting must be > 0");

    const std::size_t n = spectrum.size();
    const std::span<const double> f(freq.values);
    std::vector<double> depth(n);
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        depth[i] = std::max(1.0 - spectrum[i], 0.0);
        dmax = std::max(dmax, depth[i]);
    }
    if (dmax <= 1e-9)
        throw PeakCountError(0, expected_groups,
                             "flat spectrum: found 0 resonance groups, expected " +
                                 std::to_string(expected_groups));

    const double thresh = 0.2 * dmax;
    std::vector<int> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (depth[i] >= thresh && depth[i] > depth[i - 1] && depth[i] >= depth[i + 1])
            peaks.push_back(static_cast<int>(i));

    if (peaks.empty())
        throw PeakCountError(0, expected_groups,
                             "found 0 resonance groups, expected " +
                                 std::to_string(expected_groups));

    // hyperfine partners stay together, distinct groups split
    const double gap = std::max(1.6 * hyperfine_mhz, 2.0 * freq.min_step());
    std::vector<PeakCluster> clusters;
    clusters.push_back({{peaks[0]}});
    for (std::size_t k = 1; k < peaks.size(); ++k) {
        const double df = f[static_cast<std::size_t>(peaks[k])] -
                          f[static_cast<std::size_t>(clusters.back().peak_idx.back())];
        if (df > gap)
            clusters.push_back({{peaks[k]}});
        else
            clusters.back().peak_idx.push_back(peaks[k]);
    }

    std::vector<OdmrGroupWindow> windows;
    for (const auto& c : clusters) {
        const double f_first = f[static_cast<std::size_t>(c.peak_idx.front())];
        const double f_last = f[static_cast<std::size_t>(c.peak_idx.back())];
        const double w_lo = f_first - 1.2 * hyperfine_mhz;
        const double w_hi = f_last + 1.2 * hyperfine_mhz;

        double wsum = 0.0, fsum = 0.0;
        int tallest = c.peak_idx.front();
        for (std::size_t i = 0; i < n; ++i) {
            if (f[i] < w_lo || f[i] > w_hi) continue;
            wsum += depth[i];
            fsum += depth[i] * f[i];
        }
        for (int idx : c.peak_idx)
            if (depth[static_cast<std::size_t>(idx)] >
                depth[static_cast<std::size_t>(tallest)])
                tallest = idx;

        OdmrGroupWindow w;
        w.center_mhz = wsum > 0.0 ? fsum / wsum : 0.5 * (f_first + f_last);
        w.amp_est = depth[static_cast<std::size_t>(tallest)];

        const double half_depth = 0.5 * w.amp_est;
        double lo = w_lo, hi = w_hi;
        for (std::size_t i = static_cast<std::size_t>(tallest); i-- > 0;) {
            if (f[i] < w_lo) break;
            if (depth[i] < half_depth) {
                // linear interpolation of the crossing
                const double t = (half_depth - depth[i]) / (depth[i + 1] - depth[i]);
                lo = f[i] + t * (f[i + 1] - f[i]);
                break;
            }
        }
        for (std::size_t i = static_cast<std::size_t>(tallest) + 1; i < n; ++i) {
            if (f[i] > w_hi) break;
            if (depth[i] < half_depth) {
                const double t = (depth[i - 1] - half_depth) / (depth[i - 1] - depth[i]);
                hi = f[i - 1] + t * (f[i] - f[i - 1]);
                break;
            }
        }
        w.fwhm_est_mhz = std::clamp(hi - lo, freq.min_step(), w_hi - w_lo);
        w.half_width_mhz = std::max(3.0 * w.fwhm_est_mhz, 3.0 * hyperfine_mhz);
        windows.push_back(w);
    }

    for (std::size_t k = 0; k + 1 < windows.size(); ++k)
        if (windows[k].hi() > windows[k + 1].lo()) {
            windows[k].overlapped = true;
            windows[k + 1].overlapped = true;
        }

    if (static_cast<int>(windows.size()) != expected_groups)
        throw PeakCountError(static_cast<int>(windows.size()), expected_groups,
                             "found " + std::to_string(windows.size()) +
                                 " resonance groups, expected " +
                                 std::to_string(expected_groups));
    return windows;
}

} // namespace qdm::fit
