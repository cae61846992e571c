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
#include "qdm/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qdm/errors.hpp"

namespace qdm::models {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_sizes(std::span<const double> x, std::span<const double> out_like,
                 int n_params, std::span<const double> params) {
    if (out_like.size() != x.size())
        throw ValidationError("output span size does not match sweep length");
    if (static_cast<int>(params.size()) != n_params)
        throw ValidationError("parameter vector has wrong length");
}

// Unit-peak Lorentzian and its partials in (center, fwhm).
struct Lorentzian {
    double value;
    double d_center;
    double d_fwhm;
};

inline Lorentzian lorentzian(double nu, double center, double fwhm) {
    const double half = 0.5 * fwhm;
    const double h = half * half;
    const double u = nu - center;
    const double denom = u * u + h;
    const double inv = 1.0 / denom;
    const double value = h * inv;
    return {value, 2.0 * h * u * inv * inv, half * u * u * inv * inv};
}

} // namespace

const char* to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::odmr_triplet: return "odmr";
    case ModelKind::rabi: return "rabi";
    case ModelKind::ramsey: return "ramsey";
    case ModelKind::hahn: return "hahn";
    case ModelKind::t1: return "t1";
    }
    return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
    if (name == "odmr" || name == "odmr_triplet") return ModelKind::odmr_triplet;
    if (name == "rabi") return ModelKind::rabi;
    if (name == "ramsey") return ModelKind::ramsey;
    if (name == "hahn") return ModelKind::hahn;
    if (name == "t1") return ModelKind::t1;
    throw ValidationError("unknown model \"" + std::string(name) + "\"");
}

int ModelSpec::param_count() const {
    switch (kind) {
    case ModelKind::odmr_triplet: return 3;
    case ModelKind::rabi: return 3;
    case ModelKind::ramsey: return 4;
    case ModelKind::hahn: return 2;
    case ModelKind::t1: return stretch_free ? 3 : 2;
    }
    return 0;
}

const char* ModelSpec::param_name(int i) const {
    static const char* odmr[] = {"amplitude", "f_center", "fwhm"};
    static const char* rabi[] = {"amplitude", "frequency", "kappa"};
    static const char* ramsey[] = {"amp_m1", "amp_0", "amp_p1", "kappa"};
    static const char* decay[] = {"amplitude", "kappa", "stretch"};
    switch (kind) {
    case ModelKind::odmr_triplet: return odmr[i];
    case ModelKind::rabi: return rabi[i];
    case ModelKind::ramsey: return ramsey[i];
    case ModelKind::hahn: return decay[i];
    case ModelKind::t1: return decay[i];
    }
    return "";
}

cube::MapQuantity ModelSpec::param_quantity(int i) const {
    using cube::MapQuantity;
    switch (kind) {
    case ModelKind::odmr_triplet:
        return i == 0 ? MapQuantity::amplitude
               : i == 1 ? MapQuantity::frequency_mhz
                        : MapQuantity::linewidth_mhz;
    case ModelKind::rabi:
        return i == 0 ? MapQuantity::amplitude
               : i == 1 ? MapQuantity::frequency_mhz
                        : MapQuantity::decay_per_us;
    case ModelKind::ramsey:
        return i < 3 ? MapQuantity::amplitude : MapQuantity::decay_per_us;
    case ModelKind::hahn:
        return i == 0 ? MapQuantity::amplitude : MapQuantity::decay_per_ms;
    case ModelKind::t1:
        return i == 0 ? MapQuantity::amplitude
               : i == 1 ? MapQuantity::decay_per_ms
                        : MapQuantity::stretch_exponent;
    }
    return MapQuantity::generic;
}

cube::SweepKind ModelSpec::sweep_kind() const {
    switch (kind) {
    case ModelKind::odmr_triplet: return cube::SweepKind::frequency_mhz;
    case ModelKind::rabi:
    case ModelKind::ramsey: return cube::SweepKind::time_us;
    case ModelKind::hahn:
    case ModelKind::t1: return cube::SweepKind::time_ms;
    }
    return cube::SweepKind::frequency_mhz;
}

cube::Quantity ModelSpec::quantity() const {
    switch (kind) {
    case ModelKind::odmr_triplet:
    case ModelKind::rabi:
    case ModelKind::t1: return cube::Quantity::contrast;
    case ModelKind::ramsey:
    case ModelKind::hahn: return cube::Quantity::visibility;
    }
    return cube::Quantity::contrast;
}

void ModelSpec::validate() const {
    if (kind == ModelKind::odmr_triplet || kind == ModelKind::ramsey) {
        if (!(hyperfine_mhz >= 0.0))
            throw ValidationError("hyperfine splitting must be >= 0");
    }
    if (kind == ModelKind::ramsey && !(detuning_mhz > hyperfine_mhz))
        throw ValidationError("ramsey detuning must exceed the hyperfine splitting");
    if (kind == ModelKind::t1 && !stretch_free &&
        !(stretch_exponent > 0.0 && stretch_exponent <= 3.0))
        throw ValidationError("stretch exponent must be in (0, 3]");
}

void check_params(const ModelSpec& spec, std::span<const double> params) {
    spec.validate();
    if (static_cast<int>(params.size()) != spec.param_count())
        throw ValidationError("parameter vector has wrong length");
    switch (spec.kind) {
    case ModelKind::odmr_triplet:
        if (!(params[0] >= 0.0)) throw ValidationError("amplitude must be >= 0");
        if (!(params[2] > 0.0)) throw ValidationError("linewidth must be > 0");
        break;
    case ModelKind::rabi:
        if (!(params[0] >= 0.0)) throw ValidationError("amplitude must be >= 0");
        if (!(params[1] > 0.0)) throw ValidationError("frequency must be > 0");
        if (!(params[2] >= 0.0)) throw ValidationError("decay rate must be >= 0");
        break;
    case ModelKind::ramsey:
        for (int j = 0; j < 3; ++j)
            if (!(params[static_cast<std::size_t>(j)] >= 0.0))
                throw ValidationError("amplitudes must be >= 0");
        if (!(params[3] >= 0.0)) throw ValidationError("decay rate must be >= 0");
        break;
    case ModelKind::hahn:
        if (!(params[0] >= 0.0)) throw ValidationError("amplitude must be >= 0");
        if (!(params[1] >= 0.0)) throw ValidationError("decay rate must be >= 0");
        break;
    case ModelKind::t1:
        if (!(params[0] >= 0.0)) throw ValidationError("amplitude must be >= 0");
        if (!(params[1] >= 0.0)) throw ValidationError("decay rate must be >= 0");
        if (spec.stretch_free && !(params[2] > 0.0 && params[2] <= 3.0))
            throw ValidationError("stretch exponent must be in (0, 3]");
        break;
    }
}

void eval_hahn(std::span<const double> tau_ms, double amplitude,
               double decay_per_ms, std::span<double> out) {
    if (!(decay_per_ms >= 0.0)) throw ValidationError("decay rate must be >= 0");
    if (!(amplitude >= 0.0)) throw ValidationError("amplitude must be >= 0");
    if (out.size() != tau_ms.size())
        throw ValidationError("output span size does not match sweep length");
    for (std::size_t i = 0; i < tau_ms.size(); ++i)
        out[i] = amplitude * std::exp(-tau_ms[i] * decay_per_ms);
}

void eval_t1(std::span<const double> tau_ms, double amplitude,
             double decay_per_ms, double stretch, std::span<double> out) {
    if (!(decay_per_ms >= 0.0)) throw ValidationError("decay rate must be >= 0");
    if (!(stretch > 0.0 && stretch <= 3.0))
        throw ValidationError("stretch exponent must be in (0, 3]");
    if (!(amplitude >= 0.0)) throw ValidationError("amplitude must be >= 0");
    if (out.size() != tau_ms.size())
        throw ValidationError("output span size does not match sweep length");
    for (std::size_t i = 0; i < tau_ms.size(); ++i) {
        const double tk = tau_ms[i] * decay_per_ms;
        const double theta = tk > 0.0 ? std::pow(tk, stretch) : 0.0;
        out[i] = 1.0 - amplitude * std::exp(-theta);
    }
}

void eval_rabi(std::span<const double> tau_us, double amplitude,
               double frequency_mhz, double decay_per_us, std::span<double> out) {
    if (!(frequency_mhz > 0.0)) throw ValidationError("frequency must be > 0");
    if (!(decay_per_us >= 0.0)) throw ValidationError("decay rate must be >= 0");
    if (!(amplitude >= 0.0)) throw ValidationError("amplitude must be >= 0");
    if (out.size() != tau_us.size())
        throw ValidationError("output span size does not match sweep length");
    for (std::size_t i = 0; i < tau_us.size(); ++i) {
        const double tau = tau_us[i];
        out[i] = 1.0 - 0.5 * amplitude *
                           (1.0 - std::cos(kTwoPi * frequency_mhz * tau) *
                                      std::exp(-tau * decay_per_us));
    }
}

void eval_ramsey(std::span<const double> tau_us, double amp_m1, double amp_0,
                 double amp_p1, double decay_per_us, double detuning_mhz,
                 double hyperfine_mhz, std::span<double> out) {
    if (!(hyperfine_mhz >= 0.0))
        throw ValidationError("hyperfine splitting must be >= 0");
    if (!(detuning_mhz > hyperfine_mhz))
        throw ValidationError("ramsey detuning must exceed the hyperfine splitting");
    if (!(decay_per_us >= 0.0)) throw ValidationError("decay rate must be >= 0");
    if (!(amp_m1 >= 0.0 && amp_0 >= 0.0 && amp_p1 >= 0.0))
        throw ValidationError("amplitudes must be >= 0");
    if (out.size() != tau_us.size())
        throw ValidationError("output span size does not match sweep length");
    const double f[3] = {detuning_mhz - hyperfine_mhz, detuning_mhz,
                         detuning_mhz + hyperfine_mhz};
    const double a[3] = {amp_m1, amp_0, amp_p1};
    for (std::size_t i = 0; i < tau_us.size(); ++i) {
        const double tau = tau_us[i];
        double sum = 0.0;
        for (int j = 0; j < 3; ++j)
            sum += a[j] * (1.0 - std::sin(kTwoPi * f[j] * tau));
        out[i] = sum * std::exp(-tau * decay_per_us);
    }
}

void eval_odmr(std::span<const double> freq_mhz, double amplitude,
               double center_mhz, double fwhm_mhz, double hyperfine_mhz,
               std::span<double> out) {
    if (!(fwhm_mhz > 0.0)) throw ValidationError("linewidth must be > 0");
    if (!(hyperfine_mhz >= 0.0))
        throw ValidationError("hyperfine splitting must be >= 0");
    if (!(amplitude >= 0.0)) throw ValidationError("amplitude must be >= 0");
    if (out.size() != freq_mhz.size())
        throw ValidationError("output span size does not match sweep length");
    for (std::size_t i = 0; i < freq_mhz.size(); ++i) {
        const double nu = freq_mhz[i];
        double sum = 0.0;
        for (int j = -1; j <= 1; ++j)
            sum += lorentzian(nu, center_mhz + j * hyperfine_mhz, fwhm_mhz).value;
        out[i] = 1.0 - amplitude * sum;
    }
}

void eval_model(const ModelSpec& spec, std::span<const double> params,
                std::span<const double> x, std::span<double> out) {
    check_params(spec, params);
    switch (spec.kind) {
    case ModelKind::odmr_triplet:
        eval_odmr(x, params[0], params[1], params[2], spec.hyperfine_mhz, out);
        return;
    case ModelKind::rabi:
        eval_rabi(x, params[0], params[1], params[2], out);
        return;
    case ModelKind::ramsey:
        eval_ramsey(x, params[0], params[1], params[2], params[3],
                    spec.detuning_mhz, spec.hyperfine_mhz, out);
        return;
    case ModelKind::hahn:
        eval_hahn(x, params[0], params[1], out);
        return;
    case ModelKind::t1:
        eval_t1(x, params[0], params[1],
                spec.stretch_free ? params[2] : spec.stretch_exponent, out);
        return;
    }
}

void eval_model_jacobian(const ModelSpec& spec, std::span<const double> params,
                         std::span<const double> x, std::span<double> values,
                         std::span<double> jac) {
    check_params(spec, params);
    const int n = spec.param_count();
    check_sizes(x, values, n, params);
    if (jac.size() != x.size() * static_cast<std::size_t>(n))
        throw ValidationError("jacobian span has wrong size");

    switch (spec.kind) {
    case ModelKind::odmr_triplet: {
        const double amp = params[0], center = params[1], fwhm = params[2];
        const double d = spec.hyperfine_mhz;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double sum = 0.0, d_center = 0.0, d_fwhm = 0.0;
            for (int j = -1; j <= 1; ++j) {
                const auto l = lorentzian(x[i], center + j * d, fwhm);
                sum += l.value;
                d_center += l.d_center;
                d_fwhm += l.d_fwhm;
            }
            values[i] = 1.0 - amp * sum;
            jac[i * 3 + 0] = -sum;
            jac[i * 3 + 1] = -amp * d_center;
            jac[i * 3 + 2] = -amp * d_fwhm;
        }
        return;
    }
    case ModelKind::rabi: {
        const double amp = params[0], freq = params[1], kappa = params[2];
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double tau = x[i];
            const double phase = kTwoPi * freq * tau;
            const double env = std::exp(-tau * kappa);
            const double c = std::cos(phase);
            const double s = std::sin(phase);
            values[i] = 1.0 - 0.5 * amp * (1.0 - c * env);
            jac[i * 3 + 0] = -0.5 * (1.0 - c * env);
            jac[i * 3 + 1] = -0.5 * amp * kTwoPi * tau * s * env;
            jac[i * 3 + 2] = -0.5 * amp * tau * c * env;
        }
        return;
    }
    case ModelKind::ramsey: {
        const double f[3] = {spec.detuning_mhz - spec.hyperfine_mhz,
                             spec.detuning_mhz,
                             spec.detuning_mhz + spec.hyperfine_mhz};
        const double kappa = params[3];
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double tau = x[i];
            const double env = std::exp(-tau * kappa);
            double sum = 0.0;
            for (int j = 0; j < 3; ++j) {
                const double term = 1.0 - std::sin(kTwoPi * f[j] * tau);
                jac[i * 4 + static_cast<std::size_t>(j)] = term * env;
                sum += params[static_cast<std::size_t>(j)] * term;
            }
            values[i] = sum * env;
            jac[i * 4 + 3] = -tau * sum * env;
        }
        return;
    }
    case ModelKind::hahn: {
        const double amp = params[0], kappa = params[1];
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double env = std::exp(-x[i] * kappa);
            values[i] = amp * env;
            jac[i * 2 + 0] = env;
            jac[i * 2 + 1] = -amp * x[i] * env;
        }
        return;
    }
    case ModelKind::t1: {
        const double amp = params[0], kappa = params[1];
        const double eps = spec.stretch_free ? params[2] : spec.stretch_exponent;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double tk = x[i] * kappa;
            const double theta = tk > 0.0 ? std::pow(tk, eps) : 0.0;
            const double e = std::exp(-theta);
            values[i] = 1.0 - amp * e;
            jac[i * static_cast<std::size_t>(n) + 0] = -e;
            // d theta / d kappa = eps theta / kappa; zero at tau = 0
            jac[i * static_cast<std::size_t>(n) + 1] =
                tk > 0.0 ? amp * e * eps * theta / kappa : 0.0;
            if (spec.stretch_free)
                jac[i * static_cast<std::size_t>(n) + 2] =
                    tk > 0.0 ? amp * e * theta * std::log(tk) : 0.0;
        }
        return;
    }
    }
}

} // namespace qdm::models
