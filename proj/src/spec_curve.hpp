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

#include "qdm/lm.hpp"
#include "qdm/models.hpp"

namespace qdm::fit {

// Binds a ModelSpec to a fixed abscissa for the solver. The solver only
// proposes parameters inside admissible bounds, so dispatch skips the
// user-facing validation.
class SpecCurve final : public CurveModel {
public:
    SpecCurve(const models::ModelSpec& spec, std::span<const double> x)
        : spec_(&spec), x_(x) {}

    int param_count() const override { return spec_->param_count(); }
    std::size_t point_count() const override { return x_.size(); }

    void eval(std::span<const double> params, std::span<double> values) const override {
        using models::ModelKind;
        switch (spec_->kind) {
        case ModelKind::odmr_triplet:
            models::eval_odmr(x_, params[0], params[1], params[2],
                              spec_->hyperfine_mhz, values);
            return;
        case ModelKind::rabi:
            models::eval_rabi(x_, params[0], params[1], params[2], values);
            return;
        case ModelKind::ramsey:
            models::eval_ramsey(x_, params[0], params[1], params[2], params[3],
                                spec_->detuning_mhz, spec_->hyperfine_mhz, values);
            return;
        case ModelKind::hahn:
            models::eval_hahn(x_, params[0], params[1], values);
            return;
        case ModelKind::t1:
            models::eval_t1(x_, params[0], params[1],
                            spec_->stretch_free ? params[2] : spec_->stretch_exponent,
                            values);
            return;
        }
    }

    void eval_jacobian(std::span<const double> params, std::span<double> values,
                       std::span<double> jac) const override {
        models::eval_model_jacobian(*spec_, params, x_, values, jac);
    }

private:
    const models::ModelSpec* spec_;
    std::span<const double> x_;
};

} // namespace qdm::fit
