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
#include "qdm/datacube.hpp"

#include <cmath>
#include <sstream>

#include "qdm/errors.hpp"

namespace qdm::cube {
namespace {

void check_dims(int width, int height) {
    if (width <= 0 || height <= 0)
        throw ValidationError("image dimensions must be positive");
}

std::string at_index(int point, int y, int x) {
    std::ostringstream os;
    os << "(point=" << point << ", y=" << y << ", x=" << x << ")";
    return os.str();
}

} // namespace

const char* to_string(SweepKind kind) {
    switch (kind) {
    case SweepKind::frequency_mhz: return "frequency_MHz";
    case SweepKind::time_us: return "time_us";
    case SweepKind::angle_deg: return "angle_deg";
    case SweepKind::time_ms: return "time_ms";
    }
    return "unknown";
}

const char* to_string(Quantity q) {
    switch (q) {
    case Quantity::contrast: return "contrast";
    case Quantity::visibility: return "visibility";
    case Quantity::intensity: return "intensity";
    }
    return "unknown";
}

const char* to_string(ChannelPair c) {
    switch (c) {
    case ChannelPair::signal_reference: return "signal_reference";
    case ChannelPair::plus_minus: return "plus_minus";
    }
    return "unknown";
}

SweepAxis::SweepAxis(SweepKind k, std::vector<double> v)
    : kind(k), values(std::move(v)) {
    validate();
}

SweepAxis SweepAxis::linspace(SweepKind kind, double first, double last, int n) {
    if (n < 4)
        throw ValidationError("sweep axis needs at least 4 points");
    std::vector<double> v(static_cast<std::size_t>(n));
    const double step = (last - first) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = first + step * static_cast<double>(i);
    v.back() = last;
    return SweepAxis(kind, std::move(v));
}

double SweepAxis::min_step() const {
    double step = values[1] - values[0];
    for (std::size_t i = 2; i < values.size(); ++i)
        step = std::min(step, values[i] - values[i - 1]);
    return step;
}

void SweepAxis::validate() const {
    if (values.size() < 4)
        throw ValidationError("sweep axis needs at least 4 points");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw ValidationError("sweep axis contains a non-finite value");
        if (i > 0 && !(values[i] > values[i - 1]))
            throw ValidationError("sweep axis must be strictly increasing");
    }
}

RawStack::RawStack(int width, int height, SweepAxis sweep, ChannelPair channels,
                   std::vector<double> data)
    : width_(width), height_(height), sweep_(std::move(sweep)),
      channels_(channels), data_(std::move(data)) {
    check_dims(width_, height_);
    sweep_.validate();
    const std::size_t expected = static_cast<std::size_t>(sweep_.points()) * 2 *
                                 static_cast<std::size_t>(height_) *
                                 static_cast<std::size_t>(width_);
    if (data_.size() != expected)
        throw ValidationError("raw stack payload size does not match dimensions");
    for (std::size_t i = 0; i < data_.size(); ++i)
        if (!(data_[i] >= 0.0))
            throw ValidationError("raw stack intensities must be >= 0 and finite");
}

std::size_t RawStack::index(int point, int channel, int y, int x) const {
    if (point < 0 || point >= sweep_.points() || channel < 0 || channel > 1 ||
        y < 0 || y >= height_ || x < 0 || x >= width_)
        throw ValidationError("raw stack index out of range at " +
                              at_index(point, y, x));
    return ((static_cast<std::size_t>(point) * 2 + static_cast<std::size_t>(channel)) *
                static_cast<std::size_t>(height_) +
            static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
}

DataCube::DataCube(int width, int height, SweepAxis sweep, Quantity quantity,
                   std::vector<double> data, std::vector<std::uint8_t> invalid)
    : width_(width), height_(height), sweep_(std::move(sweep)),
      quantity_(quantity), data_(std::move(data)), invalid_(std::move(invalid)) {
    check_dims(width_, height_);
    sweep_.validate();
    const std::size_t expected = static_cast<std::size_t>(sweep_.points()) *
                                 pixel_count();
    if (data_.size() != expected)
        throw ValidationError("data cube payload size does not match dimensions");
    if (!invalid_.empty() && invalid_.size() != pixel_count())
        throw ValidationError("invalid-pixel mask size does not match dimensions");
    for (int p = 0; p < sweep_.points(); ++p)
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x < width_; ++x)
                if (pixel_valid(x, y) && !std::isfinite(at(p, y, x)))
                    throw ValidationError("data cube has a non-finite value at " +
                                          at_index(p, y, x) +
                                          " outside the invalid-pixel mask");
}

std::size_t DataCube::index(int point, int y, int x) const {
    if (point < 0 || point >= sweep_.points() || y < 0 || y >= height_ || x < 0 ||
        x >= width_)
        throw ValidationError("data cube index out of range at " +
                              at_index(point, y, x));
    return (static_cast<std::size_t>(point) * static_cast<std::size_t>(height_) +
            static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
}

bool DataCube::pixel_valid(int x, int y) const {
    if (invalid_.empty()) return true;
    return invalid_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)] == 0;
}

std::size_t DataCube::valid_count() const {
    if (invalid_.empty()) return pixel_count();
    std::size_t n = 0;
    for (auto v : invalid_)
        if (v == 0) ++n;
    return n;
}

DataCube DataCube::crop(int x0, int y0, int w, int h) const {
    if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > width_ || y0 + h > height_)
        throw ValidationError("crop window exceeds cube bounds");
    const int points = sweep_.points();
    std::vector<double> out(static_cast<std::size_t>(points) *
                            static_cast<std::size_t>(w) *
                            static_cast<std::size_t>(h));
    std::size_t k = 0;
    for (int p = 0; p < points; ++p)
        for (int j = 0; j < h; ++j)
            for (int i = 0; i < w; ++i)
                out[k++] = at(p, y0 + j, x0 + i);
    std::vector<std::uint8_t> inv;
    if (!invalid_.empty()) {
        inv.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
        for (int j = 0; j < h; ++j)
            for (int i = 0; i < w; ++i)
                inv[static_cast<std::size_t>(j) * static_cast<std::size_t>(w) +
                    static_cast<std::size_t>(i)] =
                    invalid_[static_cast<std::size_t>(y0 + j) *
                                 static_cast<std::size_t>(width_) +
                             static_cast<std::size_t>(x0 + i)];
    }
    return DataCube(w, h, sweep_, quantity_, std::move(out), std::move(inv));
}

DataCube DataCube::slice_points(int p0, int count) const {
    if (p0 < 0 || count < 4 || p0 + count > sweep_.points())
        throw ValidationError("point slice exceeds sweep range (need >= 4 points)");
    SweepAxis sub(sweep_.kind,
                  std::vector<double>(sweep_.values.begin() + p0,
                                      sweep_.values.begin() + p0 + count));
    const std::size_t frame = pixel_count();
    std::vector<double> out(static_cast<std::size_t>(count) * frame);
    std::copy(data_.begin() + static_cast<std::ptrdiff_t>(frame) * p0,
              data_.begin() + static_cast<std::ptrdiff_t>(frame) * (p0 + count),
              out.begin());
    return DataCube(width_, height_, std::move(sub), quantity_, std::move(out),
                    invalid_);
}

std::vector<double> pixel_series(const DataCube& cube, int x, int y) {
    if (x < 0 || x >= cube.width() || y < 0 || y >= cube.height())
        throw ValidationError("pixel index out of range at " + at_index(0, y, x));
    const int points = cube.sweep().points();
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int p = 0; p < points; ++p)
        out[static_cast<std::size_t>(p)] = cube.at(p, y, x);
    return out;
}

const char* label(MapQuantity q) {
    switch (q) {
    case MapQuantity::generic: return "value";
    case MapQuantity::amplitude: return "amplitude";
    case MapQuantity::frequency_mhz: return "frequency";
    case MapQuantity::linewidth_mhz: return "linewidth";
    case MapQuantity::decay_per_us: return "decay rate";
    case MapQuantity::decay_per_ms: return "decay rate";
    case MapQuantity::stretch_exponent: return "stretch exponent";
    case MapQuantity::chi_squared: return "chi-squared";
    case MapQuantity::iterations: return "iterations";
    case MapQuantity::fit_status: return "fit status";
    case MapQuantity::lineshift_mhz: return "lineshift";
    case MapQuantity::stress_gpa: return "stress";
    case MapQuantity::stress_pa: return "stress magnitude";
    case MapQuantity::angle_deg: return "angle";
    case MapQuantity::sin_retardance: return "sin(retardance)";
    case MapQuantity::intensity: return "intensity";
    case MapQuantity::time_us: return "time";
    case MapQuantity::time_ms: return "time";
    }
    return "value";
}

const char* unit(MapQuantity q) {
    switch (q) {
    case MapQuantity::frequency_mhz:
    case MapQuantity::linewidth_mhz:
    case MapQuantity::lineshift_mhz: return "MHz";
    case MapQuantity::decay_per_us: return "1/us";
    case MapQuantity::decay_per_ms: return "1/ms";
    case MapQuantity::stress_gpa: return "GPa";
    case MapQuantity::stress_pa: return "Pa";
    case MapQuantity::angle_deg: return "deg";
    case MapQuantity::time_us: return "us";
    case MapQuantity::time_ms: return "ms";
    default: return "";
    }
}

MapImage::MapImage(int w, int h, MapQuantity q, std::vector<double> d,
                   std::vector<std::uint8_t> inv)
    : width(w), height(h), quantity(q), data(std::move(d)), invalid(std::move(inv)) {
    validate();
}

void MapImage::validate() const {
    check_dims(width, height);
    const std::size_t n = static_cast<std::size_t>(width) *
                          static_cast<std::size_t>(height);
    if (data.size() != n)
        throw ValidationError("map payload size does not match dimensions");
    if (!invalid.empty() && invalid.size() != n)
        throw ValidationError("map invalid-pixel mask size does not match dimensions");
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (pixel_valid(x, y) && std::isnan(at(y, x)))
                throw ValidationError("map has NaN outside the invalid-pixel mask");
}

std::size_t MapImage::valid_count() const {
    if (invalid.empty()) return data.size();
    std::size_t n = 0;
    for (auto v : invalid)
        if (v == 0) ++n;
    return n;
}

std::vector<double> MapImage::valid_values() const {
    std::vector<double> out;
    out.reserve(data.size());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (pixel_valid(x, y)) out.push_back(at(y, x));
    return out;
}

DataCube contrast_reduce(const RawStack& stack) {
    if (stack.channels() != ChannelPair::signal_reference)
        throw ValidationError("contrast reduction needs a signal/reference stack");
    const int points = stack.sweep().points();
    const int h = stack.height();
    const int w = stack.width();
    std::vector<double> out(static_cast<std::size_t>(points) *
                            static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
    std::size_t k = 0;
    for (int p = 0; p < points; ++p)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double ref = stack.at(p, 1, y, x);
                if (!(ref > 0.0))
                    throw ValidationError("reference intensity <= 0 at " +
                                          at_index(p, y, x));
                out[k++] = stack.at(p, 0, y, x) / ref;
            }
    return DataCube(w, h, stack.sweep(), Quantity::contrast, std::move(out));
}

DataCube visibility_reduce(const RawStack& stack) {
    if (stack.channels() != ChannelPair::plus_minus)
        throw ValidationError("visibility reduction needs a plus/minus stack");
    const int points = stack.sweep().points();
    const int h = stack.height();
    const int w = stack.width();
    std::vector<double> out(static_cast<std::size_t>(points) *
                            static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
    std::size_t k = 0;
    for (int p = 0; p < points; ++p)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double plus = stack.at(p, 0, y, x);
                const double minus = stack.at(p, 1, y, x);
                const double sum = plus + minus;
                if (!(sum > 0.0))
                    throw ValidationError("zero-sum intensity pair at " +
                                          at_index(p, y, x));
                out[k++] = (plus - minus) / sum;
            }
    return DataCube(w, h, stack.sweep(), Quantity::visibility, std::move(out));
}

} // namespace qdm::cube
