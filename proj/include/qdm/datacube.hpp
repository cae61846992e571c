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
#include <span>
#include <string>
#include <vector>

namespace qdm::cube {

// Sweep variable of an acquisition; the unit is part of the kind so that a
// cube can never be fit against a model expecting a different axis.
enum class SweepKind : std::uint8_t {
    frequency_mhz = 0,
    time_us = 1,
    angle_deg = 2,
    time_ms = 3,
};

const char* to_string(SweepKind kind);

struct SweepAxis {
    SweepKind kind = SweepKind::frequency_mhz;
    std::vector<double> values; // strictly increasing, length >= 4

    SweepAxis() = default;
    SweepAxis(SweepKind k, std::vector<double> v);

    static SweepAxis linspace(SweepKind kind, double first, double last, int n);

    int points() const { return static_cast<int>(values.size()); }
    double span() const { return values.back() - values.front(); }
    double min_step() const;
    void validate() const;

    bool operator==(const SweepAxis&) const = default;
};

enum class Quantity : std::uint8_t {
    contrast = 0,
    visibility = 1,
    intensity = 2,
};

enum class ChannelPair : std::uint8_t {
    signal_reference = 0, // MW-on signal frame + MW-off reference frame
    plus_minus = 1,       // opposite phase of the final readout pulse
};

const char* to_string(Quantity q);
const char* to_string(ChannelPair c);

// Two-channel acquisition stack as it comes off the camera, before
// reduction to contrast or visibility. Frame-major storage
// [point][channel][y][x]; payloads are f32 on disk, double in memory.
class RawStack {
public:
    RawStack(int width, int height, SweepAxis sweep, ChannelPair channels,
             std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    const SweepAxis& sweep() const { return sweep_; }
    ChannelPair channels() const { return channels_; }
    const std::vector<double>& data() const { return data_; }

    std::size_t index(int point, int channel, int y, int x) const;
    double at(int point, int channel, int y, int x) const {
        return data_[index(point, channel, y, x)];
    }

private:
    int width_ = 0;
    int height_ = 0;
    SweepAxis sweep_;
    ChannelPair channels_ = ChannelPair::signal_reference;
    std::vector<double> data_;
};

// Reduced acquisition cube, frame-major [point][y][x]. Immutable after
// construction; concurrent readers need no synchronization. Invalid pixels
// are carried in an explicit mask (1 = invalid), never as bare NaN.
class DataCube {
public:
    DataCube(int width, int height, SweepAxis sweep, Quantity quantity,
             std::vector<double> data, std::vector<std::uint8_t> invalid = {});

    int width() const { return width_; }
    int height() const { return height_; }
    const SweepAxis& sweep() const { return sweep_; }
    Quantity quantity() const { return quantity_; }
    const std::vector<double>& data() const { return data_; }
    const std::vector<std::uint8_t>& invalid_mask() const { return invalid_; }

    std::size_t index(int point, int y, int x) const;
    double at(int point, int y, int x) const { return data_[index(point, y, x)]; }

    bool pixel_valid(int x, int y) const;
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    std::size_t valid_count() const;

    DataCube crop(int x0, int y0, int w, int h) const;

    // Sub-range of sweep points [p0, p0 + count); spatial extent unchanged.
    DataCube slice_points(int p0, int count) const;

private:
    int width_ = 0;
    int height_ = 0;
    SweepAxis sweep_;
    Quantity quantity_ = Quantity::contrast;
    std::vector<double> data_;
    std::vector<std::uint8_t> invalid_; // empty, or width*height with 1 = invalid
};

// Per-pixel trace of one cube pixel; pairs with cube.sweep().
std::vector<double> pixel_series(const DataCube& cube, int x, int y);

// Known map payloads; the code is what goes in the file header, the
// label/unit strings are derived for display and CSV output.
enum class MapQuantity : std::uint8_t {
    generic = 0,
    amplitude = 1,
    frequency_mhz = 2,
    linewidth_mhz = 3,
    decay_per_us = 4,
    decay_per_ms = 5,
    stretch_exponent = 6,
    chi_squared = 7,
    iterations = 8,
    fit_status = 9,
    lineshift_mhz = 10,
    stress_gpa = 11,
    stress_pa = 12,
    angle_deg = 13,
    sin_retardance = 14,
    intensity = 15,
    time_us = 16,
    time_ms = 17,
};

const char* label(MapQuantity q);
const char* unit(MapQuantity q);

// Scalar image co-registered with its source cube.
struct MapImage {
    int width = 0;
    int height = 0;
    MapQuantity quantity = MapQuantity::generic;
    std::vector<double> data;            // [y][x]
    std::vector<std::uint8_t> invalid;   // empty, or width*height with 1 = invalid

    MapImage() = default;
    MapImage(int w, int h, MapQuantity q, std::vector<double> d,
             std::vector<std::uint8_t> inv = {});

    std::size_t index(int y, int x) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x);
    }
    double at(int y, int x) const { return data[index(y, x)]; }
    bool pixel_valid(int x, int y) const {
        return invalid.empty() || invalid[index(y, x)] == 0;
    }
    std::size_t valid_count() const;
    std::vector<double> valid_values() const;
    void validate() const;
};

// contrast = I_on / I_off, computed in double. Any reference value <= 0 is
// an error naming the first offending (point, y, x) in storage order.
DataCube contrast_reduce(const RawStack& stack);

// visibility = (I+ - I-) / (I+ + I-), in [-1, 1]. A zero-sum pixel is an
// error naming the first offending (point, y, x).
DataCube visibility_reduce(const RawStack& stack);

} // namespace qdm::cube
