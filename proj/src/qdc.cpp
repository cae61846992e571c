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
#include "qdm/qdc.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "qdm/crc64.hpp"
#include "qdm/errors.hpp"

namespace qdm::cube {
namespace {

static_assert(std::endian::native == std::endian::little,
              "QDC I/O assumes a little-endian host");

constexpr char kMagic[4] = {'Q', 'D', 'C', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kSweepKindNone = 255;
constexpr std::uint32_t kCanonicalNanBits = 0x7FC00000u;

struct Header {
    std::uint32_t version = kVersion;
    std::uint8_t kind = 0;
    std::uint8_t qcode = 0;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t points = 0;
    std::uint32_t channels = 0;
    std::vector<double> sweep_values;
    std::uint8_t sweep_kind = kSweepKindNone;
};

class Writer {
public:
    explicit Writer(std::ofstream& out) : out_(out) {}

    void bytes(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
    template <typename T> void pod(T v) { bytes(&v, sizeof(T)); }

    void payload_f32(double v) {
        const float f = static_cast<float>(v);
        crc_.update(&f, sizeof(f));
        bytes(&f, sizeof(f));
    }
    void payload_nan() {
        crc_.update(&kCanonicalNanBits, sizeof(kCanonicalNanBits));
        bytes(&kCanonicalNanBits, sizeof(kCanonicalNanBits));
    }
    std::uint64_t crc() const { return crc_.value(); }

private:
    std::ofstream& out_;
    Crc64Xz crc_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_)
            throw FormatError(FormatError::Code::io,
                              "cannot open " + path.string());
    }

    void bytes(void* p, std::size_t n, const char* what) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw FormatError(FormatError::Code::truncated,
                              std::string("file truncated while reading ") + what);
    }
    template <typename T> T pod(const char* what) {
        T v{};
        bytes(&v, sizeof(T), what);
        return v;
    }
    bool at_eof() {
        return in_.peek() == std::char_traits<char>::eof();
    }

private:
    std::ifstream in_;
};

void write_header(Writer& w, QdcKind kind, std::uint8_t qcode, std::uint32_t width,
                  std::uint32_t height, std::uint32_t points, std::uint32_t channels,
                  const double* sweep_values, std::uint8_t sweep_kind) {
    w.bytes(kMagic, 4);
    w.pod(kVersion);
    w.pod(static_cast<std::uint8_t>(kind));
    w.pod(qcode);
    w.pod(static_cast<std::uint16_t>(0));
    w.pod(width);
    w.pod(height);
    w.pod(points);
    w.pod(channels);
    for (std::uint32_t i = 0; i < points; ++i) w.pod(sweep_values[i]);
    w.pod(sweep_kind);
    const char pad[7] = {};
    w.bytes(pad, 7);
}

Header read_header(Reader& r, QdcKind* kind_out) {
    char magic[4];
    r.bytes(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError(FormatError::Code::bad_magic, "not a QDC file (bad magic)");
    Header h;
    h.version = r.pod<std::uint32_t>("version");
    if (h.version != kVersion)
        throw FormatError(FormatError::Code::version_mismatch,
                          "unsupported QDC version " + std::to_string(h.version));
    h.kind = r.pod<std::uint8_t>("object kind");
    if (h.kind > 2)
        throw FormatError(FormatError::Code::bad_header,
                          "unknown object kind " + std::to_string(h.kind));
    h.qcode = r.pod<std::uint8_t>("quantity code");
    const auto reserved = r.pod<std::uint16_t>("reserved");
    if (reserved != 0)
        throw FormatError(FormatError::Code::bad_header, "reserved field not zero");
    h.width = r.pod<std::uint32_t>("width");
    h.height = r.pod<std::uint32_t>("height");
    h.points = r.pod<std::uint32_t>("points");
    h.channels = r.pod<std::uint32_t>("channels");
    if (h.width == 0 || h.height == 0 || h.points == 0)
        throw FormatError(FormatError::Code::bad_header, "zero dimension in header");
    if (h.points > (1u << 24) || h.width > (1u << 20) || h.height > (1u << 20))
        throw FormatError(FormatError::Code::bad_header, "implausible dimension");
    h.sweep_values.resize(h.points);
    for (std::uint32_t i = 0; i < h.points; ++i)
        h.sweep_values[i] = r.pod<double>("sweep values");
    h.sweep_kind = r.pod<std::uint8_t>("sweep kind");
    char pad[7];
    r.bytes(pad, 7, "pad");
    *kind_out = static_cast<QdcKind>(h.kind);
    return h;
}

SweepAxis sweep_from_header(const Header& h) {
    if (h.sweep_kind > 3)
        throw FormatError(FormatError::Code::bad_header,
                          "unknown sweep kind " + std::to_string(h.sweep_kind));
    for (std::size_t i = 1; i < h.sweep_values.size(); ++i)
        if (!(h.sweep_values[i] > h.sweep_values[i - 1]))
            throw FormatError(FormatError::Code::non_monotonic_sweep,
                              "sweep values are not strictly increasing");
    if (h.sweep_values.size() < 4)
        throw FormatError(FormatError::Code::bad_header, "sweep shorter than 4 points");
    return SweepAxis(static_cast<SweepKind>(h.sweep_kind), h.sweep_values);
}

// Reads the f32 payload plus trailing CRC; NaN entries are surfaced as NaN
// doubles for the caller to fold into masks.
std::vector<double> read_payload(Reader& r, std::size_t count) {
    std::vector<float> raw(count);
    r.bytes(raw.data(), count * sizeof(float), "payload");
    const std::uint64_t stored_crc = r.pod<std::uint64_t>("payload CRC");
    const std::uint64_t actual = crc64_xz(raw.data(), count * sizeof(float));
    if (stored_crc != actual)
        throw FormatError(FormatError::Code::crc_mismatch,
                          "payload CRC mismatch (file corrupt)");
    if (!r.at_eof())
        throw FormatError(FormatError::Code::bad_header,
                          "trailing bytes after payload CRC");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = static_cast<double>(raw[i]);
    return out;
}

template <typename SaveBody>
void atomic_save(const std::filesystem::path& path, SaveBody&& body) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw FormatError(FormatError::Code::io, "cannot create " + tmp.string());
        Writer w(out);
        body(w);
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw FormatError(FormatError::Code::io, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw FormatError(FormatError::Code::io, "cannot rename into " + path.string());
    }
}

} // namespace

void save_qdc(const std::filesystem::path& path, const RawStack& stack) {
    atomic_save(path, [&](Writer& w) {
        write_header(w, QdcKind::raw_stack, static_cast<std::uint8_t>(stack.channels()),
                     static_cast<std::uint32_t>(stack.width()),
                     static_cast<std::uint32_t>(stack.height()),
                     static_cast<std::uint32_t>(stack.sweep().points()), 2,
                     stack.sweep().values.data(),
                     static_cast<std::uint8_t>(stack.sweep().kind));
        for (double v : stack.data()) w.payload_f32(v);
        w.pod(w.crc());
    });
}

void save_qdc(const std::filesystem::path& path, const DataCube& cube) {
    atomic_save(path, [&](Writer& w) {
        write_header(w, QdcKind::data_cube, static_cast<std::uint8_t>(cube.quantity()),
                     static_cast<std::uint32_t>(cube.width()),
                     static_cast<std::uint32_t>(cube.height()),
                     static_cast<std::uint32_t>(cube.sweep().points()), 1,
                     cube.sweep().values.data(),
                     static_cast<std::uint8_t>(cube.sweep().kind));
        const int points = cube.sweep().points();
        for (int p = 0; p < points; ++p)
            for (int y = 0; y < cube.height(); ++y)
                for (int x = 0; x < cube.width(); ++x) {
                    if (cube.pixel_valid(x, y))
                        w.payload_f32(cube.at(p, y, x));
                    else
                        w.payload_nan();
                }
        w.pod(w.crc());
    });
}

void save_qdc(const std::filesystem::path& path, const MapImage& map) {
    map.validate();
    atomic_save(path, [&](Writer& w) {
        const double sweep_value = 0.0;
        write_header(w, QdcKind::map_image, static_cast<std::uint8_t>(map.quantity),
                     static_cast<std::uint32_t>(map.width),
                     static_cast<std::uint32_t>(map.height), 1, 1, &sweep_value,
                     kSweepKindNone);
        for (int y = 0; y < map.height; ++y)
            for (int x = 0; x < map.width; ++x) {
                if (map.pixel_valid(x, y) && !std::isnan(map.at(y, x)))
                    w.payload_f32(map.at(y, x));
                else
                    w.payload_nan();
            }
        w.pod(w.crc());
    });
}

QdcObject load_qdc(const std::filesystem::path& path) {
    Reader r(path);
    QdcKind kind;
    const Header h = read_header(r, &kind);
    const std::size_t pixels = static_cast<std::size_t>(h.width) *
                               static_cast<std::size_t>(h.height);

    switch (kind) {
    case QdcKind::raw_stack: {
        if (h.channels != 2)
            throw FormatError(FormatError::Code::bad_header,
                              "raw stack must have 2 channels");
        if (h.qcode > 1)
            throw FormatError(FormatError::Code::bad_header, "unknown channel code");
        SweepAxis sweep = sweep_from_header(h);
        auto payload = read_payload(r, static_cast<std::size_t>(h.points) * 2 * pixels);
        return RawStack(static_cast<int>(h.width), static_cast<int>(h.height),
                        std::move(sweep), static_cast<ChannelPair>(h.qcode),
                        std::move(payload));
    }
    case QdcKind::data_cube: {
        if (h.channels != 1)
            throw FormatError(FormatError::Code::bad_header,
                              "data cube must have 1 channel");
        if (h.qcode > 2)
            throw FormatError(FormatError::Code::bad_header, "unknown quantity code");
        SweepAxis sweep = sweep_from_header(h);
        auto payload = read_payload(r, static_cast<std::size_t>(h.points) * pixels);
        std::vector<std::uint8_t> invalid;
        for (std::size_t i = 0; i < payload.size(); ++i) {
            if (std::isnan(payload[i])) {
                if (invalid.empty()) invalid.assign(pixels, 0);
                invalid[i % pixels] = 1;
            }
        }
        if (!invalid.empty())
            for (std::size_t i = 0; i < payload.size(); ++i)
                if (invalid[i % pixels]) payload[i] = 0.0;
        return DataCube(static_cast<int>(h.width), static_cast<int>(h.height),
                        std::move(sweep), static_cast<Quantity>(h.qcode),
                        std::move(payload), std::move(invalid));
    }
    case QdcKind::map_image: {
        if (h.points != 1 || h.channels != 1)
            throw FormatError(FormatError::Code::bad_header,
                              "map image must have points = channels = 1");
        if (h.qcode > static_cast<std::uint8_t>(MapQuantity::time_ms))
            throw FormatError(FormatError::Code::bad_header, "unknown map quantity");
        auto payload = read_payload(r, pixels);
        std::vector<std::uint8_t> invalid;
        for (std::size_t i = 0; i < pixels; ++i) {
            if (std::isnan(payload[i])) {
                if (invalid.empty()) invalid.assign(pixels, 0);
                invalid[i] = 1;
                payload[i] = std::numeric_limits<double>::quiet_NaN();
            }
        }
        return MapImage(static_cast<int>(h.width), static_cast<int>(h.height),
                        static_cast<MapQuantity>(h.qcode), std::move(payload),
                        std::move(invalid));
    }
    }
    throw FormatError(FormatError::Code::bad_header, "unreachable object kind");
}

RawStack load_raw_stack(const std::filesystem::path& path) {
    auto obj = load_qdc(path);
    if (auto* p = std::get_if<RawStack>(&obj)) return std::move(*p);
    throw ValidationError(path.string() + " does not hold a raw stack");
}

DataCube load_data_cube(const std::filesystem::path& path) {
    auto obj = load_qdc(path);
    if (auto* p = std::get_if<DataCube>(&obj)) return std::move(*p);
    throw ValidationError(path.string() + " does not hold a data cube");
}

MapImage load_map_image(const std::filesystem::path& path) {
    auto obj = load_qdc(path);
    if (auto* p = std::get_if<MapImage>(&obj)) return std::move(*p);
    throw ValidationError(path.string() + " does not hold a map image");
}

} // namespace qdm::cube
