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

#include <filesystem>
#include <variant>

#include "qdm/datacube.hpp"

namespace qdm::cube {

// QDC container, little-endian:
//
//   offset  size        field
//   0       4           magic "QDC1"
//   4       u32         version = 1
//   8       u8          object kind: 0 = RawStack, 1 = DataCube, 2 = MapImage
//   9       u8          quantity/channels code (ChannelPair, Quantity or
//                       MapQuantity depending on kind)
//   10      u16         reserved = 0
//   12      u32 x 4     width, height, points, channels
//   28      f64 x pts   sweep values (MapImage: points = 1, value = 0)
//   ...     u8          sweep kind (SweepKind code; 255 = none for maps)
//   ...     u8 x 7      pad = 0
//   ...     f32 x n     payload: RawStack [point][channel][y][x],
//                       DataCube [point][y][x], MapImage [y][x]
//   ...     u64         CRC-64/XZ over the payload bytes
//
// Invalid pixels are stored as the canonical quiet NaN (0x7FC00000) at every
// point of the pixel and restored into the explicit mask on load. Payloads
// are f32; in-memory doubles are rounded to f32 on save.

enum class QdcKind : std::uint8_t {
    raw_stack = 0,
    data_cube = 1,
    map_image = 2,
};

using QdcObject = std::variant<RawStack, DataCube, MapImage>;

QdcObject load_qdc(const std::filesystem::path& path);

// Typed loads; a kind mismatch is a ValidationError.
RawStack load_raw_stack(const std::filesystem::path& path);
DataCube load_data_cube(const std::filesystem::path& path);
MapImage load_map_image(const std::filesystem::path& path);

// Saves write to a temporary file in the target directory and rename into
// place, so failures never leave a partial output behind.
void save_qdc(const std::filesystem::path& path, const RawStack& stack);
void save_qdc(const std::filesystem::path& path, const DataCube& cube);
void save_qdc(const std::filesystem::path& path, const MapImage& map);

} // namespace qdm::cube
