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

#include <cstddef>
#include <cstdint>

namespace qdm {

// CRC-64/XZ (reflected poly 0x42F0E1EBA9EA3693, init/xorout all-ones).
// Check value: crc64_xz("123456789") == 0x995DC9BBDF1939FA.
class Crc64Xz {
public:
    void update(const void* data, std::size_t size);
    std::uint64_t value() const noexcept { return state_ ^ ~0ull; }

private:
    std::uint64_t state_ = ~0ull;
};

std::uint64_t crc64_xz(const void* data, std::size_t size);

} // namespace qdm
