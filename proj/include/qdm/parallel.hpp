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
#include <functional>

namespace qdm {

int default_worker_count();

// Runs body(begin, end) over fixed-size chunks of [0, count). Chunks are a
// pure function of (count, grain), never of the worker count, so any writer
// that touches only its own indices produces bit-identical output for any
// number of workers. The first exception thrown by a body is rethrown on the
// calling thread after all workers join.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain = 4096);

} // namespace qdm
