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
#include "qdm/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qdm {

int default_worker_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain) {
    if (count == 0) return;
    if (grain == 0) grain = 1;
    if (workers <= 0) workers = default_worker_count();

    const std::size_t chunks = (count + grain - 1) / grain;
    if (workers == 1 || chunks == 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t begin = c * grain;
            body(begin, std::min(begin + grain, count));
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunks) return;
            const std::size_t begin = c * grain;
            try {
                body(begin, std::min(begin + grain, count));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_threads = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(workers), chunks));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads) - 1);
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();

    if (first_error) std::rethrow_exception(first_error);
}

} // namespace qdm
