// Copyright 2026 The printproof Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "printproof/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

namespace printproof {

unsigned worker_count() {
    if (const char* env = std::getenv("PRINTPROOF_THREADS")) {
        unsigned n = 0;
        const auto* end = env + std::strlen(env);
        if (std::from_chars(env, end, n).ec == std::errc{} && n > 0) {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void for_each_row(int rows, const std::function<void(int)>& fn) {
    if (rows <= 0) return;
    const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(rows));
    if (workers <= 1) {
        for (int y = 0; y < rows; ++y) fn(y);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const int band = (rows + static_cast<int>(workers) - 1) / static_cast<int>(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const int begin = static_cast<int>(w) * band;
            const int end = std::min(rows, begin + band);
            pool.emplace_back([&, w, begin, end] {
                try {
                    for (int y = begin; y < end; ++y) fn(y);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace printproof
