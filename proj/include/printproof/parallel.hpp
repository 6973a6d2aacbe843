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

#ifndef PRINTPROOF_PARALLEL_HPP
#define PRINTPROOF_PARALLEL_HPP

#include <functional>

namespace printproof {

/// Worker count: PRINTPROOF_THREADS if set and positive, otherwise the
/// hardware concurrency (0 or unset means auto).
[[nodiscard]] unsigned worker_count();

/// Runs fn(row) for every row in [0, rows). Rows are split into contiguous
/// bands, one per worker; fn must only write state owned by its row.
void for_each_row(int rows, const std::function<void(int)>& fn);

}  // namespace printproof

#endif  // PRINTPROOF_PARALLEL_HPP
