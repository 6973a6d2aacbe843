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

#ifndef PRINTPROOF_CLI_HPP
#define PRINTPROOF_CLI_HPP

#include <iosfwd>

namespace printproof::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitFlag = 2;

/// Runs one invocation. Data goes to `out`, diagnostics to `err` as
/// "error[CODE]: message".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace printproof::cli

#endif  // PRINTPROOF_CLI_HPP
