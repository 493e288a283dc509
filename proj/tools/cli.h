// Copyright 2026 The c2v Authors.
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

#ifndef C2V_TOOLS_CLI_H_
#define C2V_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace c2v::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitDataFormat = 4;

// Rewrites single-dash multi-letter flags ("-ws", "-minCount") to their
// double-dash spelling. Negative numbers and single-letter flags are kept.
std::vector<std::string> normalize_flags(std::vector<std::string> args);

// Runs one command line (without the program name). Reports go to `out`,
// logs and diagnostics to `err`. Returns the process exit code.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace c2v::cli

#endif  // C2V_TOOLS_CLI_H_
