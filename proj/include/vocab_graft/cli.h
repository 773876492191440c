// Copyright 2026 The vocab-graft Authors
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

#ifndef VOCAB_GRAFT_CLI_H_
#define VOCAB_GRAFT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace vocab_graft {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs the `vocab-graft` command line. `args` excludes the program name.
// Results go to `out` as JSON; failures go to `err` as one JSON line.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_CLI_H_
