// include/easr/cli.h

// Copyright 2026 The easraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef EASR_CLI_H_
#define EASR_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace easr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;     // data or validation failure
inline constexpr int kExitBackend = 2;  // backend, config or usage error
// sigtest --exit-code: the difference was not significant.
inline constexpr int kExitNotSignificant = 3;

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace easr

#endif  // EASR_CLI_H_
