// Copyright 2026 The qshield Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// Command-line front end; `run_cli` is separate from main() so tests can
// drive it in-process.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qshield::cli {

/// Exit codes returned by run_cli.
enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kBadArguments = 2,
    kDataError = 3,
    kNumericFailure = 4,
};

/// `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace qshield::cli
