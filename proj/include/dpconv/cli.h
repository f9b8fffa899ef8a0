// Copyright 2026 The dpconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line frontend. Subcommands emit deterministic CSV or JSON:
//
//   convert rdp-to-dp | dp-to-rdp   single conversion record
//   compose gaussian                 epsilon sweep over rounds
//   calibrate                        noise calibration record
//   region                           sampled privacy-region boundaries
//   compare areas | gdp              region-area and f-DP comparisons

#ifndef DPCONV_CLI_H_
#define DPCONV_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace dpconv {

inline constexpr char kVersion[] = "0.1.0";

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumericFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPrecondition = 3;

// Runs the CLI on `args` (without the program name). Results go to `out`
// unless --output names a file; diagnostics and, for JSON output to `out`,
// the metadata sidecar go to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace dpconv

#endif  // DPCONV_CLI_H_
