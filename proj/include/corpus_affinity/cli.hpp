// cli.hpp
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
//
// Copyright 2026 The corpus-affinity Authors.
//
// The corpus-affinity command line: argument parsing, dispatch, and run
// manifests.

#ifndef CORPUS_AFFINITY_CLI_HPP_
#define CORPUS_AFFINITY_CLI_HPP_

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpus_affinity/errors.hpp"

namespace corpus_affinity::cli {

class UsageError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::string_view kSubcommands[] = {
    "normalize", "count", "lm-build", "lm-ppl",
    "sim",       "profile", "rank",   "correlate"};

std::string_view tool_version();

struct Command {
  std::string subcommand;
  // Every flag the subcommand knows about that was given or has a default;
  // repeatable flags may hold several values.
  std::map<std::string, std::vector<std::string>> flags;
  std::vector<std::string> positionals;
  // Set instead of a subcommand when --help was requested.
  std::string help_text;

  bool has(std::string_view name) const;
  const std::string& flag(std::string_view name) const;
  const std::vector<std::string>& values(std::string_view name) const;
};

// `args` excludes the program name. Throws UsageError naming the offending
// subcommand or flag.
Command parse_args(std::span<const std::string> args);

// Runs a parsed command; returns the process exit code.
int execute(const Command& cmd, std::ostream& out, std::ostream& err);

// parse_args + execute with usage errors mapped to exit code 2.
int run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err);

}  // namespace corpus_affinity::cli

#endif  // CORPUS_AFFINITY_CLI_HPP_
