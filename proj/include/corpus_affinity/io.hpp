// io.hpp
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
// Small file helpers: atomic writes, content digests, number formatting.

#ifndef CORPUS_AFFINITY_IO_HPP_
#define CORPUS_AFFINITY_IO_HPP_

#include <filesystem>
#include <string>
#include <optional>
#include <string_view>
#include <vector>

namespace corpus_affinity {

// Writes to a temporary file in the destination directory and renames it
// into place, so readers never observe a partial artifact.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

// Finite decimal, whole field consumed.
std::optional<double> parse_double(std::string_view text);

// Comma-separated fields of one line; no quoting.
std::vector<std::string_view> split_csv_line(std::string_view line);

// Lines of a CSV document with the BOM and carriage returns removed.
std::vector<std::string_view> csv_lines(std::string_view text);

}  // namespace corpus_affinity

#endif  // CORPUS_AFFINITY_IO_HPP_
