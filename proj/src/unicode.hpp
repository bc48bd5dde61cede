// unicode.hpp
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
// Internal UTF-8 decoding and Unicode character classes. Classes and case
// mapping come from glibc's C.UTF-8 locale; without it only ASCII is
// classified.

#ifndef CORPUS_AFFINITY_SRC_UNICODE_HPP_
#define CORPUS_AFFINITY_SRC_UNICODE_HPP_

#include <cstddef>
#include <string>
#include <string_view>

namespace corpus_affinity::unicode {

struct CodePoint {
  char32_t value;
  std::size_t length;
  bool valid;  // false: malformed byte, value is U+FFFD and length 1
};

CodePoint decode_utf8(std::string_view s, std::size_t i);
void append_utf8(std::string& out, char32_t cp);

bool is_space(const CodePoint& c);
bool is_punct(const CodePoint& c);
bool is_alpha(const CodePoint& c);
char32_t to_lower(char32_t cp);

}  // namespace corpus_affinity::unicode

#endif  // CORPUS_AFFINITY_SRC_UNICODE_HPP_
