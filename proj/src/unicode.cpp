// unicode.cpp
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

#include "unicode.hpp"

#include <locale.h>
#include <wctype.h>

#include <cctype>

namespace corpus_affinity::unicode {
namespace {

// C.UTF-8 gives glibc's Unicode character classes and simple case mapping.
// Without it we fall back to ASCII-only rules.
locale_t utf8_locale() {
  static locale_t loc = [] {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      locale_t l = newlocale(LC_CTYPE_MASK, name, static_cast<locale_t>(0));
      if (l != static_cast<locale_t>(0)) return l;
    }
    return static_cast<locale_t>(0);
  }();
  return loc;
}

}  // namespace

CodePoint decode_utf8(std::string_view s, std::size_t i) {
  auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) return {b0, 1, true};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1, false};
  }
  if (i + len > s.size()) return {0xFFFD, 1, false};
  for (std::size_t k = 1; k < len; ++k) {
    unsigned char b = byte(i + k);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len, true};
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(const CodePoint& c) {
  if (!c.valid) return false;
  switch (c.value) {
    case 0x00A0:
    case 0x2007:
    case 0x202F:
    case 0xFEFF:
      return true;
  }
  if (c.value < 0x80) return std::isspace(static_cast<int>(c.value)) != 0;
  locale_t loc = utf8_locale();
  return loc && iswspace_l(static_cast<wint_t>(c.value), loc);
}

bool is_punct(const CodePoint& c) {
  if (!c.valid) return false;
  if (c.value < 0x80) return std::ispunct(static_cast<int>(c.value)) != 0;
  locale_t loc = utf8_locale();
  return loc && iswpunct_l(static_cast<wint_t>(c.value), loc);
}

bool is_alpha(const CodePoint& c) {
  if (!c.valid) return false;
  if (c.value < 0x80) return std::isalpha(static_cast<int>(c.value)) != 0;
  locale_t loc = utf8_locale();
  return loc && iswalpha_l(static_cast<wint_t>(c.value), loc);
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
  locale_t loc = utf8_locale();
  if (!loc) return cp;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc));
}

}  // namespace corpus_affinity::unicode
