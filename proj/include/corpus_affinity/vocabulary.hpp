// vocabulary.hpp
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
// Word <-> integer id mapping shared by corpora, n-gram tables and models.
// Ids 0..2 are always the sentence markers and <unk>.

#ifndef CORPUS_AFFINITY_VOCABULARY_HPP_
#define CORPUS_AFFINITY_VOCABULARY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace corpus_affinity {

using WordId = std::uint32_t;

inline constexpr WordId kBosId = 0;
inline constexpr WordId kEosId = 1;
inline constexpr WordId kUnkId = 2;
inline constexpr WordId kNoWord = 0xFFFFFFFFu;

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";

class Vocabulary {
 public:
  Vocabulary();

  WordId intern(std::string_view word);
  std::optional<WordId> find(std::string_view word) const;
  const std::string& word(WordId id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId, Hash, std::equal_to<>> index_;
};

}  // namespace corpus_affinity

#endif  // CORPUS_AFFINITY_VOCABULARY_HPP_
