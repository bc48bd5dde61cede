// vocabulary.cpp
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

#include "corpus_affinity/vocabulary.hpp"

namespace corpus_affinity {

Vocabulary::Vocabulary() {
  intern(kBos);
  intern(kEos);
  intern(kUnk);
}

WordId Vocabulary::intern(std::string_view word) {
  auto it = index_.find(word);
  if (it != index_.end()) return it->second;
  auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace corpus_affinity
