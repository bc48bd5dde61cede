// metrics.hpp
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
// Source/target measures other than perplexity: Jensen-Shannon divergence
// of term distributions, target vocabulary covered (TVC) over content
// words, and type-token ratio (TTR).

#ifndef CORPUS_AFFINITY_METRICS_HPP_
#define CORPUS_AFFINITY_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "corpus_affinity/corpus.hpp"
#include "corpus_affinity/ngram.hpp"

namespace corpus_affinity {

enum class Measure { kPpl, kJsdPooled, kJsd1, kJsd2, kJsd3, kTvc, kTtr };

inline constexpr Measure kAllMeasures[] = {
    Measure::kPpl,  Measure::kJsdPooled, Measure::kJsd1, Measure::kJsd2,
    Measure::kJsd3, Measure::kTvc,       Measure::kTtr};

enum class Direction { kHigherIsMoreSimilar, kLowerIsMoreSimilar, kDiversity };

std::string_view measure_name(Measure m);
std::optional<Measure> parse_measure(std::string_view name);
Direction measure_direction(Measure m);

struct MeasureValue {
  Measure measure;
  double value;

  Direction direction() const { return measure_direction(measure); }
};

// ---------------------------------------------------------------------------
// Jensen-Shannon divergence

namespace detail {

// Contribution of one term present on both sides, with probabilities p and
// q; symmetric in (p, q) bit for bit.
inline double jsd_shared_term(double p, double q) {
  double sum = p + q;
  return p * std::log2(2.0 * p / sum) + q * std::log2(2.0 * q / sum);
}

// Merges two key-sorted (key, weight) ranges. Terms on one side only add
// half their probability, which is accumulated as exact weight sums; this
// makes disjoint supports come out at exactly 1.
template <typename Entry>
double jsd_sorted(std::span<const Entry> a, double a_total,
                  std::span<const Entry> b, double b_total) {
  double shared = 0.0;
  double a_only = 0.0;
  double b_only = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      a_only += a[i++].second;
    } else if (i == a.size() || b[j].first < a[i].first) {
      b_only += b[j++].second;
    } else {
      shared += jsd_shared_term(a[i].second / a_total, b[j].second / b_total);
      ++i;
      ++j;
    }
  }
  double value = 0.5 * shared + 0.5 * (a_only / a_total + b_only / b_total);
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace detail

// Base-2 JSD in [0, 1]. Both distributions must use the same pooling.
double jsd(const Distribution& p, const Distribution& q);

// JSD straight from two boundary-free count tables that share a
// vocabulary, without materializing term strings. With top_k, each side
// keeps only its k most frequent terms (an approximation).
double jsd(const NgramTable& p, const NgramTable& q, Pooling pooling,
           std::optional<std::size_t> top_k = std::nullopt);

// ---------------------------------------------------------------------------
// Content words

enum class CoarseTag { kNoun, kVerb, kAdjective, kOther };

std::string_view coarse_tag_name(CoarseTag tag);
// Accepts coarse names (noun/verb/adjective/other), Penn Treebank tags and
// Universal Dependencies tags.
CoarseTag parse_coarse_tag(std::string_view tag);

inline bool is_content_tag(CoarseTag tag) { return tag != CoarseTag::kOther; }

// Alphabetic: every character is a letter, apart from apostrophes and
// hyphens inside the word.
bool is_alphabetic(std::string_view token);

class ContentWordLexicon {
 public:
  explicit ContentWordLexicon(std::string source_name = "custom");

  // Most-frequent-tag English lexicon shipped with the tool.
  static ContentWordLexicon bundled();
  // "word<TAB>tag" lines.
  static ContentWordLexicon load(const std::filesystem::path& path);
  static ContentWordLexicon parse(std::string_view tsv,
                                  std::string source_name);

  void add(std::string_view word, CoarseTag tag);
  std::optional<CoarseTag> lookup(std::string_view word) const;

  // Lexicon tag if known; otherwise alphabetic tokens count as content.
  bool is_content_word(std::string_view token) const;

  const std::string& source_name() const { return source_name_; }
  std::size_t size() const { return tags_.size(); }

 private:
  std::string source_name_;
  std::unordered_map<std::string, CoarseTag> tags_;
};

TokenStream filter_content_words(const TokenStream& tokens,
                                 const ContentWordLexicon& lexicon);

using TypeSet = std::unordered_set<std::string>;

TypeSet content_types(const TokenStream& tokens,
                      const ContentWordLexicon& lexicon);

// "token<TAB>tag" lines aligned with a tokenized corpus; the tags replace
// the lexicon for that side.
std::vector<std::pair<std::string, CoarseTag>> read_pos_annotations(
    const std::filesystem::path& path);
TypeSet content_types(
    std::span<const std::pair<std::string, CoarseTag>> annotated);

// |target ∩ source| / |target|.
double tvc(const TypeSet& target_types, const TypeSet& source_types);
double tvc(const TokenStream& target_tokens, const TokenStream& source_tokens,
           const ContentWordLexicon& lexicon);

// Same measure over id-indexed type indicators (non-zero = type present).
double tvc(std::span<const std::uint8_t> target_types,
           std::span<const std::uint8_t> source_types);

double ttr(const TokenStream& tokens);

// TTR of the selected documents of an encoded corpus (all when empty).
double ttr(const EncodedCorpus& corpus, std::span<const std::size_t> docs);

}  // namespace corpus_affinity

#endif  // CORPUS_AFFINITY_METRICS_HPP_
