// ngram.hpp
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
// N-gram counting for orders 1..3, table merging, the count-table text
// artifact, and conversion of counts into term distributions.

#ifndef CORPUS_AFFINITY_NGRAM_HPP_
#define CORPUS_AFFINITY_NGRAM_HPP_

#include <array>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "corpus_affinity/corpus.hpp"
#include "corpus_affinity/vocabulary.hpp"

namespace corpus_affinity {

inline constexpr int kMaxOrder = 3;

enum class BoundaryPolicy { kNone, kSentenceMarkers };

std::string_view boundary_name(BoundaryPolicy policy);
BoundaryPolicy parse_boundary(std::string_view name);

// Word ids of an n-gram, oldest word first. Slots past the order hold
// kNoWord so keys of different orders never collide.
struct NgramKey {
  std::array<WordId, kMaxOrder> words{kNoWord, kNoWord, kNoWord};

  friend bool operator==(const NgramKey&, const NgramKey&) = default;
  friend auto operator<=>(const NgramKey&, const NgramKey&) = default;
};

struct NgramKeyHash {
  std::size_t operator()(const NgramKey& key) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (WordId w : key.words) {
      h ^= w;
      h *= 0xBF58476D1CE4E5B9ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

using NgramCounts = std::unordered_map<NgramKey, std::uint64_t, NgramKeyHash>;

class NgramTable {
 public:
  NgramTable(int max_order, BoundaryPolicy boundary,
             std::shared_ptr<const Vocabulary> vocab);

  int max_order() const { return max_order_; }
  BoundaryPolicy boundary() const { return boundary_; }
  const Vocabulary& vocabulary() const { return *vocab_; }
  const std::shared_ptr<const Vocabulary>& shared_vocabulary() const {
    return vocab_;
  }

  const NgramCounts& counts(int order) const { return counts_[order - 1]; }
  std::uint64_t total(int order) const { return totals_[order - 1]; }
  std::size_t size(int order) const { return counts_[order - 1].size(); }

  // Count of a space-joined n-gram; 0 when absent.
  std::uint64_t count(std::string_view ngram) const;

  void add(int order, const NgramKey& key, std::uint64_t count);

  // Entries of one order sorted by key ids.
  std::vector<std::pair<NgramKey, std::uint64_t>> sorted_entries(
      int order) const;

  std::string text(const NgramKey& key, int order) const;

  // Compares content by n-gram text, independent of vocabulary ids.
  bool same_counts(const NgramTable& other) const;

 private:
  int max_order_;
  BoundaryPolicy boundary_;
  std::shared_ptr<const Vocabulary> vocab_;
  std::array<NgramCounts, kMaxOrder> counts_;
  std::array<std::uint64_t, kMaxOrder> totals_{};
};

// Accumulates documents into per-order counts. With sentence markers each
// document of order > 1 is padded with (max_order - 1) leading <s> and one
// trailing </s>; unigrams always count the bare tokens.
class NgramCounter {
 public:
  // Counts token strings, interning them into a private vocabulary.
  NgramCounter(int max_order, BoundaryPolicy boundary);
  // Counts id documents whose ids belong to `vocab`.
  NgramCounter(int max_order, BoundaryPolicy boundary,
               std::shared_ptr<const Vocabulary> vocab);

  void add(const TokenStream& doc);
  void add(std::span<const WordId> doc);

  NgramTable finish() &&;

 private:
  std::shared_ptr<Vocabulary> own_vocab_;
  NgramTable table_;
  std::vector<WordId> scratch_;
};

NgramTable count_ngrams(std::span<const TokenStream> docs, int max_order,
                        BoundaryPolicy boundary);

// Counts the selected documents of an encoded corpus (all of them when
// `docs` is empty), sharded over `threads` workers and merged. The result
// is identical for every thread count.
NgramTable count_ngrams(const EncodedCorpus& corpus,
                        std::span<const std::size_t> docs, int max_order,
                        BoundaryPolicy boundary, int threads = 1);

NgramTable merge_tables(const NgramTable& a, const NgramTable& b);

// Count-table artifact: a header line followed by "ORDER\tCOUNT\tNGRAM"
// lines sorted by order, then by n-gram bytes.
inline constexpr std::string_view kCountTableMagic = "corpus-affinity-counts v1";
void write_count_table(const NgramTable& table, std::ostream& out);
NgramTable read_count_table(std::istream& in);

enum class Pooling { kOrder1, kOrder2, kOrder3, kPooled };

std::string_view pooling_name(Pooling pooling);
Pooling parse_pooling(std::string_view name);

// A discrete distribution over term strings. Probabilities are kept as
// weight / total, so count-derived distributions stay exact integers until
// the final division.
class Distribution {
 public:
  // Sorts and validates. Weights must be positive and finite; duplicate
  // terms are rejected.
  static Distribution from_weights(
      std::vector<std::pair<std::string, double>> weights, Pooling pooling);

  Pooling pooling() const { return pooling_; }
  std::size_t size() const { return terms_.size(); }
  double total() const { return total_; }
  const std::vector<std::pair<std::string, double>>& weights() const {
    return terms_;
  }
  double probability(std::string_view term) const;

 private:
  Distribution() = default;

  std::vector<std::pair<std::string, double>> terms_;
  double total_ = 0.0;
  Pooling pooling_ = Pooling::kPooled;
};

// Keeps the k heaviest terms (ties by term) and renormalizes over them.
Distribution truncate_top_k(const Distribution& dist, std::size_t k);

Distribution to_distribution(const NgramTable& table, Pooling pooling);

}  // namespace corpus_affinity

#endif  // CORPUS_AFFINITY_NGRAM_HPP_
