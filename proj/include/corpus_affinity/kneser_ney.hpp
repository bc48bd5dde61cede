// kneser_ney.hpp
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
// Interpolated modified Kneser-Ney trigram model.
//
// Adjusted counts follow the usual recipe: raw counts at the highest order
// and for n-grams that start with <s>, continuation counts (number of
// distinct left extensions) everywhere else. Each order has three
// discounts, for adjusted counts 1, 2 and 3+. The unigram level
// interpolates with the uniform distribution over the vocabulary, which is
// where <unk> gets its mass.
//
// The model is stored in backoff form: every stored n-gram carries its
// fully interpolated probability and every context its interpolation
// weight, both as log10 values, exactly as they appear in the ARPA file.
// A model loaded from ARPA therefore scores bit-identically to the one
// that wrote it.

#ifndef CORPUS_AFFINITY_KNESER_NEY_HPP_
#define CORPUS_AFFINITY_KNESER_NEY_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpus_affinity/corpus.hpp"
#include "corpus_affinity/ngram.hpp"

namespace corpus_affinity {

enum class DiscountMode { kCountOfCounts, kFixed };

struct KnConfig {
  DiscountMode discount_mode = DiscountMode::kCountOfCounts;
  double fixed_discount = 0.75;  // kFixed only; must lie in [0, 1)
  std::uint64_t min_count = 1;   // prunes orders >= 2
};

// Discounts for adjusted counts 1, 2 and 3+.
using DiscountBands = std::array<double, 3>;

// log10 probability written for <s>, which is never predicted.
inline constexpr double kArpaLog10Zero = -99.0;

class KneserNeyModel {
 public:
  // Log10 probability of `word` after context (u, v). Pass kNoWord for
  // missing context positions. All ids must be model ids (see map_word).
  double log10_prob(WordId u, WordId v, WordId word) const;

  // Probability of `word` after up to two context words given as text.
  // Unknown words are treated as <unk>.
  double probability(std::span<const std::string> context,
                     std::string_view word) const;

  // Model id for a word of the model's own vocabulary; <unk> if the word
  // was not seen in training.
  WordId map_word(WordId id) const {
    return id < in_vocab_.size() && in_vocab_[id] ? id : kUnkId;
  }
  WordId lookup(std::string_view word) const;

  // Every word p(. | h) ranges over: training words, </s> and <unk>.
  std::vector<WordId> predictable_words() const;

  const Vocabulary& vocabulary() const { return *vocab_; }
  const std::shared_ptr<const Vocabulary>& shared_vocabulary() const {
    return vocab_;
  }
  const std::array<DiscountBands, 3>& discounts() const { return discounts_; }
  DiscountMode discount_mode() const { return discount_mode_; }
  std::uint64_t min_count() const { return min_count_; }
  const std::string& tokenizer_fingerprint() const { return fingerprint_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::size_t num_ngrams(int order) const;

  void write_arpa(std::ostream& out) const;
  nlohmann::ordered_json sidecar() const;
  static KneserNeyModel read_arpa(std::istream& in,
                                  const nlohmann::json& sidecar);

  friend bool operator==(const KneserNeyModel& a, const KneserNeyModel& b);

 private:
  friend KneserNeyModel train_kn(const NgramTable&, const KnConfig&,
                                 std::string);

  struct BigramEntry {
    double log10_prob = 0.0;
    double log10_backoff = 0.0;
    bool operator==(const BigramEntry&) const = default;
  };

  KneserNeyModel() = default;
  void resize_unigrams(std::size_t n);

  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<std::uint8_t> in_vocab_;
  std::vector<double> unigram_log10_;
  std::vector<double> unigram_backoff_;
  std::unordered_map<NgramKey, BigramEntry, NgramKeyHash> bigrams_;
  std::unordered_map<NgramKey, double, NgramKeyHash> trigrams_;
  std::array<DiscountBands, 3> discounts_{};
  DiscountMode discount_mode_ = DiscountMode::kCountOfCounts;
  std::uint64_t min_count_ = 1;
  std::string fingerprint_;
  std::vector<std::string> warnings_;
};

// Discounts estimated from counts-of-counts n1..n4 of one order.
// Returns nullopt when n1, n2 or n3 is zero.
std::optional<DiscountBands> estimate_discounts(
    const std::array<std::uint64_t, 4>& counts_of_counts);

// Trains on a sentence-marker table of max_order 3.
KneserNeyModel train_kn(const NgramTable& table, const KnConfig& config,
                        std::string tokenizer_fingerprint);

struct PerplexityResult {
  double perplexity = 0.0;
  std::uint64_t scored_token_count = 0;
  std::uint64_t oov_count = 0;
  double total_log_prob = 0.0;  // natural log
};

// Natural-log probability of one document: every token plus </s>, each
// conditioned on the two previous (padded) positions.
double sequence_log_prob(const KneserNeyModel& model, const TokenStream& doc,
                         std::string_view tokenizer_fingerprint);

PerplexityResult perplexity(const KneserNeyModel& model,
                            std::span<const TokenStream> corpus,
                            std::string_view tokenizer_fingerprint,
                            int threads = 1);

// Scores the selected documents of an encoded corpus (all when `docs` is
// empty). Corpus ids are translated through the model vocabulary.
PerplexityResult perplexity(const KneserNeyModel& model,
                            const EncodedCorpus& corpus,
                            std::span<const std::size_t> docs,
                            std::string_view tokenizer_fingerprint,
                            int threads = 1);

// ARPA file plus "<path>.json" sidecar.
void save_model(const KneserNeyModel& model, const std::filesystem::path& path);
KneserNeyModel load_model(const std::filesystem::path& path);

}  // namespace corpus_affinity

#endif  // CORPUS_AFFINITY_KNESER_NEY_HPP_
