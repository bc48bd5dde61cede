// protocol.hpp
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
// Size-controlled measurement: draw equal-budget sub-corpora from a source,
// measure each against a target, and aggregate per measure.

#ifndef CORPUS_AFFINITY_PROTOCOL_HPP_
#define CORPUS_AFFINITY_PROTOCOL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpus_affinity/corpus.hpp"
#include "corpus_affinity/kneser_ney.hpp"
#include "corpus_affinity/metrics.hpp"
#include "corpus_affinity/ngram.hpp"

namespace corpus_affinity {

enum class SamplingMode { kDisjoint, kIndependent };

std::string_view sampling_mode_name(SamplingMode mode);
SamplingMode parse_sampling_mode(std::string_view name);

struct SamplingPlan {
  std::size_t num_subcorpora = 5;
  std::uint64_t token_budget = 10'000'000;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::kDisjoint;

  void validate() const;
  bool operator==(const SamplingPlan&) const = default;
};

struct SubcorpusSample {
  // Document indices per sub-corpus, ascending.
  std::vector<std::vector<std::size_t>> subcorpora;
  SamplingMode effective_mode = SamplingMode::kDisjoint;
  std::vector<std::string> warnings;
};

// Uniform integer in [0, bound) by rejection, identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

SubcorpusSample sample_subcorpora(std::span<const std::uint64_t> doc_lengths,
                                  const SamplingPlan& plan);
SubcorpusSample sample_subcorpora(const EncodedCorpus& corpus,
                                  const SamplingPlan& plan);

struct ProfileComponents {
  KnConfig lm;
  std::string tokenizer_fingerprint;
  const ContentWordLexicon* lexicon = nullptr;
  // Pooling behind the headline "jsd" ranking key.
  Pooling pooling = Pooling::kPooled;
  std::optional<std::size_t> jsd_top_k;
  // Score a budget-sized sample of the target instead of all of it.
  bool sample_target = false;
  int threads = 1;
};

struct MeasureSummary {
  std::vector<double> values;
  double mean = 0.0;
  double std = 0.0;  // population

  static MeasureSummary of(std::vector<double> values);
  bool operator==(const MeasureSummary&) const = default;
};

struct SimilarityProfile {
  std::string source_id;
  std::string target_id;
  SamplingPlan plan;
  SamplingMode effective_mode = SamplingMode::kDisjoint;
  Pooling pooling = Pooling::kPooled;
  std::vector<std::uint64_t> subcorpus_tokens;
  std::vector<std::pair<Measure, MeasureSummary>> measures;
  std::vector<std::string> warnings;

  const MeasureSummary& measure(Measure m) const;
  // The jsd measure matching `pooling`.
  Measure headline_jsd() const;
};

// Both corpora must share one vocabulary.
SimilarityProfile similarity_profile(const EncodedCorpus& source,
                                     const EncodedCorpus& target,
                                     const SamplingPlan& plan,
                                     const ProfileComponents& components,
                                     std::string source_id,
                                     std::string target_id);

nlohmann::ordered_json profile_to_json(const SimilarityProfile& profile);
SimilarityProfile profile_from_json(const nlohmann::json& j);
// "source,target,measure,subcorpus_index,value"
std::string profile_to_csv(const SimilarityProfile& profile);

}  // namespace corpus_affinity

#endif  // CORPUS_AFFINITY_PROTOCOL_HPP_
