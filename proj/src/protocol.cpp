// protocol.cpp
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

#include "corpus_affinity/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "corpus_affinity/errors.hpp"
#include "corpus_affinity/io.hpp"
#include "corpus_affinity/parallel.hpp"

namespace corpus_affinity {

std::string_view sampling_mode_name(SamplingMode mode) {
  return mode == SamplingMode::kDisjoint ? "disjoint" : "independent";
}

SamplingMode parse_sampling_mode(std::string_view name) {
  if (name == "disjoint") return SamplingMode::kDisjoint;
  if (name == "independent") return SamplingMode::kIndependent;
  throw ArgumentError("unknown sampling mode \"" + std::string(name) +
                      "\" (expected disjoint or independent)");
}

void SamplingPlan::validate() const {
  if (num_subcorpora < 1) throw ArgumentError("num_subcorpora must be >= 1");
  if (token_budget < 1) throw ArgumentError("token_budget must be >= 1");
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw ArgumentError("uniform_below: bound must be positive");
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - (kMax % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % bound;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i)
    std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
  return perm;
}

namespace {

// Takes documents from perm[pos..] until the budget is met. Returns false if
// the permutation runs out first.
bool take_prefix(std::span<const std::uint64_t> lengths,
                 const std::vector<std::size_t>& perm, std::size_t& pos,
                 std::uint64_t budget, std::vector<std::size_t>& out) {
  std::uint64_t tokens = 0;
  while (tokens < budget) {
    if (pos == perm.size()) return false;
    out.push_back(perm[pos]);
    tokens += lengths[perm[pos++]];
  }
  std::sort(out.begin(), out.end());
  return true;
}

}  // namespace

SubcorpusSample sample_subcorpora(std::span<const std::uint64_t> doc_lengths,
                                  const SamplingPlan& plan) {
  plan.validate();
  std::uint64_t total = 0;
  for (auto n : doc_lengths) total += n;
  if (total < plan.token_budget)
    throw DataError("corpus has " + std::to_string(total) +
                    " tokens, fewer than one sub-corpus budget of " +
                    std::to_string(plan.token_budget));

  SubcorpusSample out;
  out.effective_mode = plan.mode;
  const std::size_t k = plan.num_subcorpora;
  if (plan.mode == SamplingMode::kDisjoint) {
    bool ok = total / k >= plan.token_budget;
    if (ok) {
      auto perm = seeded_permutation(doc_lengths.size(), plan.seed);
      std::size_t pos = 0;
      out.subcorpora.resize(k);
      for (std::size_t i = 0; i < k && ok; ++i)
        ok = take_prefix(doc_lengths, perm, pos, plan.token_budget,
                         out.subcorpora[i]);
    }
    if (ok) return out;
    out.subcorpora.clear();
    out.effective_mode = SamplingMode::kIndependent;
    out.warnings.push_back(
        "corpus has " + std::to_string(total) + " tokens, not enough for " +
        std::to_string(k) + " disjoint sub-corpora of " +
        std::to_string(plan.token_budget) +
        " tokens; sampling independently instead");
  }
  out.subcorpora.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto perm = seeded_permutation(doc_lengths.size(), plan.seed + i);
    std::size_t pos = 0;
    take_prefix(doc_lengths, perm, pos, plan.token_budget, out.subcorpora[i]);
  }
  return out;
}

SubcorpusSample sample_subcorpora(const EncodedCorpus& corpus,
                                  const SamplingPlan& plan) {
  auto lengths = corpus.document_lengths();
  return sample_subcorpora(lengths, plan);
}

MeasureSummary MeasureSummary::of(std::vector<double> values) {
  MeasureSummary s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  if (std::all_of(s.values.begin(), s.values.end(),
                  [&](double v) { return v == s.values.front(); })) {
    s.mean = s.values.front();
    return s;
  }
  const double n = static_cast<double>(s.values.size());
  double sum = 0.0;
  for (double v : s.values) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);
  return s;
}

const MeasureSummary& SimilarityProfile::measure(Measure m) const {
  for (const auto& [name, summary] : measures)
    if (name == m) return summary;
  throw ArgumentError("profile has no values for measure " +
                      std::string(measure_name(m)));
}

Measure SimilarityProfile::headline_jsd() const {
  switch (pooling) {
    case Pooling::kOrder1: return Measure::kJsd1;
    case Pooling::kOrder2: return Measure::kJsd2;
    case Pooling::kOrder3: return Measure::kJsd3;
    case Pooling::kPooled: break;
  }
  return Measure::kJsdPooled;
}

namespace {

std::vector<std::uint8_t> type_mask(const EncodedCorpus& corpus,
                                    std::span<const std::size_t> docs,
                                    const std::vector<std::uint8_t>& content) {
  std::vector<std::uint8_t> mask(content.size(), 0);
  auto mark = [&](std::size_t d) {
    for (WordId id : corpus.document(d))
      if (content[id]) mask[id] = 1;
  };
  if (docs.empty()) {
    for (std::size_t d = 0; d < corpus.num_documents(); ++d) mark(d);
  } else {
    for (std::size_t d : docs) mark(d);
  }
  return mask;
}

}  // namespace

SimilarityProfile similarity_profile(const EncodedCorpus& source,
                                     const EncodedCorpus& target,
                                     const SamplingPlan& plan,
                                     const ProfileComponents& components,
                                     std::string source_id,
                                     std::string target_id) {
  if (source.shared_vocabulary() != target.shared_vocabulary())
    throw ArgumentError("source and target corpora must share a vocabulary");
  if (components.lexicon == nullptr)
    throw ArgumentError("similarity profile needs a content-word lexicon");
  if (source.num_tokens() == 0)
    throw EmptyCorpusError("source corpus \"" + source_id + "\" is empty");
  if (target.num_tokens() == 0)
    throw EmptyCorpusError("target corpus \"" + target_id + "\" is empty");

  SimilarityProfile profile;
  profile.source_id = std::move(source_id);
  profile.target_id = std::move(target_id);
  profile.plan = plan;
  profile.pooling = components.pooling;

  SubcorpusSample sample = sample_subcorpora(source, plan);
  profile.effective_mode = sample.effective_mode;
  profile.warnings = sample.warnings;

  std::vector<std::size_t> target_docs;
  if (components.sample_target && target.num_tokens() > plan.token_budget) {
    SamplingPlan target_plan{1, plan.token_budget, plan.seed,
                             SamplingMode::kIndependent};
    target_docs = sample_subcorpora(target, target_plan).subcorpora.front();
  }

  const int threads = std::max(1, components.threads);
  const Vocabulary& vocab = source.vocabulary();
  std::vector<std::uint8_t> content(vocab.size(), 0);
  parallel_for(vocab.size(), threads, [&](std::size_t id) {
    if (id > kUnkId)
      content[id] = components.lexicon->is_content_word(
          vocab.word(static_cast<WordId>(id)));
  });
  const auto target_types = type_mask(target, target_docs, content);
  const NgramTable target_table =
      count_ngrams(target, target_docs, 3, BoundaryPolicy::kNone, threads);

  const std::size_t k = sample.subcorpora.size();
  std::vector<std::vector<double>> values(std::size(kAllMeasures),
                                          std::vector<double>(k));
  auto set = [&](Measure m, std::size_t i, double v) {
    values[static_cast<std::size_t>(m)][i] = v;
  };
  for (std::size_t i = 0; i < k; ++i) {
    const auto& docs = sample.subcorpora[i];
    std::uint64_t tokens = 0;
    for (std::size_t d : docs) tokens += source.document(d).size();
    profile.subcorpus_tokens.push_back(tokens);
    {
      NgramTable marked = count_ngrams(source, docs, 3,
                                       BoundaryPolicy::kSentenceMarkers,
                                       threads);
      KneserNeyModel model =
          train_kn(marked, components.lm, components.tokenizer_fingerprint);
      for (const auto& w : model.warnings())
        profile.warnings.push_back("sub-corpus " + std::to_string(i) + ": " +
                                   w);
      set(Measure::kPpl, i,
          perplexity(model, target, target_docs,
                     components.tokenizer_fingerprint, threads)
              .perplexity);
    }
    {
      NgramTable plain =
          count_ngrams(source, docs, 3, BoundaryPolicy::kNone, threads);
      const auto top_k = components.jsd_top_k;
      set(Measure::kJsdPooled, i,
          jsd(plain, target_table, Pooling::kPooled, top_k));
      set(Measure::kJsd1, i, jsd(plain, target_table, Pooling::kOrder1, top_k));
      set(Measure::kJsd2, i, jsd(plain, target_table, Pooling::kOrder2, top_k));
      set(Measure::kJsd3, i, jsd(plain, target_table, Pooling::kOrder3, top_k));
    }
    set(Measure::kTvc, i, tvc(target_types, type_mask(source, docs, content)));
    set(Measure::kTtr, i, ttr(source, docs));
  }
  for (Measure m : kAllMeasures)
    profile.measures.emplace_back(
        m, MeasureSummary::of(std::move(values[static_cast<std::size_t>(m)])));
  return profile;
}

nlohmann::ordered_json profile_to_json(const SimilarityProfile& profile) {
  nlohmann::ordered_json j;
  j["source"] = profile.source_id;
  j["target"] = profile.target_id;
  j["plan"] = {{"num_subcorpora", profile.plan.num_subcorpora},
               {"token_budget", profile.plan.token_budget},
               {"seed", profile.plan.seed},
               {"mode", sampling_mode_name(profile.plan.mode)}};
  j["effective_mode"] = sampling_mode_name(profile.effective_mode);
  j["pooling"] = pooling_name(profile.pooling);
  j["subcorpus_tokens"] = profile.subcorpus_tokens;
  nlohmann::ordered_json measures = nlohmann::ordered_json::object();
  for (const auto& [m, s] : profile.measures)
    measures[std::string(measure_name(m))] = {
        {"values", s.values}, {"mean", s.mean}, {"std", s.std}};
  j["measures"] = std::move(measures);
  j["warnings"] = profile.warnings;
  return j;
}

SimilarityProfile profile_from_json(const nlohmann::json& j) {
  try {
    SimilarityProfile p;
    p.source_id = j.at("source").get<std::string>();
    p.target_id = j.at("target").get<std::string>();
    const auto& plan = j.at("plan");
    p.plan.num_subcorpora = plan.at("num_subcorpora").get<std::size_t>();
    p.plan.token_budget = plan.at("token_budget").get<std::uint64_t>();
    p.plan.seed = plan.at("seed").get<std::uint64_t>();
    p.plan.mode = parse_sampling_mode(plan.at("mode").get<std::string>());
    p.effective_mode = parse_sampling_mode(
        j.value("effective_mode", std::string(sampling_mode_name(p.plan.mode))));
    p.pooling = parse_pooling(j.value("pooling", std::string("pooled")));
    if (j.contains("subcorpus_tokens"))
      p.subcorpus_tokens =
          j.at("subcorpus_tokens").get<std::vector<std::uint64_t>>();
    for (const auto& [name, s] : j.at("measures").items()) {
      auto m = parse_measure(name);
      if (!m) throw DataError("profile: unknown measure \"" + name + "\"");
      MeasureSummary summary;
      summary.values = s.at("values").get<std::vector<double>>();
      summary.mean = s.at("mean").get<double>();
      summary.std = s.value("std", 0.0);
      p.measures.emplace_back(*m, std::move(summary));
    }
    std::sort(p.measures.begin(), p.measures.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (j.contains("warnings"))
      p.warnings = j.at("warnings").get<std::vector<std::string>>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed similarity profile: ") + e.what());
  } catch (const ArgumentError& e) {
    throw DataError(std::string("malformed similarity profile: ") + e.what());
  }
}

std::string profile_to_csv(const SimilarityProfile& profile) {
  std::ostringstream out;
  out << "source,target,measure,subcorpus_index,value\n";
  for (const auto& [m, s] : profile.measures)
    for (std::size_t i = 0; i < s.values.size(); ++i)
      out << profile.source_id << ',' << profile.target_id << ','
          << measure_name(m) << ',' << i << ',' << format_double(s.values[i])
          << '\n';
  return out.str();
}

}  // namespace corpus_affinity
