// protocol_test.cpp
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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "corpus_affinity/errors.hpp"
#include "corpus_affinity/protocol.hpp"
#include "synthetic.hpp"

namespace corpus_affinity {
namespace {

std::vector<std::uint64_t> random_lengths(std::size_t n, std::uint64_t seed,
                                          std::uint64_t lo, std::uint64_t hi) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> len(lo, hi);
  std::vector<std::uint64_t> out(n);
  for (auto& l : out) l = len(rng);
  return out;
}

std::uint64_t tokens_of(const std::vector<std::size_t>& docs,
                        const std::vector<std::uint64_t>& lengths) {
  std::uint64_t t = 0;
  for (auto d : docs) t += lengths[d];
  return t;
}

TEST(Sampling, UniformBelowStaysInRange) {
  std::mt19937_64 rng(1);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70'000; ++i) ++hist[uniform_below(rng, 7)];
  for (int h : hist) EXPECT_NEAR(h, 10'000, 500);
  EXPECT_EQ(uniform_below(rng, 1), 0u);
  EXPECT_THROW(uniform_below(rng, 0), ArgumentError);
}

TEST(Sampling, SeededPermutationIsDeterministic) {
  auto a = seeded_permutation(1000, 42);
  auto b = seeded_permutation(1000, 42);
  auto c = seeded_permutation(1000, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  // mt19937_64 is fully specified, so the first draws are fixed everywhere.
  EXPECT_EQ(seeded_permutation(5, 0), seeded_permutation(5, 0));
}

TEST(Sampling, DisjointSubcorporaAreMinimalWholeDocumentPrefixes) {
  auto lengths = random_lengths(20'000, 3, 1, 60);
  SamplingPlan plan{5, 100'000, 9, SamplingMode::kDisjoint};
  auto s = sample_subcorpora(lengths, plan);
  EXPECT_EQ(s.effective_mode, SamplingMode::kDisjoint);
  EXPECT_TRUE(s.warnings.empty());
  ASSERT_EQ(s.subcorpora.size(), 5u);
  std::set<std::size_t> seen;
  std::uint64_t lo = UINT64_MAX;
  std::uint64_t hi = 0;
  for (const auto& sub : s.subcorpora) {
    EXPECT_TRUE(std::is_sorted(sub.begin(), sub.end()));
    for (auto d : sub) EXPECT_TRUE(seen.insert(d).second) << "overlap at " << d;
    auto t = tokens_of(sub, lengths);
    EXPECT_GE(t, plan.token_budget);
    EXPECT_LT(t, plan.token_budget + 60);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  EXPECT_LE(hi - lo, 60u);
  EXPECT_EQ(sample_subcorpora(lengths, plan).subcorpora, s.subcorpora);
  plan.seed = 10;
  EXPECT_NE(sample_subcorpora(lengths, plan).subcorpora, s.subcorpora);
}

TEST(Sampling, InsufficientTokensDowngradeWithWarning) {
  auto lengths = random_lengths(5000, 4, 10, 30);  // about 100k tokens
  SamplingPlan plan{5, 40'000, 1, SamplingMode::kDisjoint};
  auto s = sample_subcorpora(lengths, plan);
  EXPECT_EQ(s.effective_mode, SamplingMode::kIndependent);
  ASSERT_EQ(s.warnings.size(), 1u);
  EXPECT_NE(s.warnings[0].find("independent"), std::string::npos);
  ASSERT_EQ(s.subcorpora.size(), 5u);
  for (const auto& sub : s.subcorpora)
    EXPECT_GE(tokens_of(sub, lengths), plan.token_budget);
  EXPECT_NE(s.subcorpora[0], s.subcorpora[1]);
}

TEST(Sampling, IndependentModeDoesNotWarn) {
  auto lengths = random_lengths(500, 4, 10, 30);
  SamplingPlan plan{3, 2000, 1, SamplingMode::kIndependent};
  auto s = sample_subcorpora(lengths, plan);
  EXPECT_TRUE(s.warnings.empty());
  EXPECT_EQ(s.effective_mode, SamplingMode::kIndependent);
}

TEST(Sampling, CorpusSmallerThanBudgetIsHardError) {
  std::vector<std::uint64_t> lengths{10, 20, 30};
  SamplingPlan plan{1, 61, 0, SamplingMode::kIndependent};
  EXPECT_THROW(sample_subcorpora(lengths, plan), DataError);
  plan.token_budget = 60;
  auto s = sample_subcorpora(lengths, plan);
  EXPECT_EQ(s.subcorpora.front(), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Sampling, PlanValidation) {
  std::vector<std::uint64_t> lengths{10};
  EXPECT_THROW(sample_subcorpora(lengths, {0, 5, 0, SamplingMode::kDisjoint}),
               ArgumentError);
  EXPECT_THROW(sample_subcorpora(lengths, {1, 0, 0, SamplingMode::kDisjoint}),
               ArgumentError);
  EXPECT_EQ(parse_sampling_mode("independent"), SamplingMode::kIndependent);
  EXPECT_THROW(parse_sampling_mode("overlap"), ArgumentError);
}

TEST(MeasureSummary, MeanAndPopulationStd) {
  auto s = MeasureSummary::of({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(1.25));
  auto c = MeasureSummary::of({0.1, 0.1, 0.1});
  EXPECT_EQ(c.mean, 0.1);
  EXPECT_EQ(c.std, 0.0);
}

class ProfileTest : public ::testing::Test {
 protected:
  ProfileTest()
      : vocab_(std::make_shared<Vocabulary>()),
        lexicon_(ContentWordLexicon::bundled()) {
    components_.lexicon = &lexicon_;
    components_.tokenizer_fingerprint = tokenizer_fingerprint({});
  }

  EncodedCorpus make(std::uint64_t seed, std::uint64_t tokens,
                     const std::string& prefix = "qx") {
    return ca_test::synthetic_encoded({seed, tokens, 800, prefix, 5, 30},
                                      vocab_);
  }

  std::shared_ptr<Vocabulary> vocab_;
  ContentWordLexicon lexicon_;
  ProfileComponents components_;
};

TEST_F(ProfileTest, DeterministicAndThreadInvariant) {
  auto source = make(1, 60'000);
  auto target = make(2, 20'000);
  SamplingPlan plan{3, 15'000, 77, SamplingMode::kDisjoint};
  auto a = similarity_profile(source, target, plan, components_, "s", "t");
  auto b = similarity_profile(source, target, plan, components_, "s", "t");
  components_.threads = 4;
  auto c = similarity_profile(source, target, plan, components_, "s", "t");
  const auto dump = profile_to_json(a).dump(2);
  EXPECT_EQ(profile_to_json(b).dump(2), dump);
  EXPECT_EQ(profile_to_json(c).dump(2), dump);
  EXPECT_EQ(profile_to_csv(c), profile_to_csv(a));
}

TEST_F(ProfileTest, ShapeAndInvariants) {
  auto source = make(1, 60'000);
  auto target = make(2, 20'000);
  SamplingPlan plan{4, 12'000, 5, SamplingMode::kDisjoint};
  auto p = similarity_profile(source, target, plan, components_, "s", "t");
  ASSERT_EQ(p.measures.size(), std::size(kAllMeasures));
  ASSERT_EQ(p.subcorpus_tokens.size(), 4u);
  for (auto t : p.subcorpus_tokens) EXPECT_GE(t, 12'000u);
  for (const auto& [m, s] : p.measures) {
    ASSERT_EQ(s.values.size(), 4u);
    double mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / 4;
    EXPECT_NEAR(s.mean, mean, 1e-9);
  }
  for (double v : p.measure(Measure::kPpl).values) EXPECT_GT(v, 1.0);
  for (Measure m : {Measure::kJsdPooled, Measure::kJsd1, Measure::kJsd2,
                    Measure::kJsd3, Measure::kTvc, Measure::kTtr})
    for (double v : p.measure(m).values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  auto csv = profile_to_csv(p);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 7 * 4);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "source,target,measure,subcorpus_index,value");
}

TEST_F(ProfileTest, JsonRoundTrip) {
  auto source = make(1, 30'000);
  auto target = make(2, 10'000);
  SamplingPlan plan{2, 10'000, 5, SamplingMode::kIndependent};
  auto p = similarity_profile(source, target, plan, components_, "src", "tgt");
  auto back = profile_from_json(nlohmann::json::parse(profile_to_json(p).dump()));
  EXPECT_EQ(back.source_id, "src");
  EXPECT_EQ(back.target_id, "tgt");
  EXPECT_EQ(back.plan, p.plan);
  EXPECT_EQ(back.measures, p.measures);
  EXPECT_EQ(profile_to_json(back).dump(), profile_to_json(p).dump());
  EXPECT_THROW(profile_from_json(nlohmann::json::parse("{\"source\": 1}")),
               DataError);
}

TEST_F(ProfileTest, TargetEqualToTheOnlySubcorpus) {
  auto source = make(3, 8000);
  std::vector<std::vector<WordId>> docs;
  EncodedCorpus target(vocab_);
  for (std::size_t d = 0; d < source.num_documents(); ++d)
    target.add_ids(source.document_id(d), source.document(d));
  SamplingPlan plan{1, source.num_tokens(), 0, SamplingMode::kDisjoint};
  auto p = similarity_profile(source, target, plan, components_, "s", "t");
  EXPECT_EQ(p.measure(Measure::kJsdPooled).mean, 0.0);
  EXPECT_EQ(p.measure(Measure::kJsd3).mean, 0.0);
  EXPECT_EQ(p.measure(Measure::kTvc).mean, 1.0);
}

TEST_F(ProfileTest, IdenticalSubcorporaHaveZeroSpread) {
  std::vector<WordId> doc;
  for (int i = 0; i < 20; ++i)
    doc.push_back(vocab_->intern(ca_test::synthetic_word("qx", i % 7)));
  EncodedCorpus source(vocab_);
  for (int d = 0; d < 200; ++d) source.add_ids(std::to_string(d), doc);
  auto target = make(4, 3000);
  SamplingPlan plan{5, 400, 8, SamplingMode::kIndependent};
  auto p = similarity_profile(source, target, plan, components_, "s", "t");
  for (const auto& [m, s] : p.measures) EXPECT_EQ(s.std, 0.0) << measure_name(m);
}

TEST_F(ProfileTest, MatchedSourceBeatsDivergentSource) {
  auto target = make(10, 20'000);
  auto matched = make(11, 60'000);
  auto divergent = make(12, 60'000, "zv");
  SamplingPlan plan{3, 15'000, 1, SamplingMode::kDisjoint};
  auto a = similarity_profile(matched, target, plan, components_, "a", "t");
  auto b = similarity_profile(divergent, target, plan, components_, "b", "t");
  EXPECT_LT(a.measure(Measure::kJsdPooled).mean, b.measure(Measure::kJsdPooled).mean);
  EXPECT_GT(a.measure(Measure::kTvc).mean, b.measure(Measure::kTvc).mean);
  EXPECT_LT(a.measure(Measure::kPpl).mean, b.measure(Measure::kPpl).mean);
  EXPECT_EQ(b.measure(Measure::kJsdPooled).mean, 1.0);
  EXPECT_EQ(b.measure(Measure::kTvc).mean, 0.0);
}

TEST_F(ProfileTest, TtrIgnoresTheTarget) {
  auto source = make(1, 30'000);
  auto t1 = make(2, 5000);
  auto t2 = make(3, 9000, "zv");
  SamplingPlan plan{3, 8000, 2, SamplingMode::kDisjoint};
  auto a = similarity_profile(source, t1, plan, components_, "s", "t1");
  auto b = similarity_profile(source, t2, plan, components_, "s", "t2");
  EXPECT_EQ(a.measure(Measure::kTtr), b.measure(Measure::kTtr));
}

TEST_F(ProfileTest, SampledTargetAndErrors) {
  auto source = make(1, 30'000);
  auto target = make(2, 30'000);
  SamplingPlan plan{2, 10'000, 2, SamplingMode::kDisjoint};
  components_.sample_target = true;
  auto p = similarity_profile(source, target, plan, components_, "s", "t");
  EXPECT_EQ(p.measure(Measure::kPpl).values.size(), 2u);

  auto other_vocab = std::make_shared<Vocabulary>();
  auto foreign = ca_test::synthetic_encoded({2, 1000, 50, "qx", 5, 10}, other_vocab);
  EXPECT_THROW(similarity_profile(source, foreign, plan, components_, "s", "t"),
               ArgumentError);
  EncodedCorpus empty(vocab_);
  EXPECT_THROW(similarity_profile(source, empty, plan, components_, "s", "t"),
               EmptyCorpusError);
  SamplingPlan too_big{1, 1'000'000, 0, SamplingMode::kIndependent};
  EXPECT_THROW(similarity_profile(source, target, too_big, components_, "s", "t"),
               DataError);
}

}  // namespace
}  // namespace corpus_affinity
