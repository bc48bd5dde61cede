// ngram_test.cpp
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

#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "corpus_affinity/errors.hpp"
#include "corpus_affinity/ngram.hpp"
#include "synthetic.hpp"

namespace corpus_affinity {
namespace {

using Docs = std::vector<std::vector<std::string>>;

NgramTable count(const Docs& docs, int order, BoundaryPolicy b) {
  auto streams = ca_test::to_streams(docs);
  return count_ngrams(streams, order, b);
}

const Docs kToy = {{"a", "b", "a", "b", "a", "c"}};

TEST(CountNgrams, ToyCorpusWithoutMarkers) {
  auto t = count(kToy, 3, BoundaryPolicy::kNone);
  EXPECT_EQ(t.count("a"), 3u);
  EXPECT_EQ(t.count("b"), 2u);
  EXPECT_EQ(t.count("c"), 1u);
  EXPECT_EQ(t.count("a b"), 2u);
  EXPECT_EQ(t.count("b a"), 2u);
  EXPECT_EQ(t.count("a c"), 1u);
  EXPECT_EQ(t.count("a b a"), 2u);
  EXPECT_EQ(t.count("b a b"), 1u);
  EXPECT_EQ(t.count("b a c"), 1u);
  EXPECT_EQ(t.count("c a"), 0u);
  EXPECT_EQ(t.total(1), 6u);
  EXPECT_EQ(t.total(2), 5u);
  EXPECT_EQ(t.total(3), 4u);
}

TEST(CountNgrams, ToyCorpusWithMarkers) {
  auto t = count(kToy, 3, BoundaryPolicy::kSentenceMarkers);
  EXPECT_EQ(t.total(1), 6u);  // unigrams are not padded
  EXPECT_EQ(t.count("<s> <s>"), 1u);
  EXPECT_EQ(t.count("<s> a"), 1u);
  EXPECT_EQ(t.count("c </s>"), 1u);
  EXPECT_EQ(t.count("<s> <s> a"), 1u);
  EXPECT_EQ(t.count("<s> a b"), 1u);
  EXPECT_EQ(t.count("a c </s>"), 1u);
  EXPECT_EQ(t.total(2), 8u);  // includes the "<s> <s>" context
  EXPECT_EQ(t.total(3), 7u);
}

TEST(CountNgrams, TotalsFollowDocumentLengths) {
  ca_test::CorpusSpec spec;
  spec.tokens = 3000;
  spec.min_doc = 1;
  spec.max_doc = 6;
  auto docs = ca_test::synthetic_docs(spec);
  auto t = count(docs, 3, BoundaryPolicy::kNone);
  for (int n = 1; n <= 3; ++n) {
    std::uint64_t expected = 0;
    for (const auto& d : docs)
      expected += d.size() >= static_cast<std::size_t>(n) ? d.size() - n + 1 : 0;
    EXPECT_EQ(t.total(n), expected) << n;
    std::uint64_t sum = 0;
    for (const auto& [k, c] : t.counts(n)) sum += c;
    EXPECT_EQ(sum, expected);
  }
}

TEST(CountNgrams, MaxOrderBounds) {
  EXPECT_THROW(count(kToy, 0, BoundaryPolicy::kNone), ArgumentError);
  EXPECT_THROW(count(kToy, 4, BoundaryPolicy::kNone), ArgumentError);
  auto t = count(kToy, 1, BoundaryPolicy::kNone);
  EXPECT_EQ(t.max_order(), 1);
  EXPECT_EQ(t.count("a"), 3u);
}

TEST(MergeTables, EqualsCountingTheConcatenation) {
  ca_test::CorpusSpec spec;
  spec.tokens = 5000;
  auto docs = ca_test::synthetic_docs(spec);
  Docs a(docs.begin(), docs.begin() + docs.size() / 3);
  Docs b(docs.begin() + docs.size() / 3, docs.begin() + 2 * docs.size() / 3);
  Docs c(docs.begin() + 2 * docs.size() / 3, docs.end());
  for (auto boundary : {BoundaryPolicy::kNone, BoundaryPolicy::kSentenceMarkers}) {
    auto whole = count(docs, 3, boundary);
    auto ta = count(a, 3, boundary);
    auto tb = count(b, 3, boundary);
    auto tc = count(c, 3, boundary);
    auto left = merge_tables(merge_tables(ta, tb), tc);
    auto right = merge_tables(ta, merge_tables(tb, tc));
    EXPECT_TRUE(left.same_counts(whole));
    EXPECT_TRUE(right.same_counts(whole));
    EXPECT_TRUE(merge_tables(tb, ta).same_counts(merge_tables(ta, tb)));
  }
}

TEST(MergeTables, RejectsMismatchedSettings) {
  auto a = count(kToy, 3, BoundaryPolicy::kNone);
  auto b = count(kToy, 2, BoundaryPolicy::kNone);
  auto c = count(kToy, 3, BoundaryPolicy::kSentenceMarkers);
  EXPECT_THROW(merge_tables(a, b), ArgumentError);
  EXPECT_THROW(merge_tables(a, c), ArgumentError);
}

TEST(CountNgrams, ShardedCountingIsThreadInvariant) {
  auto vocab = std::make_shared<Vocabulary>();
  ca_test::CorpusSpec spec;
  spec.tokens = 40'000;
  auto corpus = ca_test::synthetic_encoded(spec, vocab);
  for (auto boundary : {BoundaryPolicy::kNone, BoundaryPolicy::kSentenceMarkers}) {
    auto t1 = count_ngrams(corpus, {}, 3, boundary, 1);
    for (int threads : {2, 3, 8}) {
      auto tn = count_ngrams(corpus, {}, 3, boundary, threads);
      EXPECT_TRUE(tn.same_counts(t1)) << threads;
      EXPECT_EQ(tn.sorted_entries(3), t1.sorted_entries(3));
    }
  }
}

TEST(CountNgrams, EncodedMatchesStringCounting) {
  ca_test::CorpusSpec spec;
  spec.tokens = 4000;
  auto docs = ca_test::synthetic_docs(spec);
  auto vocab = std::make_shared<Vocabulary>();
  auto corpus = ca_test::encode(docs, vocab);
  std::vector<std::size_t> subset{0, 2, 4, 6};
  Docs picked;
  for (auto i : subset) picked.push_back(docs[i]);
  auto t_all = count_ngrams(corpus, {}, 3, BoundaryPolicy::kSentenceMarkers, 2);
  EXPECT_TRUE(t_all.same_counts(count(docs, 3, BoundaryPolicy::kSentenceMarkers)));
  auto t_sub = count_ngrams(corpus, subset, 3, BoundaryPolicy::kNone, 2);
  EXPECT_TRUE(t_sub.same_counts(count(picked, 3, BoundaryPolicy::kNone)));
}

TEST(CountTable, RoundTripsThroughText) {
  ca_test::CorpusSpec spec;
  spec.tokens = 2000;
  auto t = count(ca_test::synthetic_docs(spec), 3,
                 BoundaryPolicy::kSentenceMarkers);
  std::ostringstream out;
  write_count_table(t, out);
  std::istringstream in(out.str());
  auto back = read_count_table(in);
  EXPECT_EQ(back.max_order(), 3);
  EXPECT_EQ(back.boundary(), BoundaryPolicy::kSentenceMarkers);
  EXPECT_TRUE(back.same_counts(t));
  std::ostringstream again;
  write_count_table(back, again);
  EXPECT_EQ(again.str(), out.str());
}

TEST(CountTable, RejectsMalformedInput) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_count_table(in);
  };
  const std::string header = "corpus-affinity-counts v1 max_order=2 boundary=none\n";
  EXPECT_NO_THROW(parse(header + "1\t3\ta\n2\t1\ta b\n"));
  EXPECT_THROW(parse("garbage\n"), DataError);
  EXPECT_THROW(parse(header + "1\tx\ta\n"), DataError);
  EXPECT_THROW(parse(header + "3\t1\ta b c\n"), DataError);
  EXPECT_THROW(parse(header + "2\t1\ta\n"), DataError);
  EXPECT_THROW(parse(header + "1\t0\ta\n"), DataError);
  EXPECT_THROW(parse(header + "1\t1\ta\n1\t2\ta\n"), DataError);
  EXPECT_THROW(parse(header + "1 1 a\n"), DataError);
}

TEST(Distribution, FromWeightsValidates) {
  using W = std::vector<std::pair<std::string, double>>;
  auto d = Distribution::from_weights(W{{"b", 1}, {"a", 3}}, Pooling::kOrder1);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.probability("a"), 0.75);
  EXPECT_DOUBLE_EQ(d.probability("zz"), 0.0);
  EXPECT_EQ(d.weights().front().first, "a");
  EXPECT_THROW(Distribution::from_weights(W{}, Pooling::kOrder1),
               EmptyCorpusError);
  EXPECT_THROW(Distribution::from_weights(W{{"a", 0}}, Pooling::kOrder1),
               ArgumentError);
  EXPECT_THROW(Distribution::from_weights(W{{"a", -1}}, Pooling::kOrder1),
               ArgumentError);
  EXPECT_THROW(Distribution::from_weights(W{{"a", 1}, {"a", 2}}, Pooling::kOrder1),
               ArgumentError);
}

TEST(Distribution, FromTableSumsToOne) {
  auto t = count(kToy, 3, BoundaryPolicy::kNone);
  for (auto pooling : {Pooling::kOrder1, Pooling::kOrder2, Pooling::kOrder3,
                       Pooling::kPooled}) {
    auto d = to_distribution(t, pooling);
    double sum = 0;
    for (const auto& [term, w] : d.weights()) sum += d.probability(term);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  auto pooled = to_distribution(t, Pooling::kPooled);
  EXPECT_EQ(pooled.size(), 3u + 3u + 3u);
  EXPECT_DOUBLE_EQ(pooled.total(), 15.0);
  EXPECT_DOUBLE_EQ(pooled.probability("a b a"), 2.0 / 15.0);
}

TEST(Distribution, TableErrors) {
  auto marked = count(kToy, 3, BoundaryPolicy::kSentenceMarkers);
  EXPECT_THROW(to_distribution(marked, Pooling::kOrder1), ArgumentError);
  auto short_docs = count(Docs{{"a"}, {"b"}}, 3, BoundaryPolicy::kNone);
  EXPECT_THROW(to_distribution(short_docs, Pooling::kOrder3), EmptyCorpusError);
  auto bigram_table = count(kToy, 2, BoundaryPolicy::kNone);
  EXPECT_THROW(to_distribution(bigram_table, Pooling::kOrder3), ArgumentError);
}

TEST(Distribution, TopK) {
  auto t = count(kToy, 1, BoundaryPolicy::kNone);
  auto d = truncate_top_k(to_distribution(t, Pooling::kOrder1), 2);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.probability("a"), 0.6);
  EXPECT_DOUBLE_EQ(d.probability("b"), 0.4);
  EXPECT_THROW(truncate_top_k(d, 0), ArgumentError);
}

TEST(Names, RoundTrip) {
  for (auto p : {Pooling::kOrder1, Pooling::kOrder2, Pooling::kOrder3,
                 Pooling::kPooled})
    EXPECT_EQ(parse_pooling(pooling_name(p)), p);
  EXPECT_EQ(parse_boundary("markers"), BoundaryPolicy::kSentenceMarkers);
  EXPECT_EQ(parse_boundary(boundary_name(BoundaryPolicy::kNone)),
            BoundaryPolicy::kNone);
  EXPECT_THROW(parse_pooling("4"), ArgumentError);
}

}  // namespace
}  // namespace corpus_affinity
