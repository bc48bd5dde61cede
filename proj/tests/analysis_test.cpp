// analysis_test.cpp
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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "corpus_affinity/analysis.hpp"
#include "corpus_affinity/errors.hpp"

namespace corpus_affinity {
namespace {

// Published per-task means, transcribed by hand; columns follow kModels.
const char* const kModels[] = {"BERT", "Bio", "Clinical", "Sci", "Twitter", "Forum"};
struct PublishedRow {
  const char* task;
  double score[6];
};
const PublishedRow kPublished[] = {
    {"Airline", {80.5, 79.0, 78.8, 78.8, 80.8, 81.6}},
    {"BTC", {78.0, 75.2, 76.9, 77.4, 79.0, 77.0}},
    {"SMM4H-18-task3", {76.5, 75.4, 75.6, 75.4, 77.0, 77.2}},
    {"SMM4H-18-task4", {89.4, 87.7, 88.1, 88.7, 90.3, 91.1}},
    {"CADEC", {71.9, 72.1, 72.1, 73.2, 72.1, 72.9}},
    {"SemEval-14-laptop", {81.1, 79.3, 78.5, 81.6, 81.3, 81.4}},
    {"SemEval-14-restaurant", {87.5, 84.9, 85.5, 86.7, 87.4, 89.3}},
    {"SST-2", {92.4, 91.1, 90.4, 91.4, 92.3, 93.4}},
    {"EBM", {41.5, 42.1, 41.1, 42.4, 40.5, 41.5}},
    {"i2b2-10", {85.8, 87.4, 87.4, 87.3, 84.8, 85.2}},
    {"JNLPBA", {72.5, 74.2, 71.9, 73.6, 72.2, 72.5}},
    {"Paper-Field", {74.5, 74.3, 73.3, 75.1, 74.1, 73.3}},
};

const DeltaPoint& find_point(const std::vector<DeltaPoint>& pts,
                             const std::string& task, const std::string& model,
                             int repeat = 0) {
  for (const auto& p : pts)
    if (p.task == task && p.model == model && p.repeat == repeat) return p;
  throw std::runtime_error("missing point " + task + "/" + model);
}

TEST(ResultsTable, BundledMeansMatchPublishedTable) {
  auto t = ResultsTable::bundled_task_means();
  EXPECT_EQ(t.rows().size(), 72u);
  EXPECT_EQ(t.tasks().size(), 12u);
  ASSERT_EQ(t.models().size(), 6u);
  for (const auto& row : kPublished)
    for (int m = 0; m < 6; ++m) {
      bool found = false;
      for (const auto& r : t.rows())
        if (r.task == row.task && r.model == kModels[m]) {
          EXPECT_EQ(r.score, row.score[m]) << row.task << "/" << kModels[m];
          found = true;
        }
      EXPECT_TRUE(found) << row.task << "/" << kModels[m];
    }
}

TEST(Deltas, SixtyPointsAgainstBertBaseline) {
  auto pts = compute_deltas(ResultsTable::bundled_task_means(), "BERT");
  ASSERT_EQ(pts.size(), 60u);
  for (const auto& row : kPublished)
    for (int m = 1; m < 6; ++m)
      EXPECT_NEAR(find_point(pts, row.task, kModels[m]).delta,
                  row.score[m] - row.score[0], 1e-9);
  EXPECT_NEAR(find_point(pts, "BTC", "Twitter").delta, 1.0, 1e-9);
  // The table's own means give -2.8 for this pair.
  EXPECT_EQ(std::round(find_point(pts, "BTC", "Bio").delta * 10) / 10, -2.8);
}

TEST(Deltas, FiveRepeatsGiveThreeHundredPoints) {
  ResultsTable t;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (const auto& row : kPublished)
    for (int m = 0; m < 6; ++m)
      for (int rep = 0; rep < 5; ++rep)
        t.add({row.task, kModels[m], rep, row.score[m] + noise(rng)});
  auto pts = compute_deltas(t, "BERT");
  EXPECT_EQ(pts.size(), 300u);
  // Each delta is taken against the baseline's mean over its repeats.
  double base = 0;
  for (const auto& r : t.rows())
    if (r.task == "EBM" && r.model == "BERT") base += r.score;
  base /= 5;
  for (const auto& r : t.rows())
    if (r.task == "EBM" && r.model == "Sci") {
      EXPECT_DOUBLE_EQ(find_point(pts, "EBM", "Sci", r.repeat).delta, r.score - base);
    }
}

TEST(Deltas, MissingBaselineAndDuplicatesAreErrors) {
  ResultsTable t;
  t.add({"A", "BERT", 0, 1.0});
  t.add({"A", "X", 0, 2.0});
  t.add({"B", "X", 0, 2.0});
  try {
    compute_deltas(t, "BERT");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("\"B\""), std::string::npos);
  }
  EXPECT_THROW(t.add({"A", "X", 0, 3.0}), DataError);
  auto csv = deltas_to_csv(compute_deltas(ResultsTable::parse_csv(
      "task,model,repeat,score\nA,BERT,0,1\nA,X,0,2.5\n", "t"), "BERT"));
  EXPECT_EQ(csv, "task,model,repeat,delta\nA,X,0,1.5\n");
}

TEST(ResultsTable, CsvErrors) {
  EXPECT_THROW(ResultsTable::parse_csv("a,b\n", "t"), DataError);
  EXPECT_THROW(ResultsTable::parse_csv("task,model,repeat,score\nA,B,0\n", "t"),
               DataError);
  EXPECT_THROW(ResultsTable::parse_csv("task,model,repeat,score\nA,B,x,1\n", "t"),
               DataError);
  EXPECT_THROW(ResultsTable::parse_csv("task,model,repeat,score\nA,B,0,nan\n", "t"),
               DataError);
  auto t = ResultsTable::parse_csv(
      "\xEF\xBB\xBFtask,model,repeat,score\r\nA,B,0,1\r\n", "t");
  EXPECT_EQ(t.rows().size(), 1u);
  EXPECT_THROW(SimilarityTable::parse_csv(
                   "source,target,measure,value\ns,t,jsd_pooled,0.1\n"
                   "s,t,jsd_pooled,0.2\n", "s"),
               DataError);
  EXPECT_THROW(SimilarityTable::parse_csv(
                   "source,target,measure,value\ns,t,cosine,0.1\n", "s"),
               DataError);
}

TEST(Similarities, AttachUsesCorpusMappings) {
  auto t = ResultsTable::parse_csv(
      "task,model,repeat,score\nA,BERT,0,1\nA,Bio,0,2\n", "t");
  t.map_task("A", "target_a");
  t.map_model("Bio", "pubmed");
  auto sims = SimilarityTable::parse_csv(
      "source,target,measure,value\npubmed,target_a,jsd_pooled,0.4\n"
      "pubmed,target_a,ppl,120\n", "s");
  EXPECT_EQ(sims.size(), 2u);
  auto pts = compute_deltas(t, "BERT");
  attach_similarities(pts, t, sims);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].similarity.at(Measure::kJsdPooled), 0.4);
  EXPECT_EQ(pts[0].similarity.at(Measure::kPpl), 120.0);
  EXPECT_FALSE(pts[0].similarity.contains(Measure::kTvc));
  auto again = SimilarityTable::parse_csv(sims.to_csv(), "round trip");
  EXPECT_EQ(again.to_csv(), sims.to_csv());
}

TEST(Pearson, ExactValues) {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> up{2, 4, 6, 8, 10};
  std::vector<double> down{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(pearson_r(x, up), 1.0);
  EXPECT_DOUBLE_EQ(pearson_r(x, down), -1.0);
  // Hand value: cov 8/5, var 2 and 2, r = 0.8.
  std::vector<double> y{1, 3, 2, 5, 4};
  EXPECT_NEAR(pearson_r(x, y), 0.8, 1e-15);
  std::vector<double> two_a{0, 1};
  std::vector<double> two_b{3, -7};
  EXPECT_DOUBLE_EQ(pearson_r(two_a, two_b), -1.0);
}

TEST(Pearson, InvarianceAndAntisymmetry) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(50);
    std::vector<double> y(50);
    for (int i = 0; i < 50; ++i) {
      x[i] = g(rng);
      y[i] = 0.3 * x[i] + g(rng);
    }
    const double r = pearson_r(x, y);
    std::vector<double> scaled(x);
    std::vector<double> negated(x);
    for (int i = 0; i < 50; ++i) {
      scaled[i] = 3.7 * x[i] - 12.5;
      negated[i] = -x[i];
    }
    EXPECT_NEAR(pearson_r(scaled, y), r, 1e-12);
    EXPECT_EQ(pearson_r(negated, y), -r);
    EXPECT_EQ(pearson_r(y, x), r);
    EXPECT_LE(std::abs(r), 1.0);
  }
}

TEST(Pearson, Errors) {
  std::vector<double> a{1, 2, 3};
  std::vector<double> b{1, 2};
  std::vector<double> c{4, 4, 4};
  std::vector<double> one{1};
  EXPECT_THROW(pearson_r(a, b), ArgumentError);
  EXPECT_THROW(pearson_r(one, one), ArgumentError);
  EXPECT_THROW(pearson_r(a, c), UndefinedCorrelationError);
  EXPECT_THROW(pearson_r(c, a), UndefinedCorrelationError);
}

std::vector<DeltaPoint> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<DeltaPoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i].task = "t" + std::to_string(i);
    pts[i].model = "m";
    pts[i].delta = 4 * u(rng) - 2;
    pts[i].similarity[Measure::kPpl] = 50 + 500 * u(rng);
    pts[i].similarity[Measure::kJsdPooled] = u(rng);
    pts[i].similarity[Measure::kJsd2] = u(rng);
    pts[i].similarity[Measure::kTvc] = u(rng);
    pts[i].similarity[Measure::kTtr] = u(rng);
  }
  return pts;
}

TEST(Correlation, MatrixIsSymmetricWithUnitDiagonal) {
  auto pts = random_points(40, 2);
  auto rep = correlation_matrix(pts, Directionality::kSimilarity);
  ASSERT_EQ(rep.variables,
            (std::vector<std::string>{"delta", "ppl_sim", "jsd_sim", "tvc", "ttr"}));
  EXPECT_EQ(rep.n_points, 40u);
  EXPECT_TRUE(rep.warnings.empty());
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(rep.r[i][i], 1.0);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(rep.r[i][j], rep.r[j][i]);
  }
  std::vector<double> d;
  std::vector<double> jsd_sim;
  for (const auto& p : pts) {
    d.push_back(p.delta);
    jsd_sim.push_back(1 - p.similarity.at(Measure::kJsdPooled));
  }
  EXPECT_EQ(*rep.at("delta", "jsd_sim"), pearson_r(d, jsd_sim));
}

TEST(Correlation, DirectionalityFlipsDistanceColumns) {
  auto pts = random_points(60, 3);
  auto raw = correlation_matrix(pts, Directionality::kRaw);
  auto sim = correlation_matrix(pts, Directionality::kSimilarity);
  EXPECT_NEAR(*sim.at("delta", "jsd_sim"), -*raw.at("delta", "jsd"), 1e-12);
  EXPECT_EQ(*sim.at("delta", "tvc"), *raw.at("delta", "tvc"));
  EXPECT_EQ(*sim.at("delta", "ttr"), *raw.at("delta", "ttr"));
  // -ln is monotone but not affine, so only the sign relation is guaranteed
  // for strongly correlated inputs.
  for (auto& p : pts) p.similarity[Measure::kPpl] = std::exp(-p.delta);
  sim = correlation_matrix(pts, Directionality::kSimilarity);
  raw = correlation_matrix(pts, Directionality::kRaw);
  EXPECT_NEAR(*sim.at("delta", "ppl_sim"), 1.0, 1e-12);
  EXPECT_LT(*raw.at("delta", "ppl"), -0.9);
  EXPECT_DOUBLE_EQ(similarity_oriented(Measure::kPpl, std::exp(2.0)), -2.0);
  EXPECT_EQ(similarity_oriented(Measure::kJsd3, 0.25), 0.75);
  EXPECT_EQ(similarity_oriented(Measure::kTvc, 0.25), 0.25);
}

TEST(Correlation, AlternateJsdColumn) {
  auto pts = random_points(30, 4);
  auto a = correlation_matrix(pts, Directionality::kRaw, Measure::kJsd2);
  std::vector<double> d;
  std::vector<double> j2;
  for (const auto& p : pts) {
    d.push_back(p.delta);
    j2.push_back(p.similarity.at(Measure::kJsd2));
  }
  EXPECT_EQ(*a.at("delta", "jsd"), pearson_r(d, j2));
}

TEST(Correlation, MissingAndConstantColumns) {
  auto pts = random_points(20, 5);
  for (auto& p : pts) {
    p.similarity.erase(Measure::kTtr);
    p.similarity[Measure::kTvc] = 0.5;
  }
  auto rep = correlation_matrix(pts, Directionality::kSimilarity);
  EXPECT_EQ(rep.warnings.size(), 2u);
  EXPECT_FALSE(rep.at("delta", "ttr").has_value());
  EXPECT_FALSE(rep.at("ttr", "ttr").has_value());
  EXPECT_FALSE(rep.at("tvc", "ppl_sim").has_value());
  EXPECT_TRUE(rep.at("delta", "ppl_sim").has_value());
  auto csv = report_to_csv(rep);
  EXPECT_NE(csv.find("delta,ttr,,20\n"), std::string::npos);
  auto j = report_to_json(rep);
  EXPECT_TRUE(j["matrix"][0][4].is_null());
  EXPECT_EQ(j["direction"], "similarity");

  pts[3].similarity.erase(Measure::kPpl);
  EXPECT_THROW(correlation_matrix(pts, Directionality::kRaw), DataError);
  std::vector<DeltaPoint> one(1);
  EXPECT_THROW(correlation_matrix(one, Directionality::kRaw), ArgumentError);
  EXPECT_THROW(rep.at("delta", "bleu"), ArgumentError);
}

TEST(Correlation, IndependentInputsStayNearZero) {
  double total = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    auto rep = correlation_matrix(random_points(300, 100 + t),
                                  Directionality::kSimilarity);
    total += std::abs(*rep.at("delta", "jsd_sim"));
  }
  EXPECT_LT(total / trials, 0.2);
}

SimilarityProfile profile(const std::string& source, double ppl, double jsd,
                          double tvc, double ttr,
                          const std::string& target = "T") {
  SimilarityProfile p;
  p.source_id = source;
  p.target_id = target;
  auto put = [&](Measure m, double v) {
    p.measures.emplace_back(m, MeasureSummary::of({v}));
  };
  put(Measure::kPpl, ppl);
  put(Measure::kJsdPooled, jsd);
  put(Measure::kJsd1, jsd);
  put(Measure::kJsd2, jsd);
  put(Measure::kJsd3, jsd);
  put(Measure::kTvc, tvc);
  put(Measure::kTtr, ttr);
  return p;
}

std::vector<std::string> ids(const std::vector<RankedSource>& r) {
  std::vector<std::string> out;
  for (const auto& s : r) out.push_back(s.source_id);
  return out;
}

TEST(Ranking, SingleKeysOrderBySimilarity) {
  std::vector<SimilarityProfile> ps{profile("a", 300, 0.6, 0.2, 0.1),
                                    profile("b", 100, 0.4, 0.5, 0.9),
                                    profile("c", 200, 0.5, 0.9, 0.5)};
  EXPECT_EQ(ids(rank_sources(ps, RankKey::kPpl)),
            (std::vector<std::string>{"b", "c", "a"}));
  EXPECT_EQ(ids(rank_sources(ps, RankKey::kJsd)),
            (std::vector<std::string>{"b", "c", "a"}));
  EXPECT_EQ(ids(rank_sources(ps, RankKey::kTvc)),
            (std::vector<std::string>{"c", "b", "a"}));
  auto jsd = rank_sources(ps, RankKey::kJsd);
  EXPECT_DOUBLE_EQ(jsd[0].score, 0.6);
  auto ppl = rank_sources(ps, RankKey::kPpl);
  EXPECT_DOUBLE_EQ(ppl[0].score, -std::log(100.0));
}

TEST(Ranking, CompositeUsesMeanRanks) {
  std::vector<SimilarityProfile> ps{profile("a", 300, 0.6, 0.2, 0.1),
                                    profile("b", 100, 0.4, 0.5, 0.9),
                                    profile("c", 200, 0.5, 0.9, 0.5)};
  auto r = rank_sources(ps, RankKey::kComposite);
  EXPECT_EQ(ids(r), (std::vector<std::string>{"b", "c", "a"}));
  EXPECT_DOUBLE_EQ(r[0].score, 4.0 / 3);
  EXPECT_DOUBLE_EQ(r[1].score, 5.0 / 3);
  EXPECT_DOUBLE_EQ(r[2].score, 3.0);
  // Changing only ttr never moves a source.
  ps[0] = profile("a", 300, 0.6, 0.2, 0.99);
  ps[1] = profile("b", 100, 0.4, 0.5, 0.0);
  for (RankKey k : {RankKey::kPpl, RankKey::kJsd, RankKey::kTvc, RankKey::kComposite})
    EXPECT_EQ(ids(rank_sources(ps, k))[0], k == RankKey::kTvc ? "c" : "b");
  auto j = ranking_to_json(ps, r, RankKey::kComposite);
  EXPECT_EQ(j["key"], "composite");
}

TEST(Ranking, TiesBreakById) {
  std::vector<SimilarityProfile> ps{profile("z", 100, 0.4, 0.5, 0.1),
                                    profile("m", 100, 0.4, 0.5, 0.2),
                                    profile("a", 100, 0.4, 0.5, 0.3)};
  for (RankKey k : {RankKey::kPpl, RankKey::kJsd, RankKey::kTvc, RankKey::kComposite})
    EXPECT_EQ(ids(rank_sources(ps, k)), (std::vector<std::string>{"a", "m", "z"}));
  // Average ranks: a and m tie on every measure.
  std::vector<SimilarityProfile> qs{profile("m", 100, 0.4, 0.5, 0),
                                    profile("a", 100, 0.4, 0.5, 0),
                                    profile("b", 200, 0.6, 0.1, 0)};
  auto r = rank_sources(qs, RankKey::kComposite);
  EXPECT_EQ(ids(r), (std::vector<std::string>{"a", "m", "b"}));
  EXPECT_DOUBLE_EQ(r[0].score, 1.5);
  EXPECT_DOUBLE_EQ(r[2].score, 3.0);
}

TEST(Ranking, Errors) {
  std::vector<SimilarityProfile> none;
  EXPECT_THROW(rank_sources(none, RankKey::kPpl), ArgumentError);
  std::vector<SimilarityProfile> mixed{profile("a", 1, 0, 0, 0, "T"),
                                       profile("b", 1, 0, 0, 0, "U")};
  EXPECT_THROW(rank_sources(mixed, RankKey::kPpl), ArgumentError);
  std::vector<SimilarityProfile> dup{profile("a", 1, 0, 0, 0),
                                     profile("a", 2, 0, 0, 0)};
  EXPECT_THROW(rank_sources(dup, RankKey::kPpl), ArgumentError);
  EXPECT_THROW(parse_rank_key("ttr"), ArgumentError);
  EXPECT_EQ(parse_rank_key("composite"), RankKey::kComposite);
}

}  // namespace
}  // namespace corpus_affinity
