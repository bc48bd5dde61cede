// analysis.hpp
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
// Downstream results: improvement deltas over a baseline model, Pearson
// correlation against similarity measures, and source ranking.

#ifndef CORPUS_AFFINITY_ANALYSIS_HPP_
#define CORPUS_AFFINITY_ANALYSIS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpus_affinity/metrics.hpp"
#include "corpus_affinity/protocol.hpp"

namespace corpus_affinity {

struct ResultRow {
  std::string task;
  std::string model;
  int repeat = 0;
  double score = 0.0;  // percentage points
};

class ResultsTable {
 public:
  // Header "task,model,repeat,score".
  static ResultsTable parse_csv(std::string_view csv, std::string_view name);
  static ResultsTable load(const std::filesystem::path& path);
  // Per-task means of six pretrained models on twelve tasks.
  static ResultsTable bundled_task_means();

  void add(ResultRow row);
  const std::vector<ResultRow>& rows() const { return rows_; }

  // Distinct names in first-appearance order.
  std::vector<std::string> tasks() const;
  std::vector<std::string> models() const;

  // Corpus ids behind tasks (targets) and models (sources); identity when
  // unmapped.
  void map_task(std::string task, std::string target_id);
  void map_model(std::string model, std::string source_id);
  const std::string& target_for(const std::string& task) const;
  const std::string& source_for(const std::string& model) const;

 private:
  std::vector<ResultRow> rows_;
  std::map<std::tuple<std::string, std::string, int>, std::size_t> index_;
  std::map<std::string, std::string> task_targets_;
  std::map<std::string, std::string> model_sources_;
};

// "name,corpus_id" lines, optional header "name,corpus".
std::vector<std::pair<std::string, std::string>> read_mapping(
    const std::filesystem::path& path);

struct DeltaPoint {
  std::string task;
  std::string model;
  int repeat = 0;
  double delta = 0.0;
  std::map<Measure, double> similarity;
};

// One point per non-baseline row: score minus the baseline's mean on the
// same task.
std::vector<DeltaPoint> compute_deltas(const ResultsTable& results,
                                       std::string_view baseline_model);

// "task,model,repeat,delta"
std::string deltas_to_csv(std::span<const DeltaPoint> points);

// Mean similarity values keyed by (source, target, measure).
class SimilarityTable {
 public:
  // Header "source,target,measure,value".
  static SimilarityTable parse_csv(std::string_view csv, std::string_view name);
  static SimilarityTable load(const std::filesystem::path& path);
  static SimilarityTable from_profiles(std::span<const SimilarityProfile> p);

  void set(const std::string& source, const std::string& target, Measure m,
           double value);
  std::optional<double> get(const std::string& source,
                            const std::string& target, Measure m) const;
  std::size_t size() const { return values_.size(); }
  std::string to_csv() const;

 private:
  std::map<std::tuple<std::string, std::string, Measure>, double> values_;
};

void attach_similarities(std::vector<DeltaPoint>& points,
                         const ResultsTable& results,
                         const SimilarityTable& similarities);

// Errors: ArgumentError for mismatched lengths or fewer than two points,
// UndefinedCorrelationError when either input is constant.
double pearson_r(std::span<const double> x, std::span<const double> y);

enum class Directionality { kRaw, kSimilarity };

std::string_view directionality_name(Directionality d);
Directionality parse_directionality(std::string_view name);

// Similarity-oriented value: -ln(ppl), 1 - jsd; other measures unchanged.
double similarity_oriented(Measure m, double value);

struct CorrelationReport {
  Directionality direction = Directionality::kRaw;
  std::vector<std::string> variables;
  // Null where a column is missing or constant.
  std::vector<std::vector<std::optional<double>>> r;
  std::size_t n_points = 0;
  std::vector<std::string> warnings;

  std::optional<double> at(std::string_view a, std::string_view b) const;
};

// Variables delta, ppl, jsd, tvc, ttr; the jsd column uses `jsd_measure`.
CorrelationReport correlation_matrix(std::span<const DeltaPoint> points,
                                     Directionality direction,
                                     Measure jsd_measure = Measure::kJsdPooled);

nlohmann::ordered_json report_to_json(const CorrelationReport& report);
// "var_a,var_b,r,n"; null coefficients are left empty.
std::string report_to_csv(const CorrelationReport& report);

enum class RankKey { kPpl, kJsd, kTvc, kComposite };

std::string_view rank_key_name(RankKey key);
RankKey parse_rank_key(std::string_view name);

struct RankedSource {
  std::string source_id;
  // Similarity-oriented mean for a single measure; mean rank (1 = most
  // similar) for the composite key.
  double score = 0.0;
};

// Most similar first; ties go to the lexicographically smaller id.
std::vector<RankedSource> rank_sources(
    std::span<const SimilarityProfile> profiles, RankKey key);

nlohmann::ordered_json ranking_to_json(
    std::span<const SimilarityProfile> profiles,
    std::span<const RankedSource> ranking, RankKey key);

}  // namespace corpus_affinity

#endif  // CORPUS_AFFINITY_ANALYSIS_HPP_
