// analysis.cpp
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

#include "corpus_affinity/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "bundled_data.hpp"
#include "corpus_affinity/errors.hpp"
#include "corpus_affinity/io.hpp"

namespace corpus_affinity {

namespace {

std::string where(std::string_view name, std::size_t line) {
  return std::string(name) + ": line " + std::to_string(line) + ": ";
}

std::vector<std::string_view> data_fields(std::string_view line,
                                          std::size_t expected,
                                          std::string_view name,
                                          std::size_t line_no) {
  auto fields = split_csv_line(line);
  if (fields.size() != expected)
    throw DataError(where(name, line_no) + "expected " +
                    std::to_string(expected) + " fields, found " +
                    std::to_string(fields.size()));
  return fields;
}

void expect_header(const std::vector<std::string_view>& lines,
                   std::string_view header, std::string_view name) {
  if (lines.empty() || lines.front() != header)
    throw DataError(std::string(name) + ": expected header \"" +
                    std::string(header) + "\"");
}

}  // namespace

ResultsTable ResultsTable::parse_csv(std::string_view csv,
                                     std::string_view name) {
  auto lines = csv_lines(csv);
  expect_header(lines, "task,model,repeat,score", name);
  ResultsTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = data_fields(lines[i], 4, name, i + 1);
    ResultRow row;
    row.task = std::string(f[0]);
    row.model = std::string(f[1]);
    if (row.task.empty() || row.model.empty())
      throw DataError(where(name, i + 1) + "empty task or model");
    auto [ptr, ec] =
        std::from_chars(f[2].data(), f[2].data() + f[2].size(), row.repeat);
    if (ec != std::errc() || ptr != f[2].data() + f[2].size())
      throw DataError(where(name, i + 1) + "bad repeat \"" +
                      std::string(f[2]) + "\"");
    auto score = parse_double(f[3]);
    if (!score)
      throw DataError(where(name, i + 1) + "bad score \"" +
                      std::string(f[3]) + "\"");
    row.score = *score;
    try {
      table.add(std::move(row));
    } catch (const DataError& e) {
      throw DataError(where(name, i + 1) + e.what());
    }
  }
  return table;
}

ResultsTable ResultsTable::load(const std::filesystem::path& path) {
  return parse_csv(read_file(path), path.string());
}

ResultsTable ResultsTable::bundled_task_means() {
  return parse_csv(bundled::task_means_csv(), "builtin:task-means");
}

void ResultsTable::add(ResultRow row) {
  auto key = std::make_tuple(row.task, row.model, row.repeat);
  if (index_.contains(key))
    throw DataError("duplicate result for task \"" + row.task +
                    "\", model \"" + row.model + "\", repeat " +
                    std::to_string(row.repeat));
  index_.emplace(std::move(key), rows_.size());
  rows_.push_back(std::move(row));
}

namespace {

template <typename Get>
std::vector<std::string> distinct(const std::vector<ResultRow>& rows, Get get) {
  std::vector<std::string> out;
  for (const auto& r : rows)
    if (std::find(out.begin(), out.end(), get(r)) == out.end())
      out.push_back(get(r));
  return out;
}

}  // namespace

std::vector<std::string> ResultsTable::tasks() const {
  return distinct(rows_, [](const ResultRow& r) { return r.task; });
}

std::vector<std::string> ResultsTable::models() const {
  return distinct(rows_, [](const ResultRow& r) { return r.model; });
}

void ResultsTable::map_task(std::string task, std::string target_id) {
  task_targets_[std::move(task)] = std::move(target_id);
}

void ResultsTable::map_model(std::string model, std::string source_id) {
  model_sources_[std::move(model)] = std::move(source_id);
}

const std::string& ResultsTable::target_for(const std::string& task) const {
  auto it = task_targets_.find(task);
  return it == task_targets_.end() ? task : it->second;
}

const std::string& ResultsTable::source_for(const std::string& model) const {
  auto it = model_sources_.find(model);
  return it == model_sources_.end() ? model : it->second;
}

std::vector<std::pair<std::string, std::string>> read_mapping(
    const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const std::string name = path.string();
  auto lines = csv_lines(text);
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || (i == 0 && lines[i] == "name,corpus")) continue;
    auto f = data_fields(lines[i], 2, name, i + 1);
    if (f[0].empty() || f[1].empty())
      throw DataError(where(name, i + 1) + "empty name or corpus id");
    out.emplace_back(std::string(f[0]), std::string(f[1]));
  }
  return out;
}

std::vector<DeltaPoint> compute_deltas(const ResultsTable& results,
                                       std::string_view baseline_model) {
  std::map<std::string, std::pair<double, std::size_t>> baseline;
  for (const auto& row : results.rows()) {
    if (row.model != baseline_model) continue;
    auto& [sum, n] = baseline[row.task];
    sum += row.score;
    ++n;
  }
  std::vector<DeltaPoint> points;
  for (const auto& row : results.rows()) {
    auto it = baseline.find(row.task);
    if (it == baseline.end())
      throw DataError("task \"" + row.task + "\" has no results for baseline "
                      "model \"" + std::string(baseline_model) + "\"");
    if (row.model == baseline_model) continue;
    const auto& [sum, n] = it->second;
    double mean = n == 1 ? sum : sum / static_cast<double>(n);
    points.push_back({row.task, row.model, row.repeat, row.score - mean, {}});
  }
  return points;
}

std::string deltas_to_csv(std::span<const DeltaPoint> points) {
  std::ostringstream out;
  out << "task,model,repeat,delta\n";
  for (const auto& p : points)
    out << p.task << ',' << p.model << ',' << p.repeat << ','
        << format_double(p.delta) << '\n';
  return out.str();
}

SimilarityTable SimilarityTable::parse_csv(std::string_view csv,
                                           std::string_view name) {
  auto lines = csv_lines(csv);
  expect_header(lines, "source,target,measure,value", name);
  SimilarityTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = data_fields(lines[i], 4, name, i + 1);
    auto measure = parse_measure(f[2]);
    if (!measure)
      throw DataError(where(name, i + 1) + "unknown measure \"" +
                      std::string(f[2]) + "\"");
    auto value = parse_double(f[3]);
    if (!value)
      throw DataError(where(name, i + 1) + "bad value \"" +
                      std::string(f[3]) + "\"");
    std::string source(f[0]);
    std::string target(f[1]);
    if (table.get(source, target, *measure))
      throw DataError(where(name, i + 1) + "duplicate entry for " + source +
                      " -> " + target + " " + std::string(f[2]));
    table.set(source, target, *measure, *value);
  }
  return table;
}

SimilarityTable SimilarityTable::load(const std::filesystem::path& path) {
  return parse_csv(read_file(path), path.string());
}

SimilarityTable SimilarityTable::from_profiles(
    std::span<const SimilarityProfile> profiles) {
  SimilarityTable table;
  for (const auto& p : profiles)
    for (const auto& [m, s] : p.measures)
      table.set(p.source_id, p.target_id, m, s.mean);
  return table;
}

void SimilarityTable::set(const std::string& source, const std::string& target,
                          Measure m, double value) {
  values_[std::make_tuple(source, target, m)] = value;
}

std::optional<double> SimilarityTable::get(const std::string& source,
                                           const std::string& target,
                                           Measure m) const {
  auto it = values_.find(std::make_tuple(source, target, m));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string SimilarityTable::to_csv() const {
  std::ostringstream out;
  out << "source,target,measure,value\n";
  for (const auto& [key, v] : values_)
    out << std::get<0>(key) << ',' << std::get<1>(key) << ','
        << measure_name(std::get<2>(key)) << ',' << format_double(v) << '\n';
  return out.str();
}

void attach_similarities(std::vector<DeltaPoint>& points,
                         const ResultsTable& results,
                         const SimilarityTable& similarities) {
  for (auto& p : points) {
    const auto& source = results.source_for(p.model);
    const auto& target = results.target_for(p.task);
    for (Measure m : kAllMeasures)
      if (auto v = similarities.get(source, target, m)) p.similarity[m] = *v;
  }
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ArgumentError("pearson_r: inputs have different lengths (" +
                        std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()) + ")");
  if (x.size() < 2) throw ArgumentError("pearson_r: need at least two points");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(),
                       [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y))
    throw UndefinedCorrelationError("pearson_r: input has zero variance");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw UndefinedCorrelationError("pearson_r: input has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string_view directionality_name(Directionality d) {
  return d == Directionality::kRaw ? "raw" : "similarity";
}

Directionality parse_directionality(std::string_view name) {
  if (name == "raw") return Directionality::kRaw;
  if (name == "similarity") return Directionality::kSimilarity;
  throw ArgumentError("unknown direction \"" + std::string(name) +
                      "\" (expected raw or similarity)");
}

double similarity_oriented(Measure m, double value) {
  if (m == Measure::kPpl) {
    if (!(value > 0.0))
      throw DataError("perplexity must be positive, got " +
                      format_double(value));
    return -std::log(value);
  }
  if (measure_direction(m) == Direction::kLowerIsMoreSimilar)
    return 1.0 - value;
  return value;
}

std::optional<double> CorrelationReport::at(std::string_view a,
                                            std::string_view b) const {
  auto pos = [&](std::string_view v) {
    auto it = std::find(variables.begin(), variables.end(), v);
    if (it == variables.end())
      throw ArgumentError("correlation report has no variable " +
                          std::string(v));
    return static_cast<std::size_t>(it - variables.begin());
  };
  return r[pos(a)][pos(b)];
}

CorrelationReport correlation_matrix(std::span<const DeltaPoint> points,
                                     Directionality direction,
                                     Measure jsd_measure) {
  if (points.size() < 2)
    throw ArgumentError("correlation needs at least two data points");
  const bool sim = direction == Directionality::kSimilarity;
  const std::pair<const char*, Measure> measures[] = {
      {sim ? "ppl_sim" : "ppl", Measure::kPpl},
      {sim ? "jsd_sim" : "jsd", jsd_measure},
      {"tvc", Measure::kTvc},
      {"ttr", Measure::kTtr}};

  CorrelationReport report;
  report.direction = direction;
  report.n_points = points.size();
  report.variables.push_back("delta");
  std::vector<std::optional<std::vector<double>>> columns;
  std::vector<double> delta;
  for (const auto& p : points) delta.push_back(p.delta);
  columns.emplace_back(std::move(delta));

  for (const auto& [label, m] : measures) {
    report.variables.push_back(label);
    std::size_t present = 0;
    for (const auto& p : points) present += p.similarity.contains(m);
    if (present == 0) {
      report.warnings.push_back(std::string("no ") +
                                std::string(measure_name(m)) +
                                " values attached; column " + label +
                                " reported as null");
      columns.emplace_back(std::nullopt);
      continue;
    }
    std::vector<double> col;
    for (const auto& p : points) {
      auto it = p.similarity.find(m);
      if (it == p.similarity.end())
        throw DataError("no " + std::string(measure_name(m)) +
                        " value for task \"" + p.task + "\", model \"" +
                        p.model + "\"");
      col.push_back(sim ? similarity_oriented(m, it->second) : it->second);
    }
    columns.emplace_back(std::move(col));
  }

  const std::size_t v = report.variables.size();
  std::vector<bool> usable(v, false);
  for (std::size_t i = 0; i < v; ++i) {
    if (!columns[i]) continue;
    const auto& c = *columns[i];
    usable[i] = !std::all_of(c.begin(), c.end(),
                             [&](double e) { return e == c.front(); });
    if (!usable[i])
      report.warnings.push_back("column " + report.variables[i] +
                                " is constant; its correlations are null");
  }
  report.r.assign(v, std::vector<std::optional<double>>(v));
  for (std::size_t i = 0; i < v; ++i) {
    if (!usable[i]) continue;
    report.r[i][i] = 1.0;
    for (std::size_t j = i + 1; j < v; ++j) {
      if (!usable[j]) continue;
      double r = pearson_r(*columns[i], *columns[j]);
      report.r[i][j] = r;
      report.r[j][i] = r;
    }
  }
  return report;
}

nlohmann::ordered_json report_to_json(const CorrelationReport& report) {
  nlohmann::ordered_json j;
  j["direction"] = directionality_name(report.direction);
  j["n_points"] = report.n_points;
  j["variables"] = report.variables;
  nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
  for (const auto& row : report.r) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& r : row)
      out.push_back(r ? nlohmann::ordered_json(*r) : nlohmann::ordered_json());
    matrix.push_back(std::move(out));
  }
  j["matrix"] = std::move(matrix);
  j["warnings"] = report.warnings;
  return j;
}

std::string report_to_csv(const CorrelationReport& report) {
  std::ostringstream out;
  out << "var_a,var_b,r,n\n";
  for (std::size_t i = 0; i < report.variables.size(); ++i)
    for (std::size_t j = 0; j < report.variables.size(); ++j)
      out << report.variables[i] << ',' << report.variables[j] << ','
          << (report.r[i][j] ? format_double(*report.r[i][j]) : "") << ','
          << report.n_points << '\n';
  return out.str();
}

std::string_view rank_key_name(RankKey key) {
  switch (key) {
    case RankKey::kPpl: return "ppl";
    case RankKey::kJsd: return "jsd";
    case RankKey::kTvc: return "tvc";
    case RankKey::kComposite: break;
  }
  return "composite";
}

RankKey parse_rank_key(std::string_view name) {
  if (name == "ppl") return RankKey::kPpl;
  if (name == "jsd") return RankKey::kJsd;
  if (name == "tvc") return RankKey::kTvc;
  if (name == "composite") return RankKey::kComposite;
  throw ArgumentError("unknown rank key \"" + std::string(name) +
                      "\" (expected ppl, jsd, tvc or composite)");
}

namespace {

Measure key_measure(const SimilarityProfile& p, RankKey key) {
  switch (key) {
    case RankKey::kPpl: return Measure::kPpl;
    case RankKey::kTvc: return Measure::kTvc;
    default: return p.headline_jsd();
  }
}

std::vector<double> oriented_means(std::span<const SimilarityProfile> profiles,
                                   RankKey key) {
  std::vector<double> out;
  for (const auto& p : profiles) {
    Measure m = key_measure(p, key);
    out.push_back(similarity_oriented(m, p.measure(m).mean));
  }
  return out;
}

// 1 = most similar; tied values share their average rank.
std::vector<double> average_ranks(const std::vector<double>& similarity) {
  const std::size_t n = similarity.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return similarity[a] > similarity[b];
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && similarity[order[j]] == similarity[order[i]]) ++j;
    double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

}  // namespace

std::vector<RankedSource> rank_sources(
    std::span<const SimilarityProfile> profiles, RankKey key) {
  if (profiles.empty()) throw ArgumentError("rank: no profiles given");
  for (const auto& p : profiles) {
    if (p.target_id != profiles.front().target_id)
      throw ArgumentError("rank: profiles measure different targets (\"" +
                          profiles.front().target_id + "\" and \"" +
                          p.target_id + "\")");
    if (p.pooling != profiles.front().pooling)
      throw ArgumentError("rank: profiles use different jsd pooling modes");
  }
  for (std::size_t i = 0; i < profiles.size(); ++i)
    for (std::size_t j = i + 1; j < profiles.size(); ++j)
      if (profiles[i].source_id == profiles[j].source_id)
        throw ArgumentError("rank: duplicate source \"" +
                            profiles[i].source_id + "\"");

  std::vector<RankedSource> ranking;
  bool higher_first = true;
  if (key == RankKey::kComposite) {
    std::vector<double> total(profiles.size(), 0.0);
    for (RankKey k : {RankKey::kPpl, RankKey::kJsd, RankKey::kTvc}) {
      auto ranks = average_ranks(oriented_means(profiles, k));
      for (std::size_t i = 0; i < ranks.size(); ++i) total[i] += ranks[i];
    }
    for (std::size_t i = 0; i < profiles.size(); ++i)
      ranking.push_back({profiles[i].source_id, total[i] / 3.0});
    higher_first = false;
  } else {
    auto values = oriented_means(profiles, key);
    for (std::size_t i = 0; i < profiles.size(); ++i)
      ranking.push_back({profiles[i].source_id, values[i]});
  }
  std::sort(ranking.begin(), ranking.end(),
            [&](const RankedSource& a, const RankedSource& b) {
              if (a.score != b.score)
                return higher_first ? a.score > b.score : a.score < b.score;
              return a.source_id < b.source_id;
            });
  return ranking;
}

nlohmann::ordered_json ranking_to_json(
    std::span<const SimilarityProfile> profiles,
    std::span<const RankedSource> ranking, RankKey key) {
  nlohmann::ordered_json j;
  j["target"] = profiles.empty() ? "" : profiles.front().target_id;
  j["key"] = rank_key_name(key);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    nlohmann::ordered_json row;
    row["rank"] = i + 1;
    row["source"] = ranking[i].source_id;
    row["score"] = ranking[i].score;
    for (const auto& p : profiles) {
      if (p.source_id != ranking[i].source_id) continue;
      nlohmann::ordered_json means;
      for (const auto& [m, s] : p.measures)
        means[std::string(measure_name(m))] = s.mean;
      row["means"] = std::move(means);
    }
    rows.push_back(std::move(row));
  }
  j["ranking"] = std::move(rows);
  return j;
}

}  // namespace corpus_affinity
