// kneser_ney.cpp
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

#include "corpus_affinity/kneser_ney.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "corpus_affinity/errors.hpp"
#include "corpus_affinity/io.hpp"
#include "corpus_affinity/parallel.hpp"

namespace corpus_affinity {
namespace {

constexpr std::string_view kSidecarFormat = "corpus-affinity-kn v1";

double band_discount(const DiscountBands& d, std::uint64_t adjusted) {
  if (adjusted == 0) return 0.0;
  return d[std::min<std::uint64_t>(adjusted, 3) - 1];
}

NgramKey bigram_key(WordId a, WordId b) {
  NgramKey k;
  k.words[0] = a;
  k.words[1] = b;
  return k;
}

NgramKey trigram_key(WordId a, WordId b, WordId c) {
  NgramKey k;
  k.words[0] = a;
  k.words[1] = b;
  k.words[2] = c;
  return k;
}

// Adjusted-count total of one context and how many of its extensions fall
// in each discount band. Integer tallies keep the interpolation weight
// independent of hash-map iteration order.
struct ContextMass {
  std::uint64_t adjusted_total = 0;
  std::array<std::uint64_t, 3> band_counts{};

  void add(std::uint64_t adjusted) {
    adjusted_total += adjusted;
    if (adjusted > 0) ++band_counts[std::min<std::uint64_t>(adjusted, 3) - 1];
  }
  double backoff(const DiscountBands& d) const {
    double mass = d[0] * static_cast<double>(band_counts[0]) +
                  d[1] * static_cast<double>(band_counts[1]) +
                  d[2] * static_cast<double>(band_counts[2]);
    return mass / static_cast<double>(adjusted_total);
  }
};

std::string_view discount_mode_name(DiscountMode mode) {
  return mode == DiscountMode::kFixed ? "fixed" : "count-of-counts";
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(where + ": cannot parse number \"" + std::string(s) + "\"");
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::optional<DiscountBands> estimate_discounts(
    const std::array<std::uint64_t, 4>& n) {
  if (n[0] == 0 || n[1] == 0 || n[2] == 0) return std::nullopt;
  double n1 = static_cast<double>(n[0]);
  double n2 = static_cast<double>(n[1]);
  double n3 = static_cast<double>(n[2]);
  double n4 = static_cast<double>(n[3]);
  double y = n1 / (n1 + 2.0 * n2);
  DiscountBands d{1.0 - 2.0 * y * n2 / n1, 2.0 - 3.0 * y * n3 / n2,
                  3.0 - 4.0 * y * n4 / n3};
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = std::clamp(d[k], 0.0, static_cast<double>(k + 1));
  return d;
}

void KneserNeyModel::resize_unigrams(std::size_t n) {
  in_vocab_.assign(n, 0);
  unigram_log10_.assign(n, 0.0);
  unigram_backoff_.assign(n, 0.0);
}

double KneserNeyModel::log10_prob(WordId u, WordId v, WordId word) const {
  double backoff = 0.0;
  if (u != kNoWord && v != kNoWord) {
    auto tri = trigrams_.find(trigram_key(u, v, word));
    if (tri != trigrams_.end()) return tri->second;
    auto ctx = bigrams_.find(bigram_key(u, v));
    if (ctx != bigrams_.end()) backoff += ctx->second.log10_backoff;
  }
  if (v != kNoWord) {
    auto bi = bigrams_.find(bigram_key(v, word));
    if (bi != bigrams_.end()) return backoff + bi->second.log10_prob;
    backoff += unigram_backoff_[v];
  }
  return backoff + unigram_log10_[word];
}

WordId KneserNeyModel::lookup(std::string_view word) const {
  auto id = vocab_->find(word);
  return id ? map_word(*id) : kUnkId;
}

double KneserNeyModel::probability(std::span<const std::string> context,
                                   std::string_view word) const {
  if (context.size() > 2)
    context = context.subspan(context.size() - 2);
  WordId u = kNoWord;
  WordId v = kNoWord;
  if (context.size() == 2) {
    u = lookup(context[0]);
    v = lookup(context[1]);
  } else if (context.size() == 1) {
    v = lookup(context[0]);
  }
  return std::pow(10.0, log10_prob(u, v, lookup(word)));
}

std::vector<WordId> KneserNeyModel::predictable_words() const {
  std::vector<WordId> words;
  for (WordId id = 0; id < in_vocab_.size(); ++id)
    if (in_vocab_[id] && id != kBosId) words.push_back(id);
  return words;
}

std::size_t KneserNeyModel::num_ngrams(int order) const {
  if (order == 1)
    return static_cast<std::size_t>(
        std::count(in_vocab_.begin(), in_vocab_.end(), 1));
  return order == 2 ? bigrams_.size() : trigrams_.size();
}

bool operator==(const KneserNeyModel& a, const KneserNeyModel& b) {
  if (a.vocab_ != b.vocab_) return false;
  return a.in_vocab_ == b.in_vocab_ && a.unigram_log10_ == b.unigram_log10_ &&
         a.unigram_backoff_ == b.unigram_backoff_ && a.bigrams_ == b.bigrams_ &&
         a.trigrams_ == b.trigrams_ && a.discounts_ == b.discounts_ &&
         a.fingerprint_ == b.fingerprint_;
}

KneserNeyModel train_kn(const NgramTable& table, const KnConfig& config,
                        std::string tokenizer_fingerprint) {
  if (table.max_order() != 3 ||
      table.boundary() != BoundaryPolicy::kSentenceMarkers)
    throw ArgumentError(
        "Kneser-Ney training needs a max_order=3 table counted with "
        "sentence markers");
  if (table.total(1) == 0 || table.total(2) == 0 || table.total(3) == 0)
    throw EmptyCorpusError("cannot train a language model on an empty table");
  if (config.discount_mode == DiscountMode::kFixed &&
      !(config.fixed_discount >= 0.0 && config.fixed_discount < 1.0))
    throw ArgumentError("fixed discount must lie in [0, 1)");
  if (config.min_count < 1) throw ArgumentError("min_count must be >= 1");

  const std::uint64_t min_count = config.min_count;
  const NgramKey bos_bos = bigram_key(kBosId, kBosId);

  KneserNeyModel model;
  model.vocab_ = table.shared_vocabulary();
  model.discount_mode_ = config.discount_mode;
  model.min_count_ = min_count;
  model.fingerprint_ = std::move(tokenizer_fingerprint);
  const std::size_t vocab_size = model.vocab_->size();
  model.resize_unigrams(vocab_size);

  // Adjusted bigram counts. Bigrams after <s> keep raw counts; the others
  // count distinct left extensions among the kept trigrams.
  std::unordered_map<NgramKey, std::uint64_t, NgramKeyHash> bigram_adjusted;
  bigram_adjusted.reserve(table.size(2));
  for (const auto& [key, c] : table.counts(2)) {
    if (c < min_count) continue;
    bigram_adjusted.emplace(key, key.words[0] == kBosId ? c : 0);
  }
  for (const auto& [key, c] : table.counts(3)) {
    if (c < min_count || key.words[1] == kBosId) continue;
    auto it = bigram_adjusted.find(bigram_key(key.words[1], key.words[2]));
    if (it != bigram_adjusted.end()) ++it->second;
  }

  // Adjusted unigram counts: distinct left contexts among kept bigrams.
  std::vector<std::uint64_t> unigram_adjusted(vocab_size, 0);
  for (const auto& [key, c] : table.counts(1)) model.in_vocab_[key.words[0]] = 1;
  model.in_vocab_[kEosId] = 1;
  model.in_vocab_[kUnkId] = 1;
  model.in_vocab_[kBosId] = 1;
  for (const auto& [key, adjusted] : bigram_adjusted) {
    if (key == bos_bos) continue;
    ++unigram_adjusted[key.words[1]];
  }

  // Counts of counts and discounts per order.
  std::array<std::array<std::uint64_t, 4>, 3> coc{};
  auto tally = [&](int order, std::uint64_t adjusted) {
    if (adjusted >= 1 && adjusted <= 4) ++coc[order - 1][adjusted - 1];
  };
  for (WordId w = 0; w < vocab_size; ++w) tally(1, unigram_adjusted[w]);
  for (const auto& [key, adjusted] : bigram_adjusted)
    if (!(key == bos_bos)) tally(2, adjusted);
  for (const auto& [key, c] : table.counts(3))
    if (c >= min_count) tally(3, c);

  for (int order = 1; order <= 3; ++order) {
    DiscountBands& d = model.discounts_[order - 1];
    if (config.discount_mode == DiscountMode::kFixed) {
      d.fill(config.fixed_discount);
      continue;
    }
    const auto& n = coc[order - 1];
    if (auto estimated = estimate_discounts(n)) {
      d = *estimated;
    } else {
      d.fill(0.5);
      model.warnings_.push_back(
          "order " + std::to_string(order) +
          ": degenerate counts-of-counts (n1=" + std::to_string(n[0]) +
          ", n2=" + std::to_string(n[1]) + ", n3=" + std::to_string(n[2]) +
          "); falling back to fixed discount 0.5");
    }
  }
  const DiscountBands& d1 = model.discounts_[0];
  const DiscountBands& d2 = model.discounts_[1];
  const DiscountBands& d3 = model.discounts_[2];

  // Unigrams: discounted continuation counts interpolated with the uniform
  // distribution over every predictable word, <unk> included.
  std::size_t num_predictable = 0;
  ContextMass root;
  for (WordId w = 0; w < vocab_size; ++w) {
    if (!model.in_vocab_[w] || w == kBosId) continue;
    ++num_predictable;
    root.add(unigram_adjusted[w]);
  }
  const double uniform_share = root.backoff(d1) / static_cast<double>(num_predictable);
  std::vector<double> unigram_prob(vocab_size, 0.0);
  for (WordId w = 0; w < vocab_size; ++w) {
    if (!model.in_vocab_[w] || w == kBosId) continue;
    double a = static_cast<double>(unigram_adjusted[w]);
    unigram_prob[w] =
        (a - band_discount(d1, unigram_adjusted[w])) / root.adjusted_total +
        uniform_share;
    model.unigram_log10_[w] = std::log10(unigram_prob[w]);
  }
  model.unigram_log10_[kBosId] = kArpaLog10Zero;

  // Bigrams.
  std::vector<ContextMass> bigram_ctx(vocab_size);
  for (const auto& [key, adjusted] : bigram_adjusted) {
    if (key == bos_bos) continue;
    bigram_ctx[key.words[0]].add(adjusted);
  }
  auto bigram_prob = [&](const NgramKey& key, std::uint64_t adjusted) {
    const auto& m = bigram_ctx[key.words[0]];
    double lower = unigram_prob[key.words[1]];
    if (m.adjusted_total == 0) return lower;
    return (static_cast<double>(adjusted) - band_discount(d2, adjusted)) /
               m.adjusted_total +
           m.backoff(d2) * lower;
  };
  std::unordered_map<NgramKey, double, NgramKeyHash> bigram_probs;
  bigram_probs.reserve(bigram_adjusted.size());
  model.bigrams_.reserve(bigram_adjusted.size());
  for (const auto& [key, adjusted] : bigram_adjusted) {
    if (key == bos_bos) {
      model.bigrams_[key].log10_prob = kArpaLog10Zero;
      continue;
    }
    double p = bigram_prob(key, adjusted);
    bigram_probs.emplace(key, p);
    model.bigrams_[key].log10_prob = std::log10(p);
  }
  for (WordId w = 0; w < vocab_size; ++w)
    if (bigram_ctx[w].adjusted_total > 0)
      model.unigram_backoff_[w] = std::log10(bigram_ctx[w].backoff(d2));

  // Trigrams.
  std::unordered_map<NgramKey, ContextMass, NgramKeyHash> trigram_ctx;
  for (const auto& [key, c] : table.counts(3)) {
    if (c < min_count) continue;
    trigram_ctx[bigram_key(key.words[0], key.words[1])].add(c);
  }
  model.trigrams_.reserve(table.size(3));
  for (const auto& [key, c] : table.counts(3)) {
    if (c < min_count) continue;
    const auto& m = trigram_ctx.at(bigram_key(key.words[0], key.words[1]));
    NgramKey suffix = bigram_key(key.words[1], key.words[2]);
    double lower;
    if (auto it = bigram_probs.find(suffix); it != bigram_probs.end()) {
      lower = it->second;
    } else {
      const auto& bm = bigram_ctx[key.words[1]];
      lower = unigram_prob[key.words[2]] *
              (bm.adjusted_total > 0 ? bm.backoff(d2) : 1.0);
    }
    double p = (static_cast<double>(c) - band_discount(d3, c)) /
                   m.adjusted_total +
               m.backoff(d3) * lower;
    model.trigrams_.emplace(key, std::log10(p));
  }
  for (const auto& [ctx, m] : trigram_ctx) {
    // Pruning keeps every trigram's prefix bigram, since c(u v) >= c(u v w).
    auto it = model.bigrams_.find(ctx);
    if (it == model.bigrams_.end())
      throw ArgumentError("trigram context \"" + table.text(ctx, 2) +
                          "\" has no bigram entry; table is inconsistent");
    it->second.log10_backoff = std::log10(m.backoff(d3));
  }
  return model;
}

void KneserNeyModel::write_arpa(std::ostream& out) const {
  struct Line {
    std::string text;
    double prob;
    std::optional<double> backoff;
  };
  std::array<std::vector<Line>, 3> lines;
  std::unordered_map<NgramKey, bool, NgramKeyHash> is_trigram_context;
  for (const auto& [key, p] : trigrams_)
    is_trigram_context[bigram_key(key.words[0], key.words[1])] = true;
  std::vector<std::uint8_t> is_bigram_context(in_vocab_.size(), 0);
  for (const auto& [key, e] : bigrams_)
    if (key.words[0] != kBosId || key.words[1] != kBosId)
      is_bigram_context[key.words[0]] = 1;

  for (WordId w = 0; w < in_vocab_.size(); ++w) {
    if (!in_vocab_[w]) continue;
    Line l{vocab_->word(w), unigram_log10_[w], std::nullopt};
    if (is_bigram_context[w]) l.backoff = unigram_backoff_[w];
    lines[0].push_back(std::move(l));
  }
  for (const auto& [key, e] : bigrams_) {
    Line l{vocab_->word(key.words[0]) + ' ' + vocab_->word(key.words[1]),
           e.log10_prob, std::nullopt};
    if (is_trigram_context.contains(key)) l.backoff = e.log10_backoff;
    lines[1].push_back(std::move(l));
  }
  for (const auto& [key, p] : trigrams_) {
    lines[2].push_back({vocab_->word(key.words[0]) + ' ' +
                            vocab_->word(key.words[1]) + ' ' +
                            vocab_->word(key.words[2]),
                        p, std::nullopt});
  }
  out << "\n\\data\\\n";
  for (int n = 0; n < 3; ++n)
    out << "ngram " << n + 1 << '=' << lines[n].size() << '\n';
  for (int n = 0; n < 3; ++n) {
    std::sort(lines[n].begin(), lines[n].end(),
              [](const Line& a, const Line& b) { return a.text < b.text; });
    out << "\n\\" << n + 1 << "-grams:\n";
    for (const auto& l : lines[n]) {
      out << format_double(l.prob) << '\t' << l.text;
      if (l.backoff) out << '\t' << format_double(*l.backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

nlohmann::ordered_json KneserNeyModel::sidecar() const {
  nlohmann::ordered_json j;
  j["format"] = kSidecarFormat;
  j["order"] = 3;
  j["discount_mode"] = discount_mode_name(discount_mode_);
  j["discounts"] = nlohmann::ordered_json::array();
  for (const auto& bands : discounts_)
    j["discounts"].push_back({bands[0], bands[1], bands[2]});
  j["min_count"] = min_count_;
  j["tokenizer_fingerprint"] = fingerprint_;
  j["boundary_policy"] = boundary_name(BoundaryPolicy::kSentenceMarkers);
  j["warnings"] = warnings_;
  return j;
}

KneserNeyModel KneserNeyModel::read_arpa(std::istream& in,
                                         const nlohmann::json& sidecar) {
  KneserNeyModel model;
  try {
    if (sidecar.at("format").get<std::string>() != kSidecarFormat)
      throw DataError("model sidecar: unsupported format");
    if (sidecar.at("boundary_policy").get<std::string>() !=
        boundary_name(BoundaryPolicy::kSentenceMarkers))
      throw DataError("model sidecar: unsupported boundary policy");
    model.fingerprint_ = sidecar.at("tokenizer_fingerprint").get<std::string>();
    model.discount_mode_ =
        sidecar.at("discount_mode").get<std::string>() == "fixed"
            ? DiscountMode::kFixed
            : DiscountMode::kCountOfCounts;
    model.min_count_ = sidecar.value("min_count", std::uint64_t{1});
    const auto& d = sidecar.at("discounts");
    for (std::size_t n = 0; n < 3; ++n)
      for (std::size_t k = 0; k < 3; ++k)
        model.discounts_[n][k] = d.at(n).at(k).get<double>();
    model.warnings_ =
        sidecar.value("warnings", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model sidecar: ") + e.what());
  }

  auto vocab = std::make_shared<Vocabulary>();
  struct Raw {
    std::vector<WordId> words;
    double prob;
    std::optional<double> backoff;
  };
  std::array<std::vector<Raw>, 3> entries;
  std::string line;
  std::size_t line_no = 0;
  int section = 0;  // 0 = header, 1..3 = n-gram sections, 4 = after \end\.
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string where = "ARPA line " + std::to_string(line_no);
    if (line.empty()) continue;
    if (line == "\\data\\") continue;
    if (line == "\\end\\") {
      section = 4;
      break;
    }
    if (line.size() == 9 && line[0] == '\\' && line.substr(2) == "-grams:") {
      section = line[1] - '0';
      if (section < 1 || section > 3)
        throw DataError(where + ": unsupported n-gram order");
      continue;
    }
    if (section == 0) continue;  // "ngram N=count" lines
    auto fields = split_ws(line);
    std::size_t n = static_cast<std::size_t>(section);
    if (fields.size() != n + 1 && fields.size() != n + 2)
      throw DataError(where + ": expected " + std::to_string(n + 1) + " or " +
                      std::to_string(n + 2) + " fields");
    Raw r;
    r.prob = parse_double(fields[0], where);
    for (std::size_t k = 0; k < n; ++k)
      r.words.push_back(vocab->intern(fields[1 + k]));
    if (fields.size() == n + 2) r.backoff = parse_double(fields[n + 1], where);
    entries[n - 1].push_back(std::move(r));
  }
  if (section != 4) throw DataError("ARPA file: missing \\end\\ marker");

  model.vocab_ = vocab;
  model.resize_unigrams(vocab->size());
  for (const auto& r : entries[0]) {
    WordId w = r.words[0];
    model.in_vocab_[w] = 1;
    model.unigram_log10_[w] = r.prob;
    model.unigram_backoff_[w] = r.backoff.value_or(0.0);
  }
  if (!model.in_vocab_[kUnkId] || !model.in_vocab_[kEosId])
    throw DataError("ARPA file: vocabulary must contain <unk> and </s>");
  model.in_vocab_[kBosId] = 1;
  if (entries[0].size() > 0 && model.unigram_log10_[kBosId] == 0.0)
    model.unigram_log10_[kBosId] = kArpaLog10Zero;
  for (const auto& r : entries[1]) {
    BigramEntry e{r.prob, r.backoff.value_or(0.0)};
    model.bigrams_[bigram_key(r.words[0], r.words[1])] = e;
  }
  for (const auto& r : entries[2])
    model.trigrams_[trigram_key(r.words[0], r.words[1], r.words[2])] = r.prob;
  return model;
}

namespace {

void check_fingerprint(const KneserNeyModel& model,
                       std::string_view tokenizer_fingerprint) {
  if (model.tokenizer_fingerprint() != tokenizer_fingerprint)
    throw ConfigError("tokenizer fingerprint mismatch: model was built with \"" +
                      model.tokenizer_fingerprint() +
                      "\" but the text was tokenized with \"" +
                      std::string(tokenizer_fingerprint) + "\"");
}

struct DocScore {
  double log_prob = 0.0;
  std::uint64_t oov = 0;
};

// `ids` are already model ids.
DocScore score_ids(const KneserNeyModel& model, std::span<const WordId> ids) {
  static const double kLn10 = std::numbers::ln10;
  DocScore s;
  WordId u = kBosId;
  WordId v = kBosId;
  double log10_sum = 0.0;
  for (WordId w : ids) {
    if (w == kUnkId) ++s.oov;
    log10_sum += model.log10_prob(u, v, w);
    u = v;
    v = w;
  }
  log10_sum += model.log10_prob(u, v, kEosId);
  s.log_prob = log10_sum * kLn10;
  return s;
}

PerplexityResult summarize(std::span<const DocScore> scores,
                           std::uint64_t tokens) {
  PerplexityResult r;
  for (const auto& s : scores) {
    r.total_log_prob += s.log_prob;
    r.oov_count += s.oov;
  }
  r.scored_token_count = tokens + scores.size();
  r.perplexity =
      std::exp(-r.total_log_prob / static_cast<double>(r.scored_token_count));
  return r;
}

}  // namespace

double sequence_log_prob(const KneserNeyModel& model, const TokenStream& doc,
                         std::string_view tokenizer_fingerprint) {
  check_fingerprint(model, tokenizer_fingerprint);
  std::vector<WordId> ids;
  ids.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) ids.push_back(model.lookup(t));
  return score_ids(model, ids).log_prob;
}

PerplexityResult perplexity(const KneserNeyModel& model,
                            std::span<const TokenStream> corpus,
                            std::string_view tokenizer_fingerprint,
                            int threads) {
  check_fingerprint(model, tokenizer_fingerprint);
  if (corpus.empty())
    throw EmptyCorpusError("perplexity of an empty corpus is undefined");
  std::vector<DocScore> scores(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    std::vector<WordId> ids;
    ids.reserve(corpus[i].tokens.size());
    for (const auto& t : corpus[i].tokens) ids.push_back(model.lookup(t));
    scores[i] = score_ids(model, ids);
  });
  std::uint64_t tokens = 0;
  for (const auto& d : corpus) tokens += d.tokens.size();
  return summarize(scores, tokens);
}

PerplexityResult perplexity(const KneserNeyModel& model,
                            const EncodedCorpus& corpus,
                            std::span<const std::size_t> docs,
                            std::string_view tokenizer_fingerprint,
                            int threads) {
  check_fingerprint(model, tokenizer_fingerprint);
  std::size_t n = docs.empty() ? corpus.num_documents() : docs.size();
  if (n == 0)
    throw EmptyCorpusError("perplexity of an empty corpus is undefined");

  const Vocabulary& cv = corpus.vocabulary();
  std::vector<WordId> remap(cv.size());
  const bool shared = corpus.shared_vocabulary() == model.shared_vocabulary();
  for (WordId id = 0; id < remap.size(); ++id)
    remap[id] = shared ? model.map_word(id) : model.lookup(cv.word(id));

  std::vector<DocScore> scores(n);
  std::vector<std::uint64_t> lengths(n);
  parallel_shards(n, threads, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<WordId> ids;
    for (std::size_t i = b; i < e; ++i) {
      auto doc = corpus.document(docs.empty() ? i : docs[i]);
      ids.clear();
      for (WordId w : doc) ids.push_back(remap[w]);
      scores[i] = score_ids(model, ids);
      lengths[i] = doc.size();
    }
  });
  std::uint64_t tokens = 0;
  for (auto l : lengths) tokens += l;
  return summarize(scores, tokens);
}

void save_model(const KneserNeyModel& model,
                const std::filesystem::path& path) {
  std::ostringstream arpa;
  model.write_arpa(arpa);
  std::filesystem::path sidecar = path;
  sidecar += ".json";
  write_file_atomic(sidecar, model.sidecar().dump(2) + "\n");
  write_file_atomic(path, arpa.str());
}

KneserNeyModel load_model(const std::filesystem::path& path) {
  std::filesystem::path sidecar_path = path;
  sidecar_path += ".json";
  if (!std::filesystem::exists(sidecar_path))
    throw ConfigError("model sidecar not found: " + sidecar_path.string());
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(read_file(sidecar_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("model sidecar " + sidecar_path.string() + ": " + e.what());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  return KneserNeyModel::read_arpa(in, sidecar);
}

}  // namespace corpus_affinity
