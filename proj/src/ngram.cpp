// ngram.cpp
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

#include "corpus_affinity/ngram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "corpus_affinity/errors.hpp"
#include "corpus_affinity/parallel.hpp"

namespace corpus_affinity {
namespace {

void check_order(int max_order) {
  if (max_order < 1 || max_order > kMaxOrder)
    throw ArgumentError("n-gram order must be in [1, 3], got " +
                        std::to_string(max_order));
}

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(' ', start);
    if (end == std::string_view::npos) end = s.size();
    parts.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

// Counts every window of every order > 1 over an already padded sequence,
// and unigrams over [uni_begin, uni_end).
void count_sequence(std::span<const WordId> padded, std::size_t uni_begin,
                    std::size_t uni_end, int max_order, NgramTable& table) {
  for (std::size_t i = uni_begin; i < uni_end; ++i) {
    NgramKey key;
    key.words[0] = padded[i];
    table.add(1, key, 1);
  }
  for (int n = 2; n <= max_order; ++n) {
    if (padded.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      NgramKey key;
      for (int k = 0; k < n; ++k) key.words[k] = padded[i + k];
      table.add(n, key, 1);
    }
  }
}

}  // namespace

std::string_view boundary_name(BoundaryPolicy policy) {
  return policy == BoundaryPolicy::kNone ? "none" : "sentence-markers";
}

BoundaryPolicy parse_boundary(std::string_view name) {
  if (name == "none") return BoundaryPolicy::kNone;
  if (name == "sentence-markers" || name == "markers")
    return BoundaryPolicy::kSentenceMarkers;
  throw ArgumentError("unknown boundary policy: " + std::string(name));
}

NgramTable::NgramTable(int max_order, BoundaryPolicy boundary,
                       std::shared_ptr<const Vocabulary> vocab)
    : max_order_(max_order), boundary_(boundary), vocab_(std::move(vocab)) {
  check_order(max_order);
  if (!vocab_) vocab_ = std::make_shared<const Vocabulary>();
}

std::uint64_t NgramTable::count(std::string_view ngram) const {
  auto words = split_spaces(ngram);
  if (words.empty() || words.size() > static_cast<std::size_t>(max_order_))
    return 0;
  NgramKey key;
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto id = vocab_->find(words[i]);
    if (!id) return 0;
    key.words[i] = *id;
  }
  const auto& map = counts_[words.size() - 1];
  auto it = map.find(key);
  return it == map.end() ? 0 : it->second;
}

void NgramTable::add(int order, const NgramKey& key, std::uint64_t count) {
  if (count == 0) return;
  counts_[order - 1][key] += count;
  totals_[order - 1] += count;
}

std::vector<std::pair<NgramKey, std::uint64_t>> NgramTable::sorted_entries(
    int order) const {
  const auto& map = counts_[order - 1];
  std::vector<std::pair<NgramKey, std::uint64_t>> entries(map.begin(),
                                                          map.end());
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return entries;
}

std::string NgramTable::text(const NgramKey& key, int order) const {
  std::string s;
  for (int k = 0; k < order; ++k) {
    if (k > 0) s.push_back(' ');
    s += vocab_->word(key.words[k]);
  }
  return s;
}

bool NgramTable::same_counts(const NgramTable& other) const {
  if (max_order_ != other.max_order_ || boundary_ != other.boundary_)
    return false;
  for (int n = 1; n <= max_order_; ++n) {
    if (size(n) != other.size(n) || total(n) != other.total(n)) return false;
    if (vocab_ == other.vocab_) {
      if (counts(n) != other.counts(n)) return false;
      continue;
    }
    for (const auto& [key, c] : counts(n))
      if (other.count(text(key, n)) != c) return false;
  }
  return true;
}

NgramCounter::NgramCounter(int max_order, BoundaryPolicy boundary)
    : own_vocab_(std::make_shared<Vocabulary>()),
      table_(max_order, boundary, own_vocab_) {}

NgramCounter::NgramCounter(int max_order, BoundaryPolicy boundary,
                           std::shared_ptr<const Vocabulary> vocab)
    : table_(max_order, boundary, std::move(vocab)) {}

void NgramCounter::add(const TokenStream& doc) {
  if (!own_vocab_)
    throw ArgumentError("counter was built for id documents");
  std::vector<WordId> ids;
  ids.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) ids.push_back(own_vocab_->intern(t));
  add(ids);
}

void NgramCounter::add(std::span<const WordId> doc) {
  if (table_.boundary() == BoundaryPolicy::kNone || table_.max_order() == 1) {
    count_sequence(doc, 0, doc.size(), table_.max_order(), table_);
    return;
  }
  std::size_t pad = static_cast<std::size_t>(table_.max_order() - 1);
  scratch_.assign(pad, kBosId);
  scratch_.insert(scratch_.end(), doc.begin(), doc.end());
  scratch_.push_back(kEosId);
  count_sequence(scratch_, pad, pad + doc.size(), table_.max_order(), table_);
}

NgramTable NgramCounter::finish() && { return std::move(table_); }

NgramTable count_ngrams(std::span<const TokenStream> docs, int max_order,
                        BoundaryPolicy boundary) {
  NgramCounter counter(max_order, boundary);
  for (const auto& doc : docs) counter.add(doc);
  return std::move(counter).finish();
}

NgramTable count_ngrams(const EncodedCorpus& corpus,
                        std::span<const std::size_t> docs, int max_order,
                        BoundaryPolicy boundary, int threads) {
  check_order(max_order);
  std::shared_ptr<const Vocabulary> vocab = corpus.shared_vocabulary();
  std::size_t n = docs.empty() ? corpus.num_documents() : docs.size();
  auto doc_at = [&](std::size_t i) {
    return corpus.document(docs.empty() ? i : docs[i]);
  };
  int shards = std::max(1, threads);
  std::vector<NgramTable> partial;
  partial.reserve(shards);
  for (int s = 0; s < shards; ++s) partial.emplace_back(max_order, boundary, vocab);
  parallel_shards(n, shards, [&](std::size_t s, std::size_t b, std::size_t e) {
    NgramCounter counter(max_order, boundary, vocab);
    for (std::size_t i = b; i < e; ++i) counter.add(doc_at(i));
    partial[s] = std::move(counter).finish();
  });
  // Shards share the corpus vocabulary, so the reduction is an id-level sum.
  NgramTable result = std::move(partial[0]);
  for (std::size_t s = 1; s < partial.size(); ++s)
    for (int order = 1; order <= max_order; ++order)
      for (const auto& [key, c] : partial[s].counts(order))
        result.add(order, key, c);
  return result;
}

NgramTable merge_tables(const NgramTable& a, const NgramTable& b) {
  if (a.max_order() != b.max_order() || a.boundary() != b.boundary())
    throw ArgumentError("cannot merge n-gram tables with different max_order "
                        "or boundary policy");
  if (a.shared_vocabulary() == b.shared_vocabulary()) {
    NgramTable out = a;
    for (int n = 1; n <= b.max_order(); ++n)
      for (const auto& [key, c] : b.counts(n)) out.add(n, key, c);
    return out;
  }
  // Different vocabularies: extend a copy of a's vocabulary with b's words,
  // so a's ids stay valid and only b needs remapping.
  auto vocab = std::make_shared<Vocabulary>(a.vocabulary());
  std::vector<WordId> remap(b.vocabulary().size());
  for (WordId id = 0; id < remap.size(); ++id)
    remap[id] = vocab->intern(b.vocabulary().word(id));
  NgramTable out(a.max_order(), a.boundary(), vocab);
  for (int n = 1; n <= a.max_order(); ++n) {
    for (const auto& [key, c] : a.counts(n)) out.add(n, key, c);
    for (const auto& [key, c] : b.counts(n)) {
      NgramKey mapped;
      for (int k = 0; k < n; ++k) mapped.words[k] = remap[key.words[k]];
      out.add(n, mapped, c);
    }
  }
  return out;
}

void write_count_table(const NgramTable& table, std::ostream& out) {
  out << kCountTableMagic << " max_order=" << table.max_order()
      << " boundary=" << boundary_name(table.boundary()) << '\n';
  for (int n = 1; n <= table.max_order(); ++n) {
    std::vector<std::pair<std::string, std::uint64_t>> lines;
    lines.reserve(table.size(n));
    for (const auto& [key, c] : table.counts(n))
      lines.emplace_back(table.text(key, n), c);
    std::sort(lines.begin(), lines.end());
    for (const auto& [ngram, c] : lines)
      out << n << '\t' << c << '\t' << ngram << '\n';
  }
}

NgramTable read_count_table(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || !header.starts_with(kCountTableMagic))
    throw DataError("count table: missing \"" + std::string(kCountTableMagic) +
                    "\" header");
  std::istringstream hs(header.substr(kCountTableMagic.size()));
  std::string field;
  int max_order = 0;
  std::optional<BoundaryPolicy> boundary;
  while (hs >> field) {
    if (field.starts_with("max_order="))
      max_order = std::atoi(field.c_str() + 10);
    else if (field.starts_with("boundary="))
      boundary = parse_boundary(field.substr(9));
  }
  if (max_order < 1 || max_order > kMaxOrder || !boundary)
    throw DataError("count table: malformed header: " + header);

  auto vocab = std::make_shared<Vocabulary>();
  NgramTable table(max_order, *boundary, vocab);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto fail = [&](const char* why) {
      return DataError("count table line " + std::to_string(line_no) + ": " +
                       why);
    };
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw fail("expected ORDER<TAB>COUNT<TAB>NGRAM");
    int order = 0;
    std::uint64_t count = 0;
    auto r1 = std::from_chars(line.data(), line.data() + t1, order);
    auto r2 = std::from_chars(line.data() + t1 + 1, line.data() + t2, count);
    if (r1.ec != std::errc() || r1.ptr != line.data() + t1 ||
        r2.ec != std::errc() || r2.ptr != line.data() + t2)
      throw fail("unparseable order or count");
    if (order < 1 || order > max_order) throw fail("order out of range");
    if (count == 0) throw fail("counts must be positive");
    auto words = split_spaces(std::string_view(line).substr(t2 + 1));
    if (words.size() != static_cast<std::size_t>(order))
      throw fail("n-gram length does not match its order");
    NgramKey key;
    for (int k = 0; k < order; ++k) {
      if (words[k].empty()) throw fail("empty token");
      key.words[k] = vocab->intern(words[k]);
    }
    if (table.counts(order).contains(key)) throw fail("duplicate n-gram");
    table.add(order, key, count);
  }
  return table;
}

std::string_view pooling_name(Pooling pooling) {
  switch (pooling) {
    case Pooling::kOrder1:
      return "1";
    case Pooling::kOrder2:
      return "2";
    case Pooling::kOrder3:
      return "3";
    case Pooling::kPooled:
      return "pooled";
  }
  return "pooled";
}

Pooling parse_pooling(std::string_view name) {
  if (name == "1" || name == "order-1") return Pooling::kOrder1;
  if (name == "2" || name == "order-2") return Pooling::kOrder2;
  if (name == "3" || name == "order-3") return Pooling::kOrder3;
  if (name == "pooled" || name == "pooled-1-to-3") return Pooling::kPooled;
  throw ArgumentError("unknown pooling mode: " + std::string(name));
}

Distribution Distribution::from_weights(
    std::vector<std::pair<std::string, double>> weights, Pooling pooling) {
  if (weights.empty()) throw EmptyCorpusError("distribution has empty support");
  std::sort(weights.begin(), weights.end());
  Distribution d;
  d.pooling_ = pooling;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double w = weights[i].second;
    if (!(w > 0.0) || !std::isfinite(w))
      throw ArgumentError("distribution weight for \"" + weights[i].first +
                          "\" must be positive and finite");
    if (i > 0 && weights[i].first == weights[i - 1].first)
      throw ArgumentError("duplicate term in distribution: " + weights[i].first);
    d.total_ += w;
  }
  d.terms_ = std::move(weights);
  return d;
}

double Distribution::probability(std::string_view term) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), term,
      [](const auto& entry, std::string_view t) { return entry.first < t; });
  if (it == terms_.end() || it->first != term) return 0.0;
  return it->second / total_;
}

Distribution truncate_top_k(const Distribution& dist, std::size_t k) {
  if (k == 0) throw ArgumentError("top-k must be at least 1");
  if (k >= dist.size()) return dist;
  auto terms = dist.weights();
  std::partial_sort(terms.begin(), terms.begin() + k, terms.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  terms.resize(k);
  return Distribution::from_weights(std::move(terms), dist.pooling());
}

Distribution to_distribution(const NgramTable& table, Pooling pooling) {
  if (table.boundary() != BoundaryPolicy::kNone)
    throw ArgumentError(
        "term distributions are defined over tables counted without "
        "sentence markers");
  int lo = 1;
  int hi = table.max_order();
  if (pooling != Pooling::kPooled) {
    lo = hi = static_cast<int>(pooling) + 1;
    if (lo > table.max_order())
      throw ArgumentError("pooling order " + std::to_string(lo) +
                          " exceeds table max_order " +
                          std::to_string(table.max_order()));
  }
  std::uint64_t total = 0;
  for (int n = lo; n <= hi; ++n) total += table.total(n);
  if (total == 0)
    throw EmptyCorpusError("no n-grams of the selected orders to build a "
                           "distribution from");
  std::vector<std::pair<std::string, double>> weights;
  for (int n = lo; n <= hi; ++n)
    for (const auto& [key, c] : table.counts(n))
      weights.emplace_back(table.text(key, n), static_cast<double>(c));
  return Distribution::from_weights(std::move(weights), pooling);
}

}  // namespace corpus_affinity
