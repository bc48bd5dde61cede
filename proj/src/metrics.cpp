// metrics.cpp
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

#include "corpus_affinity/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "bundled_data.hpp"
#include "corpus_affinity/errors.hpp"
#include "corpus_affinity/io.hpp"
#include "unicode.hpp"

namespace corpus_affinity {
namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out)
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (auto& ch : out)
    ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

bool is_word_joiner(char32_t cp) {
  return cp == U'\'' || cp == U'-' || cp == 0x2019 || cp == 0x2010 ||
         cp == 0x2011;
}

std::vector<std::pair<NgramKey, double>> pooled_entries(
    const NgramTable& table, Pooling pooling) {
  int lo = 1;
  int hi = table.max_order();
  if (pooling != Pooling::kPooled) {
    lo = hi = static_cast<int>(pooling) + 1;
    if (lo > table.max_order())
      throw ArgumentError("pooling order exceeds table max_order");
  }
  std::vector<std::pair<NgramKey, double>> entries;
  std::uint64_t total = 0;
  for (int n = lo; n <= hi; ++n) {
    total += table.total(n);
    for (const auto& [key, c] : table.counts(n))
      entries.emplace_back(key, static_cast<double>(c));
  }
  if (total == 0)
    throw EmptyCorpusError("no n-grams of the selected orders");
  return entries;
}

double sum_weights(std::span<const std::pair<NgramKey, double>> entries) {
  double total = 0.0;
  for (const auto& e : entries) total += e.second;
  return total;
}

void keep_top_k(std::vector<std::pair<NgramKey, double>>& entries,
                std::size_t k) {
  if (k >= entries.size()) return;
  std::partial_sort(entries.begin(), entries.begin() + k, entries.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  entries.resize(k);
}

}  // namespace

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::kPpl:
      return "ppl";
    case Measure::kJsdPooled:
      return "jsd_pooled";
    case Measure::kJsd1:
      return "jsd_1";
    case Measure::kJsd2:
      return "jsd_2";
    case Measure::kJsd3:
      return "jsd_3";
    case Measure::kTvc:
      return "tvc";
    case Measure::kTtr:
      return "ttr";
  }
  return "";
}

std::optional<Measure> parse_measure(std::string_view name) {
  for (Measure m : kAllMeasures)
    if (measure_name(m) == name) return m;
  if (name == "jsd") return Measure::kJsdPooled;
  return std::nullopt;
}

Direction measure_direction(Measure m) {
  switch (m) {
    case Measure::kTvc:
      return Direction::kHigherIsMoreSimilar;
    case Measure::kTtr:
      return Direction::kDiversity;
    default:
      return Direction::kLowerIsMoreSimilar;
  }
}

double jsd(const Distribution& p, const Distribution& q) {
  if (p.pooling() != q.pooling())
    throw ArgumentError("jsd: distributions use different pooling modes (" +
                        std::string(pooling_name(p.pooling())) + " vs " +
                        std::string(pooling_name(q.pooling())) + ")");
  return detail::jsd_sorted<std::pair<std::string, double>>(
      p.weights(), p.total(), q.weights(), q.total());
}

double jsd(const NgramTable& p, const NgramTable& q, Pooling pooling,
           std::optional<std::size_t> top_k) {
  if (p.boundary() != BoundaryPolicy::kNone ||
      q.boundary() != BoundaryPolicy::kNone)
    throw ArgumentError("jsd: tables must be counted without sentence markers");
  if (p.shared_vocabulary() != q.shared_vocabulary())
    throw ArgumentError("jsd: tables must share one vocabulary");
  if (top_k && *top_k == 0) throw ArgumentError("top-k must be at least 1");
  auto a = pooled_entries(p, pooling);
  auto b = pooled_entries(q, pooling);
  if (top_k) {
    keep_top_k(a, *top_k);
    keep_top_k(b, *top_k);
  }
  auto by_key = [](const auto& x, const auto& y) { return x.first < y.first; };
  std::sort(a.begin(), a.end(), by_key);
  std::sort(b.begin(), b.end(), by_key);
  return detail::jsd_sorted<std::pair<NgramKey, double>>(a, sum_weights(a), b,
                                                         sum_weights(b));
}

std::string_view coarse_tag_name(CoarseTag tag) {
  switch (tag) {
    case CoarseTag::kNoun:
      return "noun";
    case CoarseTag::kVerb:
      return "verb";
    case CoarseTag::kAdjective:
      return "adjective";
    case CoarseTag::kOther:
      return "other";
  }
  return "other";
}

CoarseTag parse_coarse_tag(std::string_view tag) {
  std::string t = ascii_upper(tag);
  if (t == "NOUN" || t == "PROPN" || t == "N" || t.starts_with("NN"))
    return CoarseTag::kNoun;
  if (t == "VERB" || t == "V" || t.starts_with("VB")) return CoarseTag::kVerb;
  if (t == "ADJECTIVE" || t == "ADJ" || t == "A" || t.starts_with("JJ"))
    return CoarseTag::kAdjective;
  return CoarseTag::kOther;
}

bool is_alphabetic(std::string_view token) {
  std::vector<unicode::CodePoint> cps;
  for (std::size_t i = 0; i < token.size();) {
    cps.push_back(unicode::decode_utf8(token, i));
    i += cps.back().length;
  }
  if (cps.empty()) return false;
  for (std::size_t k = 0; k < cps.size(); ++k) {
    if (unicode::is_alpha(cps[k])) continue;
    bool interior = k > 0 && k + 1 < cps.size() && cps[k].valid &&
                    is_word_joiner(cps[k].value);
    if (!interior) return false;
  }
  return true;
}

ContentWordLexicon::ContentWordLexicon(std::string source_name)
    : source_name_(std::move(source_name)) {}

ContentWordLexicon ContentWordLexicon::bundled() {
  return parse(bundled::coarse_pos_lexicon(), "bundled:en_coarse_pos");
}

ContentWordLexicon ContentWordLexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

ContentWordLexicon ContentWordLexicon::parse(std::string_view tsv,
                                             std::string source_name) {
  ContentWordLexicon lex(std::move(source_name));
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < tsv.size()) {
    std::size_t end = tsv.find('\n', pos);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0)
      throw DataError(lex.source_name_ + ": line " + std::to_string(line_no) +
                      ": expected word<TAB>tag");
    lex.add(line.substr(0, tab), parse_coarse_tag(line.substr(tab + 1)));
  }
  return lex;
}

void ContentWordLexicon::add(std::string_view word, CoarseTag tag) {
  tags_[ascii_lower(word)] = tag;
}

std::optional<CoarseTag> ContentWordLexicon::lookup(std::string_view word) const {
  auto it = tags_.find(ascii_lower(word));
  if (it == tags_.end()) return std::nullopt;
  return it->second;
}

bool ContentWordLexicon::is_content_word(std::string_view token) const {
  if (auto tag = lookup(token)) return is_content_tag(*tag);
  return is_alphabetic(token);
}

TokenStream filter_content_words(const TokenStream& tokens,
                                 const ContentWordLexicon& lexicon) {
  TokenStream out;
  for (const auto& t : tokens.tokens)
    if (lexicon.is_content_word(t)) out.tokens.push_back(t);
  return out;
}

TypeSet content_types(const TokenStream& tokens,
                      const ContentWordLexicon& lexicon) {
  TypeSet types;
  for (const auto& t : tokens.tokens)
    if (lexicon.is_content_word(t)) types.insert(t);
  return types;
}

std::vector<std::pair<std::string, CoarseTag>> read_pos_annotations(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open POS annotations " + path.string());
  std::vector<std::pair<std::string, CoarseTag>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw DataError(path.string() + ": line " + std::to_string(line_no) +
                      ": expected token<TAB>tag");
    out.emplace_back(line.substr(0, tab),
                     parse_coarse_tag(std::string_view(line).substr(tab + 1)));
  }
  return out;
}

TypeSet content_types(
    std::span<const std::pair<std::string, CoarseTag>> annotated) {
  TypeSet types;
  for (const auto& [token, tag] : annotated)
    if (is_content_tag(tag)) types.insert(token);
  return types;
}

double tvc(const TypeSet& target_types, const TypeSet& source_types) {
  if (target_types.empty())
    throw EmptyCorpusError("tvc: target has no content words");
  std::size_t covered = 0;
  for (const auto& t : target_types) covered += source_types.contains(t);
  return static_cast<double>(covered) /
         static_cast<double>(target_types.size());
}

double tvc(const TokenStream& target_tokens, const TokenStream& source_tokens,
           const ContentWordLexicon& lexicon) {
  return tvc(content_types(target_tokens, lexicon),
             content_types(source_tokens, lexicon));
}

double tvc(std::span<const std::uint8_t> target_types,
           std::span<const std::uint8_t> source_types) {
  std::size_t target = 0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < target_types.size(); ++i) {
    if (!target_types[i]) continue;
    ++target;
    covered += i < source_types.size() && source_types[i];
  }
  if (target == 0) throw EmptyCorpusError("tvc: target has no content words");
  return static_cast<double>(covered) / static_cast<double>(target);
}

double ttr(const TokenStream& tokens) {
  if (tokens.tokens.empty())
    throw EmptyCorpusError("ttr: token stream is empty");
  std::unordered_set<std::string_view> types(tokens.tokens.begin(),
                                             tokens.tokens.end());
  return static_cast<double>(types.size()) /
         static_cast<double>(tokens.tokens.size());
}

double ttr(const EncodedCorpus& corpus, std::span<const std::size_t> docs) {
  std::vector<std::uint8_t> seen(corpus.vocabulary().size(), 0);
  std::uint64_t tokens = 0;
  std::uint64_t types = 0;
  std::size_t n = docs.empty() ? corpus.num_documents() : docs.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (WordId w : corpus.document(docs.empty() ? i : docs[i])) {
      ++tokens;
      if (!seen[w]) {
        seen[w] = 1;
        ++types;
      }
    }
  }
  if (tokens == 0) throw EmptyCorpusError("ttr: corpus has no tokens");
  return static_cast<double>(types) / static_cast<double>(tokens);
}

}  // namespace corpus_affinity
