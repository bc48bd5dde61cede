// corpus.cpp
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

#include "corpus_affinity/corpus.hpp"

#include <cctype>

#include <nlohmann/json.hpp>

#include "corpus_affinity/errors.hpp"
#include "corpus_affinity/parallel.hpp"
#include "unicode.hpp"

namespace corpus_affinity {
namespace {

using unicode::CodePoint;
using unicode::decode_utf8;
using unicode::is_punct;
using unicode::is_space;

// Characters that stay inside a word when flanked by word characters.
bool is_joiner(char32_t cp) {
  return cp == U'\'' || cp == U'-' || cp == 0x2019 || cp == 0x2010 ||
         cp == 0x2011;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i])
      return false;
  }
  return true;
}

struct Replacement {
  std::string_view token;
  std::size_t consumed = 0;  // bytes of the chunk it replaces
};

bool is_handle_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// A mention is '@' plus a handle; a URL runs to the end of the chunk, minus
// trailing sentence punctuation.
Replacement replacement_for(std::string_view chunk) {
  if (chunk.size() > 1 && chunk[0] == '@' && is_handle_char(chunk[1])) {
    std::size_t n = 1;
    while (n < chunk.size() && is_handle_char(chunk[n])) ++n;
    return {kTwitterUserToken, n};
  }
  if (starts_with_ci(chunk, "http://") || starts_with_ci(chunk, "https://") ||
      starts_with_ci(chunk, "www.")) {
    std::size_t n = chunk.size();
    while (n > 4 && std::string_view(".,!?;:)\"'").find(chunk[n - 1]) !=
                        std::string_view::npos)
      --n;
    return {kUrlToken, n};
  }
  return {};
}

std::optional<std::string_view> protected_token_at(std::string_view s,
                                                   std::size_t i) {
  for (std::string_view special : {kTwitterUserToken, kUrlToken}) {
    if (s.substr(i, special.size()) == special) return special;
  }
  return std::nullopt;
}

class WordBuilder {
 public:
  WordBuilder(const TokenizerConfig& config, TokenStream& out)
      : config_(config), out_(out) {}

  bool empty() const { return word_.empty(); }

  void append(std::string_view bytes, const CodePoint& c) {
    if (config_.lowercase && c.valid) {
      char32_t lower = unicode::to_lower(c.value);
      if (lower != c.value) {
        unicode::append_utf8(word_, lower);
        return;
      }
    }
    word_.append(bytes);
  }

  void flush() {
    if (!word_.empty()) out_.tokens.push_back(std::move(word_));
    word_.clear();
  }

 private:
  const TokenizerConfig& config_;
  TokenStream& out_;
  std::string word_;
};

void tokenize_chunk(std::string_view chunk, const TokenizerConfig& config,
                    TokenStream& out) {
  WordBuilder word(config, out);
  std::size_t i = 0;
  while (i < chunk.size()) {
    if (auto special = protected_token_at(chunk, i)) {
      word.flush();
      out.tokens.emplace_back(*special);
      i += special->size();
      continue;
    }
    CodePoint c = decode_utf8(chunk, i);
    std::string_view bytes = chunk.substr(i, c.length);
    if (is_punct(c)) {
      bool interior = false;
      if (is_joiner(c.value) && !word.empty() && i + c.length < chunk.size()) {
        std::size_t j = i + c.length;
        CodePoint next = decode_utf8(chunk, j);
        interior = !is_punct(next) && !protected_token_at(chunk, j);
      }
      if (interior) {
        word.append(bytes, c);
      } else {
        word.flush();
        if (config.keep_punctuation_tokens) out.tokens.emplace_back(bytes);
      }
    } else {
      word.append(bytes, c);
    }
    i += c.length;
  }
  word.flush();
}

// Calls fn(begin, end) for each maximal run of non-space bytes.
template <typename Fn>
void for_each_chunk(std::string_view text, Fn&& fn) {
  std::size_t i = 0;
  std::size_t start = std::string_view::npos;
  while (i < text.size()) {
    CodePoint c = decode_utf8(text, i);
    if (is_space(c)) {
      if (start != std::string_view::npos) fn(start, i);
      start = std::string_view::npos;
    } else if (start == std::string_view::npos) {
      start = i;
    }
    i += c.length;
  }
  if (start != std::string_view::npos) fn(start, text.size());
}

}  // namespace

std::string tokenizer_fingerprint(const TokenizerConfig& config) {
  std::string fp = "word-v1";
  fp += config.lowercase ? ";lowercase=1" : ";lowercase=0";
  fp += config.normalization_mode == NormalizationMode::kTwitter
            ? ";normalize=twitter"
            : ";normalize=none";
  fp += config.keep_punctuation_tokens ? ";punct=1" : ";punct=0";
  return fp;
}

std::string normalize_tweet(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t copied = 0;
  for_each_chunk(text, [&](std::size_t b, std::size_t e) {
    Replacement r = replacement_for(text.substr(b, e - b));
    if (r.token.empty()) return;
    out.append(text.substr(copied, b - copied));
    out.append(r.token);
    copied = b + r.consumed;
  });
  out.append(text.substr(copied));
  return out;
}

TokenStream tokenize(std::string_view text, const TokenizerConfig& config) {
  std::string normalized;
  if (config.normalization_mode == NormalizationMode::kTwitter) {
    normalized = normalize_tweet(text);
    text = normalized;
  }
  TokenStream out;
  for_each_chunk(text, [&](std::size_t b, std::size_t e) {
    tokenize_chunk(text.substr(b, e - b), config, out);
  });
  return out;
}

CorpusReader::CorpusReader(const std::filesystem::path& path,
                           CorpusFormat format)
    : path_(path), format_(format), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open corpus file: " + path.string());
}

std::optional<Document> CorpusReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    std::size_t number = line_number_++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 0 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line.empty()) continue;
    if (format_ == CorpusFormat::kTextLines)
      return Document{std::to_string(number), std::move(line)};

    auto fail = [&](const std::string& why) {
      return DataError(path_.string() + ": line " + std::to_string(number + 1) +
                       ": " + why);
    };
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw fail(std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) throw fail("expected a JSON object");
    auto text = record.find("text");
    if (text == record.end() || !text->is_string())
      throw fail("missing string field \"text\"");
    Document doc{std::to_string(number), text->get<std::string>()};
    if (auto id = record.find("id"); id != record.end()) {
      if (id->is_string())
        doc.id = id->get<std::string>();
      else if (id->is_number_integer())
        doc.id = std::to_string(id->get<long long>());
      else
        throw fail("field \"id\" must be a string or integer");
    }
    return doc;
  }
  if (in_.bad()) throw IoError("read error on " + path_.string());
  return std::nullopt;
}

std::vector<Document> read_corpus(const std::filesystem::path& path,
                                  CorpusFormat format) {
  CorpusReader reader(path, format);
  std::vector<Document> docs;
  while (auto doc = reader.next()) docs.push_back(std::move(*doc));
  return docs;
}

EncodedCorpus::EncodedCorpus(std::shared_ptr<Vocabulary> vocab)
    : vocab_(std::move(vocab)) {
  if (!vocab_) vocab_ = std::make_shared<Vocabulary>();
}

void EncodedCorpus::add(std::string id, std::span<const std::string> tokens) {
  for (const auto& t : tokens) tokens_.push_back(vocab_->intern(t));
  offsets_.push_back(tokens_.size());
  ids_.push_back(std::move(id));
}

void EncodedCorpus::add_ids(std::string id, std::span<const WordId> ids) {
  tokens_.insert(tokens_.end(), ids.begin(), ids.end());
  offsets_.push_back(tokens_.size());
  ids_.push_back(std::move(id));
}

std::vector<std::uint64_t> EncodedCorpus::document_lengths() const {
  std::vector<std::uint64_t> lengths(num_documents());
  for (std::size_t i = 0; i < lengths.size(); ++i)
    lengths[i] = offsets_[i + 1] - offsets_[i];
  return lengths;
}

EncodedCorpus load_corpus(const std::filesystem::path& path,
                          CorpusFormat format, const TokenizerConfig& config,
                          std::shared_ptr<Vocabulary> vocab, int threads) {
  constexpr std::size_t kBatch = 16384;
  EncodedCorpus corpus(std::move(vocab));
  CorpusReader reader(path, format);
  std::vector<Document> batch;
  std::vector<TokenStream> tokenized;
  bool done = false;
  while (!done) {
    batch.clear();
    while (batch.size() < kBatch) {
      auto doc = reader.next();
      if (!doc) {
        done = true;
        break;
      }
      batch.push_back(std::move(*doc));
    }
    tokenized.assign(batch.size(), TokenStream{});
    parallel_for(batch.size(), threads, [&](std::size_t i) {
      tokenized[i] = tokenize(batch[i].text, config);
    });
    for (std::size_t i = 0; i < batch.size(); ++i)
      corpus.add(std::move(batch[i].id), tokenized[i].tokens);
  }
  return corpus;
}

}  // namespace corpus_affinity
