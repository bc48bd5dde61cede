// corpus.hpp
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
// Corpus ingestion: reading documents, social-media normalization and
// word-level tokenization, plus the integer-encoded corpus every
// measurement pipeline runs on.

#ifndef CORPUS_AFFINITY_CORPUS_HPP_
#define CORPUS_AFFINITY_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpus_affinity/vocabulary.hpp"

namespace corpus_affinity {

inline constexpr std::string_view kTwitterUserToken = "[TwitterUser]";
inline constexpr std::string_view kUrlToken = "[URL]";

struct Document {
  std::string id;
  std::string text;
};

enum class NormalizationMode { kNone, kTwitter };

struct TokenizerConfig {
  bool lowercase = true;
  NormalizationMode normalization_mode = NormalizationMode::kNone;
  bool keep_punctuation_tokens = true;
};

// Stable description of a tokenizer configuration. Models record it so that
// text tokenized differently is rejected at scoring time.
std::string tokenizer_fingerprint(const TokenizerConfig& config);

struct TokenStream {
  std::vector<std::string> tokens;

  std::size_t token_count() const { return tokens.size(); }
  bool operator==(const TokenStream&) const = default;
};

// Replaces whitespace-delimited "@handle" tokens with [TwitterUser] and
// tokens starting with http://, https:// or www. with [URL]. Whitespace is
// preserved byte for byte.
std::string normalize_tweet(std::string_view text);

TokenStream tokenize(std::string_view text, const TokenizerConfig& config);

enum class CorpusFormat { kTextLines, kJsonlText };

// Streams documents from disk one line at a time. Blank lines are skipped;
// ids default to the 0-based line number.
class CorpusReader {
 public:
  CorpusReader(const std::filesystem::path& path, CorpusFormat format);

  std::optional<Document> next();
  std::size_t line_number() const { return line_number_; }

 private:
  std::filesystem::path path_;
  CorpusFormat format_;
  std::ifstream in_;
  std::size_t line_number_ = 0;
};

std::vector<Document> read_corpus(const std::filesystem::path& path,
                                  CorpusFormat format);

// A tokenized corpus stored as word ids in one flat buffer. Several corpora
// may share one vocabulary, which lets tables and models built from them be
// compared by id.
class EncodedCorpus {
 public:
  explicit EncodedCorpus(std::shared_ptr<Vocabulary> vocab);

  void add(std::string id, std::span<const std::string> tokens);
  void add_ids(std::string id, std::span<const WordId> ids);

  std::size_t num_documents() const { return ids_.size(); }
  std::uint64_t num_tokens() const { return tokens_.size(); }
  std::span<const WordId> document(std::size_t i) const {
    return {tokens_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  const std::string& document_id(std::size_t i) const { return ids_[i]; }
  std::vector<std::uint64_t> document_lengths() const;

  const Vocabulary& vocabulary() const { return *vocab_; }
  const std::shared_ptr<Vocabulary>& shared_vocabulary() const {
    return vocab_;
  }

 private:
  std::shared_ptr<Vocabulary> vocab_;
  std::vector<WordId> tokens_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::string> ids_;
};

// Reads, tokenizes and encodes a corpus file. Tokenization runs on `threads`
// workers in fixed-size batches; interning is sequential, so ids do not
// depend on the worker count.
EncodedCorpus load_corpus(const std::filesystem::path& path,
                          CorpusFormat format, const TokenizerConfig& config,
                          std::shared_ptr<Vocabulary> vocab, int threads = 1);

}  // namespace corpus_affinity

#endif  // CORPUS_AFFINITY_CORPUS_HPP_
