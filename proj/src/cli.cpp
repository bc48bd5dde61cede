// cli.cpp
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

#include "corpus_affinity/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "corpus_affinity/analysis.hpp"
#include "corpus_affinity/corpus.hpp"
#include "corpus_affinity/io.hpp"
#include "corpus_affinity/kneser_ney.hpp"
#include "corpus_affinity/metrics.hpp"
#include "corpus_affinity/ngram.hpp"
#include "corpus_affinity/parallel.hpp"
#include "corpus_affinity/protocol.hpp"

#ifndef CORPUS_AFFINITY_VERSION
#define CORPUS_AFFINITY_VERSION "0.0.0"
#endif

namespace corpus_affinity::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string_view tool_version() { return CORPUS_AFFINITY_VERSION; }

bool Command::has(std::string_view name) const {
  return flags.find(std::string(name)) != flags.end();
}

const std::vector<std::string>& Command::values(std::string_view name) const {
  auto it = flags.find(std::string(name));
  if (it == flags.end())
    throw UsageError(subcommand + ": missing required flag --" +
                     std::string(name));
  return it->second;
}

const std::string& Command::flag(std::string_view name) const {
  return values(name).front();
}

namespace {

enum class Kind { kText, kPath, kUInt, kBool, kSwitch, kChoice, kDiscounts };

struct FlagSpec {
  FlagSpec(std::string name, Kind kind, std::string default_value,
           std::string help)
      : name(std::move(name)),
        kind(kind),
        default_value(std::move(default_value)),
        help(std::move(help)) {}

  std::string name;
  Kind kind = Kind::kText;
  std::string default_value;
  std::string help;
  std::uint64_t min = 0;
  std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::string> choices;
  bool repeatable = false;
};

std::string joined(std::span<const std::string_view> items) {
  std::string out;
  for (auto s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

std::string joined(const std::vector<std::string>& items) {
  std::vector<std::string_view> views(items.begin(), items.end());
  return joined(std::span<const std::string_view>(views));
}

FlagSpec path(std::string name, std::string help) {
  return {std::move(name), Kind::kPath, "", std::move(help)};
}

FlagSpec choice(std::string name, std::vector<std::string> choices,
                std::string def, std::string help) {
  FlagSpec f{std::move(name), Kind::kChoice, std::move(def), std::move(help)};
  f.choices = std::move(choices);
  return f;
}

FlagSpec uint_flag(std::string name, std::string def, std::uint64_t min,
                   std::uint64_t max, std::string help) {
  FlagSpec f{std::move(name), Kind::kUInt, std::move(def), std::move(help)};
  f.min = min;
  f.max = max;
  return f;
}

void add_common(std::vector<FlagSpec>& specs) {
  specs.push_back(uint_flag("threads", "", 1, 1024,
                            "worker threads (default: $CORPUS_AFFINITY_THREADS "
                            "or all cores)"));
  specs.push_back(path("manifest", "run manifest path"));
}

void add_tokenizer(std::vector<FlagSpec>& specs) {
  specs.push_back(choice("format", {"text", "jsonl"}, "text",
                         "input format: one document per line, or JSONL "
                         "with a \"text\" field"));
  specs.push_back({"lowercase", Kind::kBool, "true", "lowercase tokens"});
  specs.push_back(choice("normalize", {"none", "twitter"}, "none",
                         "text normalization before tokenizing"));
  specs.push_back({"keep-punct", Kind::kBool, "true",
                   "keep punctuation characters as tokens"});
}

void add_lm(std::vector<FlagSpec>& specs) {
  specs.push_back(uint_flag("order", "3", 3, 3, "language model order"));
  specs.push_back({"discounts", Kind::kDiscounts, "auto",
                   "auto (from counts of counts) or fixed:D with 0 <= D < 1"});
  specs.push_back(uint_flag("min-count", "1", 1,
                            std::numeric_limits<std::uint64_t>::max(),
                            "drop n-grams (order >= 2) seen fewer times"));
}

void add_jsd(std::vector<FlagSpec>& specs) {
  specs.push_back(choice("pooling", {"1", "2", "3", "pooled"}, "pooled",
                         "n-gram orders behind the jsd distribution"));
  specs.push_back(uint_flag("top-k", "", 1,
                            std::numeric_limits<std::uint64_t>::max(),
                            "keep only the K most frequent terms per side"));
}

struct SubcommandSpec {
  std::string description;
  std::vector<FlagSpec> flags;
  std::string positional;  // empty: none
  bool positional_repeatable = false;
};

SubcommandSpec subcommand_spec(std::string_view name) {
  SubcommandSpec s;
  auto& f = s.flags;
  if (name == "normalize") {
    s.description = "Normalize (and optionally tokenize) a corpus";
    f.push_back(path("input", "corpus file"));
    f.push_back(path("output", "normalized corpus, one document per line"));
    f.push_back(choice("mode", {"none", "twitter"}, "twitter",
                       "normalization mode"));
    f.push_back(choice("format", {"text", "jsonl"}, "text", "input format"));
    f.push_back({"tokenize", Kind::kSwitch, "", "emit space-joined tokens"});
    f.push_back({"lowercase", Kind::kBool, "true", "lowercase when tokenizing"});
    f.push_back({"keep-punct", Kind::kBool, "true",
                 "keep punctuation tokens when tokenizing"});
  } else if (name == "count") {
    s.description = "Count n-grams into a count table";
    f.push_back(path("input", "corpus file"));
    f.push_back(path("output", "count table"));
    f.push_back(uint_flag("order", "3", 1, 3, "maximum n-gram order"));
    f.push_back(choice("boundary", {"none", "markers"}, "none",
                       "pad documents with <s>/</s> markers"));
    add_tokenizer(f);
  } else if (name == "lm-build") {
    s.description = "Train a Kneser-Ney trigram model (ARPA + sidecar)";
    f.push_back(path("input", "corpus file"));
    f.push_back(path("counts", "count table built with --boundary markers"));
    f.push_back(path("output", "ARPA model path"));
    add_lm(f);
    add_tokenizer(f);
  } else if (name == "lm-ppl") {
    s.description = "Perplexity of a corpus under a trained model";
    f.push_back(path("model", "ARPA model with its sidecar"));
    f.push_back(path("input", "corpus to score"));
    f.push_back(path("output", "result JSON"));
    add_tokenizer(f);
  } else if (name == "sim") {
    s.description = "One similarity or diversity measure";
    s.positional = "measure";
    f.push_back(path("source", "source corpus"));
    f.push_back(path("target", "target corpus"));
    f.push_back({"source-id", Kind::kText, "", "source name in outputs"});
    f.push_back({"target-id", Kind::kText, "", "target name in outputs"});
    f.push_back(path("source-pos", "word<TAB>tag annotations for the source"));
    f.push_back(path("target-pos", "word<TAB>tag annotations for the target"));
    f.push_back({"lexicon", Kind::kText, "builtin",
                 "content-word lexicon: builtin or a word<TAB>tag file"});
    f.push_back(path("output", "result JSON"));
    add_jsd(f);
    add_tokenizer(f);
  } else if (name == "profile") {
    s.description = "Sub-corpus similarity profile of sources against a target";
    FlagSpec source = path("source", "source corpus (repeatable)");
    source.repeatable = true;
    f.push_back(source);
    FlagSpec source_id{"source-id", Kind::kText, "",
                       "source names, one per --source"};
    source_id.repeatable = true;
    f.push_back(source_id);
    f.push_back(path("target", "target corpus"));
    f.push_back({"target-id", Kind::kText, "", "target name in outputs"});
    f.push_back({"output-dir", Kind::kPath, ".", "directory for profiles"});
    f.push_back(uint_flag("samples", "5", 1, 1'000'000, "sub-corpora per source"));
    f.push_back(uint_flag("sample-tokens", "10000000", 1,
                          std::numeric_limits<std::uint64_t>::max(),
                          "tokens per sub-corpus"));
    f.push_back(uint_flag("seed", "0", 0,
                          std::numeric_limits<std::uint64_t>::max(),
                          "sampling seed"));
    f.push_back(choice("mode", {"disjoint", "independent"}, "disjoint",
                       "sub-corpus sampling mode"));
    f.push_back({"sample-target", Kind::kSwitch, "",
                 "score a --sample-tokens sample of the target"});
    f.push_back({"lexicon", Kind::kText, "builtin",
                 "content-word lexicon: builtin or a word<TAB>tag file"});
    add_lm(f);
    add_jsd(f);
    add_tokenizer(f);
  } else if (name == "rank") {
    s.description = "Rank sources for one target from their profiles";
    s.positional = "profiles";
    s.positional_repeatable = true;
    f.push_back(choice("key", {"ppl", "jsd", "tvc", "composite"}, "composite",
                       "ranking key"));
    f.push_back(path("output", "ranking JSON"));
  } else if (name == "correlate") {
    s.description = "Correlate improvement deltas with similarity measures";
    s.positional = "profiles";
    s.positional_repeatable = true;
    f.push_back({"results", Kind::kText, "builtin:task-means",
                 "results CSV (task,model,repeat,score) or builtin:task-means"});
    f.push_back({"baseline", Kind::kText, "BERT", "baseline model name"});
    f.push_back(path("similarities", "similarity CSV (source,target,measure,value)"));
    f.push_back(path("task-map", "task to target-corpus mapping CSV"));
    f.push_back(path("model-map", "model to source-corpus mapping CSV"));
    f.push_back(choice("direction", {"raw", "similarity"}, "similarity",
                       "correlate raw values or similarity-oriented ones"));
    f.push_back(choice("pooling", {"1", "2", "3", "pooled"}, "pooled",
                       "jsd variant used for the jsd column"));
    f.push_back(path("output", "correlation report JSON"));
    f.push_back(path("deltas", "delta CSV (default: <output stem>.deltas.csv)"));
  }
  add_common(f);
  return s;
}

std::string top_level_help() {
  std::ostringstream out;
  out << "corpus-affinity " << tool_version()
      << "\nUsage: corpus-affinity SUBCOMMAND [OPTIONS]\n\nSubcommands:\n";
  for (auto name : kSubcommands)
    out << "  " << name << std::string(12 - name.size(), ' ')
        << subcommand_spec(name).description << '\n';
  out << "\nRun 'corpus-affinity SUBCOMMAND --help' for its options.\n";
  return out.str();
}

std::optional<std::uint64_t> parse_uint(std::string_view text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  return std::nullopt;
}

std::optional<KnConfig> parse_discounts(std::string_view text) {
  KnConfig config;
  if (text == "auto") return config;
  if (!text.starts_with("fixed:")) return std::nullopt;
  auto d = parse_double(text.substr(6));
  if (!d || *d < 0.0 || *d >= 1.0) return std::nullopt;
  config.discount_mode = DiscountMode::kFixed;
  config.fixed_discount = *d;
  return config;
}

std::string validate_value(const std::string& sub, const FlagSpec& spec,
                           const std::string& value) {
  auto bad = [&](const std::string& expected) {
    return UsageError(sub + ": --" + spec.name + ": expected " + expected +
                      ", got \"" + value + "\"");
  };
  switch (spec.kind) {
    case Kind::kUInt: {
      auto v = parse_uint(value);
      if (!v || *v < spec.min || *v > spec.max) {
        std::string range = "an integer";
        if (spec.min == spec.max)
          range = std::to_string(spec.min);
        else if (spec.max == std::numeric_limits<std::uint64_t>::max())
          range += " >= " + std::to_string(spec.min);
        else
          range += " in [" + std::to_string(spec.min) + ", " +
                   std::to_string(spec.max) + "]";
        throw bad(range);
      }
      return std::to_string(*v);
    }
    case Kind::kBool: {
      auto v = parse_bool(value);
      if (!v) throw bad("true or false");
      return *v ? "true" : "false";
    }
    case Kind::kChoice:
      if (std::find(spec.choices.begin(), spec.choices.end(), value) ==
          spec.choices.end())
        throw bad("one of " + joined(spec.choices));
      return value;
    case Kind::kDiscounts:
      if (!parse_discounts(value)) throw bad("auto or fixed:D with 0 <= D < 1");
      return value;
    case Kind::kPath:
    case Kind::kText:
      if (value.empty()) throw bad("a non-empty value");
      return value;
    case Kind::kSwitch:
      break;
  }
  return value;
}

void require(const Command& cmd, std::string_view name) {
  if (!cmd.has(name))
    throw UsageError(cmd.subcommand + ": missing required flag --" +
                     std::string(name));
}

void check_requirements(Command& cmd) {
  const std::string& s = cmd.subcommand;
  if (s == "normalize" || s == "count") {
    require(cmd, "input");
    require(cmd, "output");
  } else if (s == "lm-build") {
    if (cmd.has("input") == cmd.has("counts"))
      throw UsageError("lm-build: give exactly one of --input and --counts");
    require(cmd, "output");
  } else if (s == "lm-ppl") {
    require(cmd, "model");
    require(cmd, "input");
    require(cmd, "output");
  } else if (s == "sim") {
    if (cmd.positionals.size() != 1)
      throw UsageError("sim: expected one measure: jsd, tvc or ttr");
    const std::string& m = cmd.positionals.front();
    if (m != "jsd" && m != "tvc" && m != "ttr")
      throw UsageError("sim: unknown measure \"" + m +
                       "\" (expected jsd, tvc or ttr)");
    if (m == "tvc") {
      if (!cmd.has("source") && !cmd.has("source-pos"))
        throw UsageError("sim tvc: give --source or --source-pos");
      if (!cmd.has("target") && !cmd.has("target-pos"))
        throw UsageError("sim tvc: give --target or --target-pos");
    } else {
      require(cmd, "source");
      if (m == "jsd") require(cmd, "target");
    }
    require(cmd, "output");
  } else if (s == "profile") {
    require(cmd, "source");
    require(cmd, "target");
    if (cmd.has("source-id") &&
        cmd.values("source-id").size() != cmd.values("source").size())
      throw UsageError("profile: give one --source-id per --source");
  } else if (s == "rank") {
    if (cmd.positionals.empty())
      throw UsageError("rank: expected at least one profile JSON");
    require(cmd, "output");
  } else if (s == "correlate") {
    require(cmd, "output");
  }
}

}  // namespace

Command parse_args(std::span<const std::string> args) {
  Command cmd;
  const std::string valid = joined(std::span<const std::string_view>(kSubcommands));
  if (args.empty())
    throw UsageError("missing subcommand; valid subcommands: " + valid);
  const std::string& first = args.front();
  if (first == "--help" || first == "-h" || first == "help") {
    cmd.help_text = top_level_help();
    return cmd;
  }
  if (first == "--version") {
    cmd.help_text = "corpus-affinity " + std::string(tool_version()) + "\n";
    return cmd;
  }
  if (std::find(std::begin(kSubcommands), std::end(kSubcommands), first) ==
      std::end(kSubcommands))
    throw UsageError("unknown subcommand \"" + first +
                     "\"; valid subcommands: " + valid);

  SubcommandSpec spec = subcommand_spec(first);
  CLI::App app(spec.description, "corpus-affinity " + first);
  std::map<std::string, std::string> singles;
  std::map<std::string, std::vector<std::string>> multis;
  std::map<std::string, bool> switches;
  std::map<std::string, CLI::Option*> options;
  for (const auto& f : spec.flags) {
    std::string help = f.help;
    if (!f.default_value.empty()) help += " [default: " + f.default_value + "]";
    if (f.kind == Kind::kSwitch) {
      options[f.name] = app.add_flag("--" + f.name, switches[f.name], help);
    } else if (f.repeatable) {
      options[f.name] = app.add_option("--" + f.name, multis[f.name], help)
                            ->expected(1)
                            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    } else {
      options[f.name] = app.add_option("--" + f.name, singles[f.name], help);
    }
  }
  std::vector<std::string> positionals;
  if (!spec.positional.empty()) {
    auto* opt = app.add_option(spec.positional, positionals, spec.positional);
    if (!spec.positional_repeatable) opt->expected(1);
  }

  std::vector<const char*> argv{"corpus-affinity"};
  for (std::size_t i = 1; i < args.size(); ++i) argv.push_back(args[i].c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    cmd.help_text = app.help();
    return cmd;
  } catch (const CLI::ParseError& e) {
    throw UsageError(first + ": " + e.what());
  }

  cmd.subcommand = first;
  cmd.positionals = std::move(positionals);
  for (const auto& f : spec.flags) {
    std::vector<std::string> given;
    if (f.kind == Kind::kSwitch) {
      cmd.flags[f.name] = {switches[f.name] ? "true" : "false"};
      continue;
    }
    if (options[f.name]->count() > 0) {
      given = f.repeatable ? multis[f.name]
                           : std::vector<std::string>{singles[f.name]};
    } else if (!f.default_value.empty()) {
      given = {f.default_value};
    } else {
      continue;
    }
    for (auto& v : given) v = validate_value(first, f, v);
    cmd.flags[f.name] = std::move(given);
  }
  check_requirements(cmd);
  return cmd;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Run {
  Run(const Command& cmd, std::ostream& out, std::ostream& err)
      : cmd(cmd), out(out), err(err) {}

  const Command& cmd;
  std::ostream& out;
  std::ostream& err;
  int threads = 1;
  std::vector<fs::path> inputs;
  std::vector<std::pair<fs::path, std::string>> artifacts;
  std::vector<std::string> warnings;

  void input(const fs::path& p) {
    if (std::find(inputs.begin(), inputs.end(), p) == inputs.end())
      inputs.push_back(p);
  }
  void emit(fs::path p, std::string content) {
    artifacts.emplace_back(std::move(p), std::move(content));
  }
  void warn(const std::string& message) {
    err << "warning: " << message << '\n';
    warnings.push_back(message);
  }
  std::optional<std::string> opt(std::string_view name) const {
    if (!cmd.has(name)) return std::nullopt;
    return cmd.flag(name);
  }
};

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

fs::path csv_sibling(const fs::path& json_path) {
  fs::path p = json_path;
  if (p.extension() == ".json") return p.replace_extension(".csv");
  p += ".csv";
  return p;
}

fs::path with_suffix(fs::path p, std::string_view suffix) {
  p += suffix;
  return p;
}

TokenizerConfig tokenizer_config(const Command& cmd) {
  TokenizerConfig c;
  c.lowercase = cmd.flag("lowercase") == "true";
  c.keep_punctuation_tokens = cmd.flag("keep-punct") == "true";
  c.normalization_mode = cmd.flag("normalize") == "twitter"
                             ? NormalizationMode::kTwitter
                             : NormalizationMode::kNone;
  return c;
}

CorpusFormat corpus_format(const Command& cmd) {
  return cmd.flag("format") == "jsonl" ? CorpusFormat::kJsonlText
                                       : CorpusFormat::kTextLines;
}

KnConfig kn_config(const Command& cmd) {
  KnConfig c = *parse_discounts(cmd.flag("discounts"));
  c.min_count = *parse_uint(cmd.flag("min-count"));
  return c;
}

std::optional<std::size_t> top_k(const Command& cmd) {
  if (!cmd.has("top-k")) return std::nullopt;
  return static_cast<std::size_t>(*parse_uint(cmd.flag("top-k")));
}

ContentWordLexicon lexicon(Run& run) {
  const std::string& spec = run.cmd.flag("lexicon");
  if (spec == "builtin") return ContentWordLexicon::bundled();
  run.input(spec);
  return ContentWordLexicon::load(spec);
}

std::string corpus_id(const Run& run, std::string_view flag,
                      const fs::path& path) {
  if (auto id = run.opt(flag)) return *id;
  return path.stem().string();
}

EncodedCorpus load(Run& run, const fs::path& path,
                   const std::shared_ptr<Vocabulary>& vocab) {
  run.input(path);
  return load_corpus(path, corpus_format(run.cmd), tokenizer_config(run.cmd),
                     vocab, run.threads);
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

void run_normalize(Run& run) {
  const fs::path input = run.cmd.flag("input");
  run.input(input);
  const bool twitter = run.cmd.flag("mode") == "twitter";
  const bool tokenize_output = run.cmd.flag("tokenize") == "true";
  TokenizerConfig config;
  config.lowercase = run.cmd.flag("lowercase") == "true";
  config.keep_punctuation_tokens = run.cmd.flag("keep-punct") == "true";
  CorpusReader reader(input, corpus_format(run.cmd));
  std::string out;
  std::size_t docs = 0;
  while (auto doc = reader.next()) {
    std::string text = twitter ? normalize_tweet(doc->text) : doc->text;
    if (tokenize_output) {
      auto tokens = tokenize(text, config);
      std::string line;
      for (const auto& t : tokens.tokens) {
        if (!line.empty()) line += ' ';
        line += t;
      }
      text = std::move(line);
    }
    out += one_line(std::move(text));
    out += '\n';
    ++docs;
  }
  run.emit(run.cmd.flag("output"), std::move(out));
  run.out << "normalized " << docs << " documents\n";
}

void run_count(Run& run) {
  auto vocab = std::make_shared<Vocabulary>();
  auto corpus = load(run, run.cmd.flag("input"), vocab);
  const int order = static_cast<int>(*parse_uint(run.cmd.flag("order")));
  NgramTable table = count_ngrams(corpus, {}, order,
                                  parse_boundary(run.cmd.flag("boundary")),
                                  run.threads);
  std::ostringstream out;
  write_count_table(table, out);
  run.emit(run.cmd.flag("output"), out.str());
  run.out << "counted " << corpus.num_tokens() << " tokens in "
          << corpus.num_documents() << " documents\n";
}

void run_lm_build(Run& run) {
  const TokenizerConfig config = tokenizer_config(run.cmd);
  std::optional<NgramTable> table;
  if (auto counts = run.opt("counts")) {
    run.input(*counts);
    std::istringstream in(read_file(*counts));
    table.emplace(read_count_table(in));
  } else {
    auto vocab = std::make_shared<Vocabulary>();
    auto corpus = load(run, run.cmd.flag("input"), vocab);
    table.emplace(count_ngrams(corpus, {}, 3, BoundaryPolicy::kSentenceMarkers,
                               run.threads));
  }
  KneserNeyModel model =
      train_kn(*table, kn_config(run.cmd), tokenizer_fingerprint(config));
  for (const auto& w : model.warnings()) run.warn(w);
  std::ostringstream arpa;
  model.write_arpa(arpa);
  const fs::path output = run.cmd.flag("output");
  run.emit(with_suffix(output, ".json"), dump(model.sidecar()));
  run.emit(output, arpa.str());
  run.out << "trained model with " << model.num_ngrams(1) << " unigrams, "
          << model.num_ngrams(2) << " bigrams, " << model.num_ngrams(3)
          << " trigrams\n";
}

void run_lm_ppl(Run& run) {
  const fs::path model_path = run.cmd.flag("model");
  run.input(model_path);
  run.input(with_suffix(model_path, ".json"));
  KneserNeyModel model = load_model(model_path);
  const std::string fingerprint =
      tokenizer_fingerprint(tokenizer_config(run.cmd));
  if (fingerprint != model.tokenizer_fingerprint())
    throw ConfigError("tokenizer settings (" + fingerprint +
                      ") differ from the model's (" +
                      model.tokenizer_fingerprint() + ")");
  auto vocab = std::make_shared<Vocabulary>();
  const fs::path input = run.cmd.flag("input");
  auto corpus = load(run, input, vocab);
  auto result = perplexity(model, corpus, {}, fingerprint, run.threads);

  ordered_json j;
  j["model"] = model_path.string();
  j["input"] = input.string();
  j["perplexity"] = result.perplexity;
  j["scored_token_count"] = result.scored_token_count;
  j["oov_count"] = result.oov_count;
  j["total_log_prob"] = result.total_log_prob;
  const fs::path output = run.cmd.flag("output");
  run.emit(output, dump(j));
  run.emit(csv_sibling(output),
           "model,input,perplexity,scored_token_count,oov_count\n" +
               model_path.string() + ',' + input.string() + ',' +
               format_double(result.perplexity) + ',' +
               std::to_string(result.scored_token_count) + ',' +
               std::to_string(result.oov_count) + '\n');
  run.out << "perplexity " << format_double(result.perplexity) << '\n';
}

TypeSet corpus_content_types(const EncodedCorpus& corpus,
                             const ContentWordLexicon& lex) {
  std::vector<std::uint8_t> seen(corpus.vocabulary().size(), 0);
  for (std::size_t d = 0; d < corpus.num_documents(); ++d)
    for (WordId id : corpus.document(d)) seen[id] = 1;
  TypeSet types;
  for (WordId id = 0; id < seen.size(); ++id)
    if (seen[id] && lex.is_content_word(corpus.vocabulary().word(id)))
      types.insert(corpus.vocabulary().word(id));
  return types;
}

void run_sim(Run& run) {
  const std::string& which = run.cmd.positionals.front();
  auto vocab = std::make_shared<Vocabulary>();
  ordered_json j;
  std::string source_id;
  std::string target_id;
  Measure measure = Measure::kTtr;
  double value = 0.0;

  auto side_id = [&](std::string_view id_flag, std::string_view corpus_flag,
                     std::string_view pos_flag) -> std::string {
    if (auto p = run.opt(corpus_flag)) return corpus_id(run, id_flag, *p);
    if (auto p = run.opt(pos_flag)) return corpus_id(run, id_flag, *p);
    return "";
  };
  source_id = side_id("source-id", "source", "source-pos");
  target_id = side_id("target-id", "target", "target-pos");

  if (which == "jsd") {
    auto source = load(run, run.cmd.flag("source"), vocab);
    auto target = load(run, run.cmd.flag("target"), vocab);
    const Pooling pooling = parse_pooling(run.cmd.flag("pooling"));
    auto ts = count_ngrams(source, {}, 3, BoundaryPolicy::kNone, run.threads);
    auto tt = count_ngrams(target, {}, 3, BoundaryPolicy::kNone, run.threads);
    value = jsd(ts, tt, pooling, top_k(run.cmd));
    switch (pooling) {
      case Pooling::kOrder1: measure = Measure::kJsd1; break;
      case Pooling::kOrder2: measure = Measure::kJsd2; break;
      case Pooling::kOrder3: measure = Measure::kJsd3; break;
      case Pooling::kPooled: measure = Measure::kJsdPooled; break;
    }
  } else if (which == "tvc") {
    const ContentWordLexicon lex = lexicon(run);
    auto side = [&](std::string_view corpus_flag,
                    std::string_view pos_flag) -> TypeSet {
      if (auto p = run.opt(pos_flag)) {
        run.input(*p);
        auto annotated = read_pos_annotations(*p);
        return content_types(annotated);
      }
      auto corpus = load(run, run.cmd.flag(corpus_flag), vocab);
      return corpus_content_types(corpus, lex);
    };
    TypeSet source = side("source", "source-pos");
    TypeSet target = side("target", "target-pos");
    measure = Measure::kTvc;
    value = tvc(target, source);
    j["lexicon"] = lex.source_name();
  } else {
    auto source = load(run, run.cmd.flag("source"), vocab);
    measure = Measure::kTtr;
    value = ttr(source, {});
  }

  ordered_json result;
  result["measure"] = measure_name(measure);
  result["source"] = source_id;
  if (measure != Measure::kTtr) result["target"] = target_id;
  result["value"] = value;
  for (auto& [k, v] : j.items()) result[k] = v;
  if (which == "jsd" && top_k(run.cmd))
    result["top_k"] = *top_k(run.cmd);
  const fs::path output = run.cmd.flag("output");
  run.emit(output, dump(result));
  run.emit(csv_sibling(output), "source,target,measure,value\n" + source_id +
                                    ',' + target_id + ',' +
                                    std::string(measure_name(measure)) + ',' +
                                    format_double(value) + '\n');
  run.out << measure_name(measure) << ' ' << format_double(value) << '\n';
}

std::vector<std::string> profile_source_ids(const Command& cmd) {
  if (cmd.has("source-id")) return cmd.values("source-id");
  std::vector<std::string> ids;
  for (const auto& s : cmd.values("source"))
    ids.push_back(fs::path(s).stem().string());
  return ids;
}

std::string profile_target_id(const Command& cmd) {
  if (cmd.has("target-id")) return cmd.flag("target-id");
  return fs::path(cmd.flag("target")).stem().string();
}

fs::path profile_path(const Command& cmd, const std::string& source_id) {
  return fs::path(cmd.flag("output-dir")) /
         (source_id + "--" + profile_target_id(cmd) + ".profile.json");
}

void run_profile(Run& run) {
  const auto sources = run.cmd.values("source");
  const auto source_ids = profile_source_ids(run.cmd);
  for (std::size_t i = 0; i < source_ids.size(); ++i)
    for (std::size_t j = i + 1; j < source_ids.size(); ++j)
      if (source_ids[i] == source_ids[j])
        throw UsageError("profile: duplicate source id \"" + source_ids[i] +
                         "\"; set --source-id");
  const std::string target_id = profile_target_id(run.cmd);

  SamplingPlan plan;
  plan.num_subcorpora = *parse_uint(run.cmd.flag("samples"));
  plan.token_budget = *parse_uint(run.cmd.flag("sample-tokens"));
  plan.seed = *parse_uint(run.cmd.flag("seed"));
  plan.mode = parse_sampling_mode(run.cmd.flag("mode"));

  const ContentWordLexicon lex = lexicon(run);
  ProfileComponents components;
  components.lm = kn_config(run.cmd);
  components.tokenizer_fingerprint =
      tokenizer_fingerprint(tokenizer_config(run.cmd));
  components.lexicon = &lex;
  components.pooling = parse_pooling(run.cmd.flag("pooling"));
  components.jsd_top_k = top_k(run.cmd);
  components.sample_target = run.cmd.flag("sample-target") == "true";
  components.threads = run.threads;

  auto vocab = std::make_shared<Vocabulary>();
  auto target = load(run, run.cmd.flag("target"), vocab);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    auto source = load(run, sources[i], vocab);
    SimilarityProfile profile = similarity_profile(
        source, target, plan, components, source_ids[i], target_id);
    for (const auto& w : profile.warnings)
      run.warn(source_ids[i] + ": " + w);
    const fs::path output = profile_path(run.cmd, source_ids[i]);
    run.emit(output, dump(profile_to_json(profile)));
    run.emit(csv_sibling(output), profile_to_csv(profile));
    const auto& jsd_summary = profile.measure(profile.headline_jsd());
    run.out << source_ids[i] << " -> " << target_id
            << ": ppl " << format_double(profile.measure(Measure::kPpl).mean)
            << ", jsd " << format_double(jsd_summary.mean) << ", tvc "
            << format_double(profile.measure(Measure::kTvc).mean) << ", ttr "
            << format_double(profile.measure(Measure::kTtr).mean) << '\n';
  }
}

std::vector<SimilarityProfile> load_profiles(Run& run) {
  std::vector<SimilarityProfile> profiles;
  for (const auto& p : run.cmd.positionals) {
    run.input(p);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(p));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(p + ": " + e.what());
    }
    profiles.push_back(profile_from_json(j));
  }
  return profiles;
}

void run_rank(Run& run) {
  auto profiles = load_profiles(run);
  const RankKey key = parse_rank_key(run.cmd.flag("key"));
  auto ranking = rank_sources(profiles, key);
  const fs::path output = run.cmd.flag("output");
  run.emit(output, dump(ranking_to_json(profiles, ranking, key)));
  std::string csv = "rank,source,score\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    csv += std::to_string(i + 1) + ',' + ranking[i].source_id + ',' +
           format_double(ranking[i].score) + '\n';
    run.out << i + 1 << ". " << ranking[i].source_id << '\n';
  }
  run.emit(csv_sibling(output), std::move(csv));
}

void run_correlate(Run& run) {
  const std::string& results_spec = run.cmd.flag("results");
  ResultsTable results;
  if (results_spec == "builtin:task-means") {
    results = ResultsTable::bundled_task_means();
  } else {
    run.input(results_spec);
    results = ResultsTable::load(results_spec);
  }
  if (auto p = run.opt("task-map")) {
    run.input(*p);
    for (auto& [task, target] : read_mapping(*p))
      results.map_task(std::move(task), std::move(target));
  }
  if (auto p = run.opt("model-map")) {
    run.input(*p);
    for (auto& [model, source] : read_mapping(*p))
      results.map_model(std::move(model), std::move(source));
  }
  auto points = compute_deltas(results, run.cmd.flag("baseline"));

  SimilarityTable similarities;
  if (auto p = run.opt("similarities")) {
    run.input(*p);
    similarities = SimilarityTable::load(*p);
  }
  auto profiles = load_profiles(run);
  for (const auto& p : profiles)
    for (const auto& [m, s] : p.measures)
      similarities.set(p.source_id, p.target_id, m, s.mean);
  attach_similarities(points, results, similarities);

  Measure jsd_measure = Measure::kJsdPooled;
  const std::string& pooling = run.cmd.flag("pooling");
  if (pooling == "1") jsd_measure = Measure::kJsd1;
  if (pooling == "2") jsd_measure = Measure::kJsd2;
  if (pooling == "3") jsd_measure = Measure::kJsd3;
  auto report = correlation_matrix(
      points, parse_directionality(run.cmd.flag("direction")), jsd_measure);
  for (const auto& w : report.warnings) run.warn(w);

  const fs::path output = run.cmd.flag("output");
  fs::path deltas_path;
  if (auto d = run.opt("deltas")) {
    deltas_path = *d;
  } else {
    deltas_path = output;
    deltas_path.replace_extension(".deltas.csv");
  }
  ordered_json j = report_to_json(report);
  j["baseline"] = run.cmd.flag("baseline");
  j["jsd_measure"] = measure_name(jsd_measure);
  run.emit(deltas_path, deltas_to_csv(points));
  run.emit(output, dump(j));
  run.emit(csv_sibling(output), report_to_csv(report));
  run.out << points.size() << " delta points\n";
}

std::vector<fs::path> manifest_paths(const Command& cmd) {
  if (cmd.has("manifest")) return {fs::path(cmd.flag("manifest"))};
  if (cmd.subcommand == "profile") {
    std::vector<fs::path> paths;
    for (const auto& id : profile_source_ids(cmd))
      paths.push_back(with_suffix(profile_path(cmd, id), ".manifest.json"));
    return paths;
  }
  if (cmd.has("output"))
    return {with_suffix(cmd.flag("output"), ".manifest.json")};
  return {};
}

ordered_json manifest(const Run& run, const std::optional<std::string>& error,
                      double seconds) {
  const Command& cmd = run.cmd;
  ordered_json j;
  j["tool"] = "corpus-affinity";
  j["version"] = tool_version();
  j["subcommand"] = cmd.subcommand;
  ordered_json flags = ordered_json::object();
  for (const auto& [name, values] : cmd.flags)
    flags[name] = values.size() == 1 ? ordered_json(values.front())
                                     : ordered_json(values);
  flags["threads"] = std::to_string(run.threads);
  j["flags"] = std::move(flags);
  j["positionals"] = cmd.positionals;
  ordered_json inputs = ordered_json::array();
  for (const auto& p : run.inputs) {
    ordered_json in;
    in["path"] = p.string();
    try {
      in["sha256"] = sha256_file(p);
    } catch (const Error&) {
      in["sha256"] = nullptr;
    }
    inputs.push_back(std::move(in));
  }
  j["inputs"] = std::move(inputs);
  ordered_json outputs = ordered_json::array();
  if (!error)
    for (const auto& [p, content] : run.artifacts) outputs.push_back(p.string());
  j["outputs"] = std::move(outputs);
  j["seed"] = cmd.subcommand == "profile"
                  ? ordered_json(*parse_uint(cmd.flag("seed")))
                  : ordered_json();
  j["warnings"] = run.warnings;
  j["status"] = error ? "error" : "ok";
  if (error) j["error"] = *error;
  j["wall_clock_seconds"] = seconds;
  return j;
}

}  // namespace

int execute(const Command& cmd, std::ostream& out, std::ostream& err) {
  if (!cmd.help_text.empty()) {
    out << cmd.help_text;
    return kExitOk;
  }
  const auto start = Clock::now();
  Run run{cmd, out, err};
  std::optional<std::string> error;
  int code = kExitOk;
  try {
    std::optional<int> requested;
    if (cmd.has("threads"))
      requested = static_cast<int>(*parse_uint(cmd.flag("threads")));
    run.threads = resolve_threads(requested);

    const std::string& s = cmd.subcommand;
    if (s == "normalize") run_normalize(run);
    else if (s == "count") run_count(run);
    else if (s == "lm-build") run_lm_build(run);
    else if (s == "lm-ppl") run_lm_ppl(run);
    else if (s == "sim") run_sim(run);
    else if (s == "profile") run_profile(run);
    else if (s == "rank") run_rank(run);
    else if (s == "correlate") run_correlate(run);
    else throw UsageError("unknown subcommand \"" + s + "\"");

    for (const auto& [path, content] : run.artifacts)
      write_file_atomic(path, content);
  } catch (const ArgumentError& e) {
    error = e.what();
    code = kExitUsage;
  } catch (const std::exception& e) {
    error = e.what();
    code = kExitDataError;
  }
  if (error) err << "error: " << *error << '\n';

  const double seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  try {
    const std::string text = dump(manifest(run, error, seconds));
    for (const auto& p : manifest_paths(cmd)) write_file_atomic(p, text);
  } catch (const std::exception& e) {
    err << "error: cannot write run manifest: " << e.what() << '\n';
    if (code == kExitOk) code = kExitDataError;
  }
  return code;
}

int run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err) {
  Command cmd;
  try {
    cmd = parse_args(args);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return execute(cmd, out, err);
}

}  // namespace corpus_affinity::cli
