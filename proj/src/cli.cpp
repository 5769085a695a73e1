// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "attnorigin/awd.hpp"
#include "attnorigin/error.hpp"
#include "attnorigin/graphattn.hpp"
#include "attnorigin/io.hpp"
#include "attnorigin/origin.hpp"
#include "attnorigin/report.hpp"
#include "attnorigin/rouge.hpp"
#include "attnorigin/simgraph.hpp"
#include "attnorigin/textunits.hpp"

namespace attnorigin::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr const char* kEnvPrefix = "ATTNORIGIN_";
constexpr const char* kUnitsSuffix = ".units.json";
constexpr const char* kGraphSuffix = ".graph.json";
constexpr const char* kSummarySuffix = ".summary.json";
constexpr const char* kAwdSuffix = ".awd";
constexpr const char* kVocabFile = "vocab.json";

std::string env_name(const std::string& flag) {
  std::string out = kEnvPrefix;
  for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

/// Registers `--name` with its environment override.
template <typename T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& target, const std::string& help) {
  return app->add_option("--" + name, target, help)->envname(env_name(name));
}

// ---------------------------------------------------------------------------
// --config: flat "key = value" lines with the same keys as the flags.

void apply_config(CLI::App* app, const std::string& path) {
  std::istringstream in(io::read_text(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = textunits::trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config " + path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = textunits::trim(text.substr(0, eq));
    std::string value = textunits::trim(text.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = key == "config" ? nullptr : app->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw ParseError("config " + path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    const std::string env = opt->get_envname();
    if (!env.empty() && std::getenv(env.c_str()) != nullptr) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

// ---------------------------------------------------------------------------
// File helpers

std::vector<fs::path> list_with_suffix(const fs::path& dir, const std::string& suffix) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

std::vector<textunits::UnitizedInput> load_units(const fs::path& dir) {
  std::vector<textunits::UnitizedInput> out;
  for (const auto& path : list_with_suffix(dir, kUnitsSuffix)) {
    try {
      out.push_back(io::unitized_from_json(io::load_json(path)));
    } catch (const Error& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].set_id == out[i - 1].set_id) throw ParseError("duplicate set_id '" + out[i].set_id + "'");
  }
  return out;
}

int resolve_threads(int threads) {
  if (threads < 0) throw InvalidArgument("--threads must be >= 0");
  return threads == 0 ? omp_get_max_threads() : threads;
}

/// Runs `fn(i)` for every item on a dynamic OpenMP pool and rethrows the
/// lowest-index failure, so the reported error does not depend on timing.
template <typename Fn>
void for_each_item(std::size_t n, int threads, Fn&& fn) {
  std::vector<std::string> errors(n);
  std::vector<std::uint8_t> failed(n, 0);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
      failed[static_cast<std::size_t>(i)] = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i] != 0) throw Error(errors[i]);
  }
}

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessOptions {
  std::string corpus;
  std::string out;
  std::string mode = "paragraph";
  int num_units = 0;
  int tokens_per_unit = 0;
  int limit = 0;
};

void cmd_preprocess(const PreprocessOptions& o, std::ostream& out) {
  const textunits::UnitMode mode = textunits::parse_unit_mode(o.mode);
  const bool para = mode == textunits::UnitMode::paragraph;
  const int L = o.num_units > 0 ? o.num_units : (para ? textunits::kParagraphUnits : textunits::kSentenceUnits);
  const int T = o.tokens_per_unit > 0 ? o.tokens_per_unit
                                      : (para ? textunits::kParagraphTokens : textunits::kSentenceTokens);
  if (o.num_units < 0 || o.tokens_per_unit < 0) throw InvalidArgument("--L and --T must be positive");
  if (o.limit < 0) throw InvalidArgument("--limit must be >= 0");

  auto sets = io::read_corpus(o.corpus);
  if (o.limit > 0 && sets.size() > static_cast<std::size_t>(o.limit)) sets.resize(static_cast<std::size_t>(o.limit));
  std::map<std::string, int> seen;
  for (const auto& s : sets) {
    if (seen[s.set_id]++ > 0) throw ParseError("corpus: duplicate set_id '" + s.set_id + "'");
  }

  std::vector<textunits::UnitizedInput> inputs;
  inputs.reserve(sets.size());
  long long units = 0;
  long long pads = 0;
  for (const auto& s : sets) {
    inputs.push_back(textunits::unitize(s, mode, L, T));
    units += inputs.back().real_units();
    pads += inputs.back().num_units - inputs.back().real_units();
  }
  ensure_dir(o.out);
  for (const auto& in : inputs) {
    io::write_text(fs::path(o.out) / (in.set_id + kUnitsSuffix), io::dump(io::unitized_to_json(in)));
  }
  out << "sets=" << inputs.size() << " units=" << units << " pad=" << pads << "\n";
}

// ---------------------------------------------------------------------------
// graph

struct GraphOptions {
  std::string units;
  std::string out;
  double tau = 0.0;
  int threads = 0;
};

void cmd_graph(const GraphOptions& o, std::ostream& out) {
  if (!(o.tau >= 0.0 && o.tau < 1.0)) throw InvalidArgument("--tau must lie in [0, 1)");
  const int threads = resolve_threads(o.threads);
  const auto inputs = load_units(o.units);
  ensure_dir(o.out);
  for_each_item(inputs.size(), threads, [&](std::size_t i) {
    const auto g = simgraph::build_graph_serial(inputs[i].units, o.tau);
    io::write_text(fs::path(o.out) / (inputs[i].set_id + kGraphSuffix), io::graph_to_string(g));
  });
  out << "graphs=" << inputs.size() << "\n";
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  std::string units;
  std::string graphs;
  std::string out;
  std::string weights;
  std::string save_weights;
  std::string record_awd;
  std::uint64_t seed = 0;
  int beam_size = 4;
  int max_len = 64;
  int min_len = 0;
  double length_penalty = 0.6;
  std::optional<double> sigma;
  std::optional<std::string> shift;
  int d_model = 64;
  int num_layers = 8;
  int num_heads = 8;
  int d_ff = 128;
  int concentrate = -1;
  double concentrate_margin = 25.0;
  int sentence_length = 6;
  int threads = 0;
};

graphattn::DecoderWeights build_weights(const GenerateOptions& o,
                                        const std::vector<textunits::UnitizedInput>& inputs) {
  graphattn::DecoderWeights w;
  if (!o.weights.empty()) {
    w = io::weights_from_json(io::load_json(o.weights));
  } else {
    graphattn::ModelConfig c;
    c.d_model = o.d_model;
    c.num_layers = o.num_layers;
    c.num_heads = o.num_heads;
    c.d_ff = o.d_ff;
    c.num_units = inputs.empty() ? textunits::kParagraphUnits : inputs.front().num_units;
    c.max_len = o.max_len;
    const auto vocab = graphattn::Vocabulary::from_units(inputs);
    c.vocab_size = vocab.size();
    if (o.shift) c.shift = graphattn::parse_shift_form(*o.shift);
    if (o.sigma) c.sigma = *o.sigma;
    c.validate();
    if (o.concentrate >= 0) {
      graphattn::ConcentratorOptions co;
      co.target = o.concentrate;
      co.margin = o.concentrate_margin;
      co.sentence_length = o.sentence_length;
      w = graphattn::make_concentrator_weights(o.seed, c, vocab, co);
    } else {
      w = graphattn::make_synthetic_weights(o.seed, c, vocab);
    }
    return w;
  }
  if (o.shift) w.config.shift = graphattn::parse_shift_form(*o.shift);
  if (o.sigma) w.config.sigma = *o.sigma;
  w.validate();
  return w;
}

void cmd_generate(const GenerateOptions& o, std::ostream& out) {
  if (o.beam_size < 1) throw InvalidArgument("--beam-size must be >= 1");
  if (o.max_len < 1) throw InvalidArgument("--max-len must be >= 1");
  if (o.min_len < 0 || o.min_len > o.max_len) throw InvalidArgument("--min-len must lie in [0, --max-len]");
  if (o.length_penalty < 0.0) throw InvalidArgument("--length-penalty must be >= 0");
  if (o.sigma && !(*o.sigma > 0.0)) throw InvalidArgument("--sigma must be > 0");
  if (!o.weights.empty() && o.concentrate >= 0) {
    throw InvalidArgument("--concentrate builds its own weights and cannot be combined with --weights");
  }
  const int threads = resolve_threads(o.threads);

  const auto inputs = load_units(o.units);
  std::vector<simgraph::SimilarityGraph> graphs;
  graphs.reserve(inputs.size());
  for (const auto& in : inputs) {
    const fs::path path = fs::path(o.graphs) / (in.set_id + kGraphSuffix);
    if (!fs::exists(path)) throw IoError("missing graph for set '" + in.set_id + "': " + path.string());
    graphs.push_back(io::graph_from_json(io::load_json(path)));
    if (graphs.back().size != in.num_units) {
      throw InvalidArgument("set '" + in.set_id + "': graph has " + std::to_string(graphs.back().size) +
                            " units but the unitized input has L=" + std::to_string(in.num_units));
    }
  }
  const graphattn::DecoderWeights weights = build_weights(o, inputs);
  for (const auto& in : inputs) {
    if (in.num_units != weights.config.num_units) {
      throw InvalidArgument("set '" + in.set_id + "': L=" + std::to_string(in.num_units) +
                            " does not match the model's " + std::to_string(weights.config.num_units) + " units");
    }
  }
  if (o.max_len > weights.config.max_len) {
    throw InvalidArgument("--max-len " + std::to_string(o.max_len) + " exceeds the model's " +
                          std::to_string(weights.config.max_len) + " positions");
  }

  const fs::path awd_dir = o.record_awd.empty() ? fs::path(o.out) : fs::path(o.record_awd);
  ensure_dir(o.out);
  ensure_dir(awd_dir);
  io::write_text(fs::path(o.out) / kVocabFile, io::dump(json{{"tokens", weights.vocab.tokens()}}));
  if (!o.save_weights.empty()) io::write_text(o.save_weights, io::dump(io::weights_to_json(weights)));

  graphattn::GenerationConfig gc;
  gc.beam_size = o.beam_size;
  gc.max_len = o.max_len;
  gc.length_penalty = o.length_penalty;
  gc.min_len = o.min_len;
  std::vector<std::size_t> lengths(inputs.size(), 0);
  for_each_item(inputs.size(), threads, [&](std::size_t i) {
    const auto& in = inputs[i];
    const auto result = graphattn::generate_with_beam(in, weights, graphs[i], gc);
    io::SummaryRecord rec{in.set_id, result.tokens, result.beam_trace, result.winning_beam};
    awd::write_awd(result.awd, awd_dir / (in.set_id + kAwdSuffix));
    io::write_text(fs::path(o.out) / (in.set_id + kSummarySuffix), io::dump(io::summary_to_json(rec)));
    lengths[i] = result.tokens.size();
  });
  std::size_t tokens = 0;
  for (auto n : lengths) tokens += n;
  out << "summaries=" << inputs.size() << " tokens=" << tokens << "\n";
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::string units;
  std::string summaries;
  std::string awd;
  std::string vocab;
  std::string out;
  std::string layers = "all";
  std::string variant = "all";
  std::string aggregation = "mean";
  std::string posbias = "auto";
  std::string format = "all";
  int limit = 0;
  int threads = 0;
};

std::vector<int> parse_layers(const std::string& text, int num_layers) {
  std::vector<int> out;
  if (text == "all") {
    for (int l = 0; l < num_layers; ++l) out.push_back(l);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidArgument("--layers: bad layer '" + s + "'");
    if (v < 1 || v > num_layers) {
      throw InvalidArgument("--layers: layer " + s + " outside 1.." + std::to_string(num_layers));
    }
    return v - 1;
  };
  while (std::getline(ss, item, ',')) {
    item = textunits::trim(item);
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const int a = number(item.substr(0, dash));
      const int b = number(item.substr(dash + 1));
      if (b < a) throw InvalidArgument("--layers: empty range '" + item + "'");
      for (int l = a; l <= b; ++l) out.push_back(l);
    } else {
      out.push_back(number(item));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw InvalidArgument("--layers: no layer selected");
  return out;
}

std::vector<rouge::Variant> parse_variants(const std::string& text) {
  if (text == "all") return {rouge::Variant::r1, rouge::Variant::r2, rouge::Variant::rl};
  std::vector<rouge::Variant> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = rouge::parse_variant(textunits::trim(item));
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("--variant: no variant selected");
  std::sort(out.begin(), out.end());
  return out;
}

struct Formats {
  bool json = false;
  bool csv = false;
  bool text = false;
};

Formats parse_formats(const std::string& text) {
  Formats f;
  if (text == "all") return {true, true, true};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = textunits::trim(item);
    if (item == "json") f.json = true;
    else if (item == "csv") f.csv = true;
    else if (item == "text") f.text = true;
    else throw InvalidArgument("--format: unknown format '" + item + "' (json, csv, text, all)");
  }
  if (!f.json && !f.csv && !f.text) throw InvalidArgument("--format: nothing to write");
  return f;
}

struct Loaded {
  io::SummaryRecord record;
  const textunits::UnitizedInput* input = nullptr;
  awd::AwdTensor awd;
};

std::string summary_text(const std::vector<int>& tokens, const graphattn::Vocabulary& vocab) {
  std::string text;
  for (int id : tokens) {
    if (graphattn::Vocabulary::is_special(id)) continue;
    if (!text.empty()) text += ' ';
    text += vocab.token(id);
  }
  return text;
}

origin::SummaryAnalysis analyze_one(const Loaded& item, const graphattn::Vocabulary& vocab,
                                    awd::Aggregation aggregation) {
  const auto& rec = item.record;
  const auto& in = *item.input;
  for (int id : rec.tokens) {
    if (id < 0 || id >= vocab.size()) {
      throw ParseError("set '" + rec.set_id + "': token id " + std::to_string(id) + " outside the vocabulary");
    }
  }
  if (static_cast<int>(item.awd.units()) != in.num_units) {
    throw ParseError("set '" + rec.set_id + "': AWD has " + std::to_string(item.awd.units()) +
                     " units but the unitized input has L=" + std::to_string(in.num_units));
  }
  const int length = static_cast<int>(rec.tokens.size());
  const auto aligned = awd::beam_decode_awd(item.awd, rec.beam_trace, rec.winning_beam, length);

  std::vector<int> body = rec.tokens;
  if (!body.empty() && body.back() == graphattn::kEosId) body.pop_back();
  const auto spans = awd::split_summary_sentences(body, graphattn::kEosSentenceId);

  std::vector<rouge::Tokens> sentences;
  for (const auto& [b, e] : spans) {
    rouge::Tokens words;
    for (int t = b; t < e; ++t) {
      const int id = body[static_cast<std::size_t>(t)];
      if (!graphattn::Vocabulary::is_special(id)) words.push_back(vocab.token(id));
    }
    sentences.push_back(std::move(words));
  }
  origin::SummaryAnalysis a;
  a.set_id = rec.set_id;
  a.attention = awd::aggregate_to_sentences_serial(aligned, spans, aggregation);
  a.origin = origin::reference_metric_serial(sentences, in);
  a.doc_boundaries = in.doc_boundaries;
  return a;
}

report::VariantValues layer_values(const std::vector<origin::Correlations>& cs,
                                   const std::vector<rouge::Variant>& variants, int layer) {
  report::VariantValues v;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    v[static_cast<std::size_t>(variants[i])] = cs[i].per_layer[static_cast<std::size_t>(layer)];
  }
  return v;
}

void cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  const auto variants = parse_variants(o.variant);
  const auto aggregation = awd::parse_aggregation(o.aggregation);
  const Formats formats = parse_formats(o.format);
  if (o.posbias != "auto" && o.posbias != "on" && o.posbias != "off") {
    throw InvalidArgument("--posbias must be auto, on or off");
  }
  if (o.limit < 0) throw InvalidArgument("--limit must be >= 0");
  const int threads = resolve_threads(o.threads);

  const auto inputs = load_units(o.units);
  std::map<std::string, const textunits::UnitizedInput*> by_id;
  for (const auto& in : inputs) by_id[in.set_id] = &in;

  const fs::path vocab_path = o.vocab.empty() ? fs::path(o.summaries) / kVocabFile : fs::path(o.vocab);
  const json vj = io::load_json(vocab_path);
  if (!vj.is_object() || !vj.contains("tokens")) throw ParseError(vocab_path.string() + ": missing 'tokens'");
  const graphattn::Vocabulary vocab(vj.at("tokens").get<std::vector<std::string>>());
  if (vocab.tokens() != vj.at("tokens").get<std::vector<std::string>>()) {
    throw ParseError(vocab_path.string() + ": vocabulary must start with the special tokens");
  }

  auto paths = list_with_suffix(o.summaries, kSummarySuffix);
  if (o.limit > 0 && paths.size() > static_cast<std::size_t>(o.limit)) paths.resize(static_cast<std::size_t>(o.limit));
  if (paths.empty()) throw InvalidArgument("analyze: no *" + std::string(kSummarySuffix) + " files in " + o.summaries);

  const fs::path awd_dir = o.awd.empty() ? fs::path(o.summaries) : fs::path(o.awd);
  std::vector<Loaded> loaded(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    try {
      loaded[i].record = io::summary_from_json(io::load_json(paths[i]));
    } catch (const Error& e) {
      throw ParseError(paths[i].string() + ": " + e.what());
    }
    const auto it = by_id.find(loaded[i].record.set_id);
    if (it == by_id.end()) {
      throw InvalidArgument("set_id mismatch: summary '" + loaded[i].record.set_id + "' has no unitized input in " +
                            o.units);
    }
    loaded[i].input = it->second;
  }
  for_each_item(loaded.size(), threads, [&](std::size_t i) {
    const fs::path path = awd_dir / (loaded[i].record.set_id + kAwdSuffix);
    try {
      loaded[i].awd = awd::read_awd(path);
    } catch (const Error& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  });

  std::vector<std::optional<origin::SummaryAnalysis>> analyzed(loaded.size());
  for_each_item(loaded.size(), threads, [&](std::size_t i) {
    auto a = analyze_one(loaded[i], vocab, aggregation);
    if (a.attention.sentences > 0) analyzed[i] = std::move(a);
  });
  std::vector<origin::SummaryAnalysis> batch;
  for (std::size_t i = 0; i < analyzed.size(); ++i) {
    if (analyzed[i]) {
      batch.push_back(std::move(*analyzed[i]));
    } else {
      err << "analyze: skipping '" << loaded[i].record.set_id << "': summary has no sentences\n";
    }
  }
  if (batch.empty()) throw InvalidArgument("analyze: no summary has a sentence to analyze");
  const int num_layers = batch.front().attention.layers;
  const int num_heads = batch.front().attention.heads;
  for (const auto& a : batch) {
    if (a.attention.layers != num_layers || a.attention.heads != num_heads) {
      throw InvalidArgument("analyze: set '" + a.set_id + "' was recorded with a different layer/head shape");
    }
  }
  const auto layers = parse_layers(o.layers, num_layers);

  bool have_bounds = true;
  for (const auto& a : batch) have_bounds = have_bounds && a.doc_boundaries.has_value();
  if (o.posbias == "on" && !have_bounds) {
    throw InvalidArgument("posbias: the inputs carry no document boundaries, so within-document positions are unknown");
  }

  std::vector<origin::Correlations> pooled;
  for (auto v : variants) pooled.push_back(origin::correlate_awd_origin(batch, v));

  report::Report r;
  r.variants = variants;
  r.sample_count = pooled.front().sample_count;
  for (int l : layers) r.layers.push_back({l + 1, layer_values(pooled, variants, l)});
  for (int l : layers) {
    for (int h = 0; h < num_heads; ++h) {
      report::VariantValues v;
      for (std::size_t i = 0; i < variants.size(); ++i) {
        v[static_cast<std::size_t>(variants[i])] = pooled[i].per_head[static_cast<std::size_t>(l * num_heads + h)];
      }
      r.heads.push_back({l + 1, h + 1, v});
    }
  }
  for (int l : layers) r.head_matrix.push_back({l + 1, report::OptionalMatrix::from(origin::head_correlations(batch, l))});
  r.layer_matrix = report::OptionalMatrix::from(origin::layer_correlations(batch));

  if (o.posbias != "off" && have_bounds) {
    r.posbias = report::PosBiasBlock::from(origin::positional_bias(batch, layers.back()), layers.back() + 1);
  } else if (o.posbias == "auto" && !have_bounds) {
    err << "analyze: posbias skipped: the inputs carry no document boundaries\n";
  }

  for (const auto& a : batch) {
    report::SummaryCoefficients sc{a.set_id, {}};
    std::vector<origin::Correlations> own;
    for (auto v : variants) {
      try {
        own.push_back(origin::correlate_awd_origin(std::span(&a, 1), v));
      } catch (const InvalidArgument&) {
        origin::Correlations empty;
        empty.per_layer.assign(static_cast<std::size_t>(num_layers), std::nullopt);
        own.push_back(std::move(empty));
      }
    }
    for (int l : layers) sc.layers.push_back({l + 1, layer_values(own, variants, l)});
    r.per_summary.push_back(std::move(sc));
  }

  bool have_gold = true;
  for (const auto& item : loaded) have_gold = have_gold && item.input->gold_summary.has_value();
  if (have_gold) {
    double f[3] = {0, 0, 0};
    for (const auto& item : loaded) {
      const auto t = rouge::evaluate_summary(summary_text(item.record.tokens, vocab), *item.input->gold_summary);
      f[0] += t.r1.f1;
      f[1] += t.r2.f1;
      f[2] += t.rl.f1;
    }
    const double n = static_cast<double>(loaded.size());
    const bool para = loaded.front().input->mode == textunits::UnitMode::paragraph;
    r.rouge = report::RougeTableRow{para ? "Paragraphs" : "Sentences", 100.0 * f[0] / n, 100.0 * f[1] / n,
                                    100.0 * f[2] / n, static_cast<std::int64_t>(loaded.size())};
  }

  ensure_dir(o.out);
  if (formats.json) io::write_text(fs::path(o.out) / "report.json", report::to_json(r).dump(1) + "\n");
  if (formats.csv) io::write_text(fs::path(o.out) / "report.csv", report::to_csv(r));
  if (formats.text) io::write_text(fs::path(o.out) / "report.txt", report::to_text(r));
  out << "summaries=" << batch.size() << " samples=" << r.sample_count << "\n";
}

// ---------------------------------------------------------------------------
// heatmap

struct HeatmapOptions {
  std::string report;
  std::string out;
};

void cmd_heatmap(const HeatmapOptions& o) {
  const fs::path path(o.report);
  const report::Report r = path.extension() == ".csv" ? report::report_from_csv(io::read_text(path))
                                                      : report::report_from_json(io::load_json(path));
  if (!r.posbias) throw InvalidArgument("heatmap: " + o.report + " has no posbias block");
  io::write_text(o.out, report::render_heatmap_svg(*r.posbias));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attention-origin analysis for graph-based summarizers", "attnorigin"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::map<CLI::App*, std::string> configs;
  auto add_config = [&](CLI::App* sub) {
    flag(sub, "config", configs[sub], "Flat key = value file; keys match the flag names");
  };

  PreprocessOptions pre;
  auto* p = app.add_subcommand("preprocess", "Unitize a JSONL corpus into fixed L x T grids");
  flag(p, "corpus", pre.corpus, "JSONL corpus file");
  flag(p, "out", pre.out, "Output directory for <set_id>.units.json");
  flag(p, "mode", pre.mode, "paragraph or sentence");
  flag(p, "L", pre.num_units, "Units per set (default 30 paragraphs / 60 sentences)");
  flag(p, "T", pre.tokens_per_unit, "Tokens per unit (default 60 / 30)");
  flag(p, "limit", pre.limit, "Process only the first N sets (0 = all)");
  add_config(p);

  GraphOptions gr;
  auto* g = app.add_subcommand("graph", "Build TF-IDF similarity graphs");
  flag(g, "units", gr.units, "Directory of unitized sets");
  flag(g, "out", gr.out, "Output directory for <set_id>.graph.json");
  flag(g, "tau", gr.tau, "Similarity threshold in [0, 1)");
  flag(g, "threads", gr.threads, "Worker threads (0 = OpenMP default)");
  add_config(g);

  GenerateOptions ge;
  auto* gen = app.add_subcommand("generate", "Beam-search summaries while recording graph attention");
  flag(gen, "units", ge.units, "Directory of unitized sets");
  flag(gen, "graphs", ge.graphs, "Directory of similarity graphs");
  flag(gen, "out", ge.out, "Output directory for summaries and vocab.json");
  flag(gen, "weights", ge.weights, "Weights JSON; synthetic weights from --seed when absent");
  flag(gen, "save-weights", ge.save_weights, "Write the weights used to this file");
  flag(gen, "record-awd", ge.record_awd, "Directory for <set_id>.awd (default: --out)");
  flag(gen, "seed", ge.seed, "Seed for synthetic weights");
  flag(gen, "beam-size", ge.beam_size, "Beam width");
  flag(gen, "max-len", ge.max_len, "Maximum summary length in tokens");
  flag(gen, "min-len", ge.min_len, "Tokens before EOS may be generated");
  flag(gen, "length-penalty", ge.length_penalty, "Length-normalization exponent");
  flag(gen, "sigma", ge.sigma, "Graph-shift bandwidth");
  flag(gen, "shift", ge.shift, "squared-similarity or squared-distance");
  flag(gen, "d-model", ge.d_model, "Model width (synthetic weights)");
  flag(gen, "num-layers", ge.num_layers, "Decoder layers (synthetic weights)");
  flag(gen, "num-heads", ge.num_heads, "Graph-attention heads (synthetic weights)");
  flag(gen, "d-ff", ge.d_ff, "Feed-forward width (synthetic weights)");
  flag(gen, "concentrate", ge.concentrate, "Build weights whose heads all attend unit K (-1 = off)");
  flag(gen, "concentrate-margin", ge.concentrate_margin, "Logit margin of the concentrated unit");
  flag(gen, "sentence-length", ge.sentence_length, "Tokens per sentence under --concentrate");
  flag(gen, "threads", ge.threads, "Worker threads (0 = OpenMP default)");
  add_config(gen);

  AnalyzeOptions an;
  auto* a = app.add_subcommand("analyze", "Correlate sentence-level attention with the reference metric");
  flag(a, "units", an.units, "Directory of unitized sets");
  flag(a, "summaries", an.summaries, "Directory of <set_id>.summary.json");
  flag(a, "awd", an.awd, "Directory of <set_id>.awd (default: --summaries)");
  flag(a, "vocab", an.vocab, "Vocabulary file (default: <summaries>/vocab.json)");
  flag(a, "out", an.out, "Output directory for report.{json,csv,txt}");
  flag(a, "layers", an.layers, "1-based layers, e.g. 1,3-5 or all");
  flag(a, "variant", an.variant, "r1, r2, rl, a comma list, or all");
  flag(a, "aggregation", an.aggregation, "mean or median");
  flag(a, "posbias", an.posbias, "auto, on or off");
  flag(a, "format", an.format, "json, csv, text, a comma list, or all");
  flag(a, "limit", an.limit, "Analyze only the first N summaries (0 = all)");
  flag(a, "threads", an.threads, "Worker threads (0 = OpenMP default)");
  add_config(a);

  HeatmapOptions hm;
  auto* h = app.add_subcommand("heatmap", "Render the positional-bias block of a report as SVG");
  flag(h, "report", hm.report, "report.json or report.csv");
  flag(h, "out", hm.out, "Output SVG path");
  add_config(h);

  auto require = [](const std::string& value, const char* name) {
    if (value.empty()) throw InvalidArgument(std::string("--") + name + " is required");
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    CLI::App* sub = app.get_subcommands().front();
    if (!configs[sub].empty()) apply_config(sub, configs[sub]);

    if (sub == p) {
      require(pre.corpus, "corpus");
      require(pre.out, "out");
      cmd_preprocess(pre, out);
    } else if (sub == g) {
      require(gr.units, "units");
      require(gr.out, "out");
      cmd_graph(gr, out);
    } else if (sub == gen) {
      require(ge.units, "units");
      require(ge.graphs, "graphs");
      require(ge.out, "out");
      cmd_generate(ge, out);
    } else if (sub == a) {
      require(an.units, "units");
      require(an.summaries, "summaries");
      require(an.out, "out");
      cmd_analyze(an, out, err);
    } else {
      require(hm.report, "report");
      require(hm.out, "out");
      cmd_heatmap(hm);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "attnorigin: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace attnorigin::cli
