// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "attnorigin/error.hpp"

namespace attnorigin::io {

namespace fs = std::filesystem;
using textunits::MultiDocSet;
using textunits::RawDocument;
using textunits::TextualUnit;
using textunits::UnitizedInput;

namespace {

template <class T>
T get(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(std::string(what) + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw IoError("failed writing '" + path.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move output into '" + path.string() + "': " + ec.message());
}

std::string format_g9(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

json load_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

void check_set_id(const std::string& set_id) {
  if (set_id.empty() || set_id == "." || set_id == ".." ||
      set_id.find_first_of("/\\") != std::string::npos) {
    throw ParseError("set_id '" + set_id + "' cannot name an output file");
  }
}

// ---------------------------------------------------------------------------
// Corpus

MultiDocSet corpus_set_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("corpus entry must be a JSON object");
  MultiDocSet set;
  set.set_id = get<std::string>(j, "set_id", "corpus");
  check_set_id(set.set_id);
  const json& docs = j.contains("documents") ? j.at("documents") : json();
  if (!docs.is_array() || docs.empty()) throw ParseError("corpus: 'documents' must be a non-empty array");
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const json& d = docs[i];
    const std::string id = d.contains("doc_id") ? get<std::string>(d, "doc_id", "document")
                                                : set.set_id + "#" + std::to_string(i);
    if (d.contains("paragraphs")) {
      set.documents.push_back(RawDocument::from_paragraphs(
          id, get<std::vector<std::string>>(d, "paragraphs", "document")));
    } else if (d.contains("text")) {
      set.documents.push_back(RawDocument::from_text(id, get<std::string>(d, "text", "document")));
    } else {
      throw ParseError("corpus: document '" + id + "' has neither 'paragraphs' nor 'text'");
    }
  }
  if (j.contains("gold_summary") && !j.at("gold_summary").is_null()) {
    set.gold_summary = get<std::string>(j, "gold_summary", "corpus");
  }
  return set;
}

std::vector<MultiDocSet> parse_corpus(std::string_view contents) {
  std::vector<MultiDocSet> sets;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    ++line_no;
    std::size_t eol = contents.find('\n', pos);
    if (eol == std::string_view::npos) eol = contents.size();
    const std::string line = textunits::trim(contents.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;
    try {
      sets.push_back(corpus_set_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError("corpus line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return sets;
}

std::vector<MultiDocSet> read_corpus(const fs::path& path) { return parse_corpus(read_text(path)); }

// ---------------------------------------------------------------------------
// Unitized sets

json unitized_to_json(const UnitizedInput& input) {
  json units = json::array();
  for (const auto& u : input.units) {
    if (u.pad) continue;
    units.push_back({{"unit_index", u.unit_index},
                     {"doc_index", u.doc_index},
                     {"text", u.original_text},
                     {"tokens", u.tokens}});
  }
  json j{{"set_id", input.set_id},
         {"mode", textunits::to_string(input.mode)},
         {"L", input.num_units},
         {"T", input.tokens_per_unit},
         {"doc_ids", input.doc_ids},
         {"gold_summary", input.gold_summary ? json(*input.gold_summary) : json(nullptr)},
         {"units", units}};
  if (input.doc_boundaries) j["doc_boundaries"] = *input.doc_boundaries;
  return j;
}

UnitizedInput unitized_from_json(const json& j) {
  constexpr const char* what = "unitized input";
  UnitizedInput in;
  in.set_id = get<std::string>(j, "set_id", what);
  check_set_id(in.set_id);
  try {
    in.mode = textunits::parse_unit_mode(get<std::string>(j, "mode", what));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
  in.num_units = get<int>(j, "L", what);
  in.tokens_per_unit = get<int>(j, "T", what);
  if (in.num_units < 1 || in.tokens_per_unit < 1) throw ParseError("unitized input: L and T must be >= 1");
  if (j.contains("doc_ids")) in.doc_ids = get<std::vector<std::string>>(j, "doc_ids", what);
  if (j.contains("gold_summary") && !j.at("gold_summary").is_null()) {
    in.gold_summary = get<std::string>(j, "gold_summary", what);
  }
  in.units.resize(static_cast<std::size_t>(in.num_units));
  for (int i = 0; i < in.num_units; ++i) {
    in.units[static_cast<std::size_t>(i)].unit_index = i;
    in.units[static_cast<std::size_t>(i)].pad = true;
  }
  in.pad_mask.assign(in.token_budget(), 1);
  const json units = get<json>(j, "units", what);
  if (!units.is_array() || units.size() > static_cast<std::size_t>(in.num_units)) {
    throw ParseError("unitized input: 'units' must be an array of at most L entries");
  }
  for (std::size_t i = 0; i < units.size(); ++i) {
    TextualUnit u;
    u.unit_index = get<int>(units[i], "unit_index", what);
    if (u.unit_index != static_cast<int>(i)) {
      throw ParseError("unitized input: real units must be listed first, in order");
    }
    u.doc_index = units[i].contains("doc_index") ? get<int>(units[i], "doc_index", what) : 0;
    u.original_text = units[i].contains("text") ? get<std::string>(units[i], "text", what) : "";
    u.tokens = get<std::vector<std::string>>(units[i], "tokens", what);
    if (u.tokens.size() > static_cast<std::size_t>(in.tokens_per_unit)) {
      throw ParseError("unitized input: unit " + std::to_string(i) + " exceeds T tokens");
    }
    for (std::size_t t = 0; t < u.tokens.size(); ++t) in.pad_mask[i * in.tokens_per_unit + t] = 0;
    in.units[i] = std::move(u);
  }
  if (j.contains("doc_boundaries") && !j.at("doc_boundaries").is_null()) {
    auto b = get<std::vector<int>>(j, "doc_boundaries", what);
    if (b.size() != units.size()) {
      throw ParseError("unitized input: doc_boundaries must cover every real unit");
    }
    for (std::size_t i = 1; i < b.size(); ++i) {
      if (b[i] < b[i - 1]) throw ParseError("unitized input: doc_boundaries must be non-decreasing");
    }
    in.doc_boundaries = std::move(b);
  }
  return in;
}

// ---------------------------------------------------------------------------
// Graphs

std::string graph_to_string(const simgraph::SimilarityGraph& graph) {
  std::string out = "{\"size\": " + std::to_string(graph.size) + ", \"weights\": [";
  for (int i = 0; i < graph.size; ++i) {
    out += i == 0 ? "\n  [" : ",\n  [";
    for (int j = 0; j < graph.size; ++j) {
      if (j > 0) out += ", ";
      out += format_g9(graph.at(i, j));
    }
    out += "]";
  }
  out += "\n]}\n";
  return out;
}

simgraph::SimilarityGraph graph_from_json(const json& j) {
  const int size = get<int>(j, "size", "graph");
  if (size < 0) throw ParseError("graph: negative size");
  const auto rows = get<std::vector<std::vector<double>>>(j, "weights", "graph");
  if (rows.size() != static_cast<std::size_t>(size)) throw ParseError("graph: row count != size");
  simgraph::SimilarityGraph g(size);
  for (int i = 0; i < size; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(size)) {
      throw ParseError("graph: row " + std::to_string(i) + " has wrong length");
    }
    for (int k = 0; k < size; ++k) {
      const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      if (!(v >= 0.0 && v <= 1.0)) throw ParseError("graph: weight outside [0,1]");
      g.at(i, k) = v;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Weights

json weights_to_json(const graphattn::DecoderWeights& weights) {
  const auto& c = weights.config;
  json params = json::object();
  weights.for_each_param([&](const std::string& name, const Matrix& m) {
    params[name] = {{"rows", m.rows()}, {"cols", m.cols()},
                    {"data", std::vector<double>(m.data().begin(), m.data().end())}};
  });
  return {{"format", "attnorigin-weights/1"},
          {"config",
           {{"d_model", c.d_model},
            {"num_layers", c.num_layers},
            {"num_heads", c.num_heads},
            {"d_ff", c.d_ff},
            {"sigma", c.sigma},
            {"vocab_size", c.vocab_size},
            {"num_units", c.num_units},
            {"max_len", c.max_len},
            {"shift", graphattn::to_string(c.shift)}}},
          {"vocab", weights.vocab.tokens()},
          {"params", params}};
}

graphattn::DecoderWeights weights_from_json(const json& j) {
  constexpr const char* what = "weights";
  const json cj = get<json>(j, "config", what);
  graphattn::ModelConfig c;
  c.d_model = get<int>(cj, "d_model", what);
  c.num_layers = get<int>(cj, "num_layers", what);
  c.num_heads = get<int>(cj, "num_heads", what);
  c.d_ff = get<int>(cj, "d_ff", what);
  c.sigma = get<double>(cj, "sigma", what);
  c.vocab_size = get<int>(cj, "vocab_size", what);
  c.num_units = get<int>(cj, "num_units", what);
  c.max_len = get<int>(cj, "max_len", what);
  if (cj.contains("shift")) c.shift = graphattn::parse_shift_form(get<std::string>(cj, "shift", what));

  auto tokens = get<std::vector<std::string>>(j, "vocab", what);
  graphattn::Vocabulary vocab(
      tokens.size() > graphattn::kNumSpecial
          ? std::vector<std::string>(tokens.begin() + graphattn::kNumSpecial, tokens.end())
          : std::vector<std::string>{});
  if (vocab.tokens() != tokens) throw ParseError("weights: vocabulary must start with the special tokens");

  graphattn::DecoderWeights w;
  try {
    w = graphattn::zero_weights(c, vocab);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("weights: ") + e.what());
  }
  const json params = get<json>(j, "params", what);
  std::size_t seen = 0;
  w.for_each_param([&](const std::string& name, Matrix& m) {
    if (!params.contains(name)) throw ParseError("weights: missing parameter '" + name + "'");
    const json& p = params.at(name);
    const auto rows = get<std::size_t>(p, "rows", what);
    const auto cols = get<std::size_t>(p, "cols", what);
    const auto data = get<std::vector<double>>(p, "data", what);
    if (rows != m.rows() || cols != m.cols() || data.size() != m.size()) {
      throw ParseError("weights: parameter '" + name + "' has the wrong shape");
    }
    std::copy(data.begin(), data.end(), m.data().begin());
    ++seen;
  });
  if (seen != params.size()) throw ParseError("weights: unknown parameters present");
  try {
    w.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  return w;
}

// ---------------------------------------------------------------------------
// Summaries

json summary_to_json(const SummaryRecord& r) {
  return {{"set_id", r.set_id},
          {"tokens", r.tokens},
          {"beam_trace", r.beam_trace},
          {"winning_beam", r.winning_beam}};
}

SummaryRecord summary_from_json(const json& j) {
  constexpr const char* what = "summary";
  SummaryRecord r;
  r.set_id = get<std::string>(j, "set_id", what);
  check_set_id(r.set_id);
  r.tokens = get<std::vector<int>>(j, "tokens", what);
  r.beam_trace = get<awd::BeamTrace>(j, "beam_trace", what);
  r.winning_beam = get<int>(j, "winning_beam", what);
  return r;
}

}  // namespace attnorigin::io
