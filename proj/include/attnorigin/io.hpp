// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "attnorigin/awd.hpp"
#include "attnorigin/graphattn.hpp"
#include "attnorigin/simgraph.hpp"
#include "attnorigin/textunits.hpp"

namespace attnorigin::io {

using nlohmann::json;

std::string read_text(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename so readers never see partial files.
void write_text(const std::filesystem::path& path, std::string_view contents);

/// `value` with 9 significant digits (shortest of %.9g).
std::string format_g9(double value);

// Corpus: JSON Lines, one set per line:
//   {"set_id": str, "documents": [{"doc_id": str, "paragraphs": [str]}], "gold_summary": str|null}
// A document may give "text" (split on blank lines) instead of "paragraphs".
// Blank lines are skipped. Errors carry the 1-based line number.
std::vector<textunits::MultiDocSet> parse_corpus(std::string_view contents);
std::vector<textunits::MultiDocSet> read_corpus(const std::filesystem::path& path);
textunits::MultiDocSet corpus_set_from_json(const json& j);

// Unitized set file; pad slots are implied by L and the listed real units.
json unitized_to_json(const textunits::UnitizedInput& input);
textunits::UnitizedInput unitized_from_json(const json& j);

// Graph file: {"size": L, "weights": [[...]]}, 9 significant digits.
std::string graph_to_string(const simgraph::SimilarityGraph& graph);
simgraph::SimilarityGraph graph_from_json(const json& j);

// Weights file: {"format", "config", "vocab", "params": {name: {"rows","cols","data"}}}.
json weights_to_json(const graphattn::DecoderWeights& weights);
graphattn::DecoderWeights weights_from_json(const json& j);

// Summary token file: {"set_id", "tokens", "beam_trace", "winning_beam"}.
struct SummaryRecord {
  std::string set_id;
  std::vector<int> tokens;
  awd::BeamTrace beam_trace;
  int winning_beam = 0;
  bool operator==(const SummaryRecord&) const = default;
};
json summary_to_json(const SummaryRecord& record);
SummaryRecord summary_from_json(const json& j);

json load_json(const std::filesystem::path& path);
/// Pretty JSON with a trailing newline.
std::string dump(const json& j);

/// Rejects ids that cannot safely name an output file.
void check_set_id(const std::string& set_id);

}  // namespace attnorigin::io
