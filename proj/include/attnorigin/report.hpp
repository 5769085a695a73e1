// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "attnorigin/origin.hpp"
#include "attnorigin/rouge.hpp"

namespace attnorigin::report {

using ordered_json = nlohmann::ordered_json;

/// Coefficients indexed by rouge::Variant (r1, r2, rl); nullopt = undefined.
using VariantValues = std::array<std::optional<double>, 3>;

struct LayerCoefficients {
  int layer = 0;  // 1-based
  VariantValues values;
  bool operator==(const LayerCoefficients&) const = default;
};

struct HeadCoefficients {
  int layer = 0;  // 1-based
  int head = 0;   // 1-based
  VariantValues values;
  bool operator==(const HeadCoefficients&) const = default;
};

struct OptionalMatrix {
  int size = 0;
  std::vector<std::optional<double>> values;  // row-major
  static OptionalMatrix from(const origin::CorrelationMatrix& m) { return {m.size, m.values}; }
  bool operator==(const OptionalMatrix&) const = default;
};

struct LayerMatrix {
  int layer = 0;  // 1-based
  OptionalMatrix matrix;
  bool operator==(const LayerMatrix&) const = default;
};

struct PosBiasBlock {
  int layer = 0;  // 1-based
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> counts;
  std::vector<double> normalized;
  static PosBiasBlock from(const origin::PosBiasHeatmap& map, int layer);
  bool operator==(const PosBiasBlock&) const = default;
};

struct SummaryCoefficients {
  std::string set_id;
  std::vector<LayerCoefficients> layers;
  bool operator==(const SummaryCoefficients&) const = default;
};

/// One row of a ROUGE-F table; scores are stored on the 0-100 scale.
struct RougeTableRow {
  std::string label;
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
  std::int64_t count = 0;
  bool operator==(const RougeTableRow&) const = default;
};

struct Report {
  std::vector<rouge::Variant> variants{rouge::Variant::r1, rouge::Variant::r2, rouge::Variant::rl};
  std::int64_t sample_count = 0;
  std::vector<LayerCoefficients> layers;
  std::vector<HeadCoefficients> heads;
  std::vector<LayerMatrix> head_matrix;
  OptionalMatrix layer_matrix;
  std::optional<PosBiasBlock> posbias;
  std::vector<SummaryCoefficients> per_summary;
  std::optional<RougeTableRow> rouge;
  bool operator==(const Report&) const = default;
};

ordered_json to_json(const Report& report);
Report report_from_json(const ordered_json& j);

/// CSV mirror, one coefficient per row:
/// section,set_id,layer,head,row,col,variant,value
std::string to_csv(const Report& report);
Report report_from_csv(std::string_view csv);

/// Plain-text summary: per-layer "r1/r2/rl" rows, head/layer matrix
/// statistics and the ROUGE row when present.
std::string to_text(const Report& report);

/// "0.56/0.69/0.63"; undefined entries render as "n/a".
std::string format_triple(const VariantValues& values, int decimals = 2);
/// "1,800"
std::string format_count(std::int64_t n);
/// "Paragraphs | 45.06/16.84/41.35 | 4,000"
std::string format_rouge_row(const RougeTableRow& row);
/// "average 0.72, minimum 0.49"
std::string format_matrix_summary(const origin::MatrixSummary& summary);

struct RougeTable {
  std::vector<RougeTableRow> rows;
  bool operator==(const RougeTable&) const = default;
};
ordered_json to_json(const RougeTable& table);
RougeTable rouge_table_from_json(const ordered_json& j);
std::string to_csv(const RougeTable& table);
RougeTable rouge_table_from_csv(std::string_view csv);
std::string to_text(const RougeTable& table);

/// Grayscale grid, one rect per cell. Fill channel = round(255 * (1 - value)),
/// so 1.0 is black. Rows are unit positions, columns generated sentences.
std::string render_heatmap_svg(const PosBiasBlock& block);

}  // namespace attnorigin::report
