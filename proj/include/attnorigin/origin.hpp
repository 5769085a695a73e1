// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attnorigin/awd.hpp"
#include "attnorigin/rouge.hpp"
#include "attnorigin/textunits.hpp"

namespace attnorigin::origin {

/// R: one ROUGE triple per (generated sentence, input unit). Pad columns hold zeros.
struct OriginMetric {
  int sentences = 0;
  int units = 0;
  std::vector<rouge::RougeTriple> cells;
  std::vector<std::uint8_t> pad_units;

  const rouge::RougeTriple& at(int s, int p) const {
    return cells[static_cast<std::size_t>(s) * units + p];
  }
  double f1(int s, int p, rouge::Variant v) const { return rouge::pick(at(s, p), v).f1; }
};

/// R[s][p] = mean over the sentences of unit p of ROUGE(sentence s, that sentence).
/// Unit sentences come from the unit's original text (its tokens when no text
/// is available). OpenMP over cells.
OriginMetric reference_metric(const std::vector<rouge::Tokens>& summary_sentences,
                              const textunits::UnitizedInput& input);
OriginMetric reference_metric_serial(const std::vector<rouge::Tokens>& summary_sentences,
                                     const textunits::UnitizedInput& input);

/// Exact-limit snap: |r| within this of 1 is reported as ±1.
inline constexpr double kUnitSnap = 1e-13;

/// Sample Pearson correlation; nullopt when either side has zero variance.
/// Throws InvalidArgument on length mismatch or fewer than two samples.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Streaming, mergeable co-moment accumulator (count, means, second moments,
/// co-moment). Merging partials in a fixed order gives a deterministic result.
class PearsonAccumulator {
 public:
  void add(double x, double y);
  void merge(const PearsonAccumulator& other);
  std::int64_t count() const { return n_; }
  /// nullopt when count < 2 or either variance is zero.
  std::optional<double> coefficient() const;

 private:
  std::int64_t n_ = 0;
  double mean_x_ = 0.0;
  double mean_y_ = 0.0;
  double m2x_ = 0.0;
  double m2y_ = 0.0;
  double cxy_ = 0.0;
};

/// One analyzed summary: its sentence-level attention A' and origin metric R.
struct SummaryAnalysis {
  std::string set_id;
  awd::SentenceAwd attention;
  OriginMetric origin;
  /// unit -> doc index for real units; absent when the input lacks it.
  std::optional<std::vector<int>> doc_boundaries;
};

struct Correlations {
  std::vector<std::optional<double>> per_layer;  // heads mean-aggregated
  std::vector<std::optional<double>> per_head;   // [layer * heads + head]
  std::int64_t sample_count = 0;
};

/// Pooled Pearson(A', R) over every (sentence, real unit) cell of the batch.
/// Throws InvalidArgument when the batch has no usable cell or A'/R disagree
/// on shape.
Correlations correlate_awd_origin(std::span<const SummaryAnalysis> batch, rouge::Variant variant);
Correlations correlate_awd_origin_serial(std::span<const SummaryAnalysis> batch,
                                         rouge::Variant variant);

/// Symmetric matrix of optional coefficients, row-major.
struct CorrelationMatrix {
  int size = 0;
  std::vector<std::optional<double>> values;
  const std::optional<double>& at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * size + j];
  }
};

CorrelationMatrix head_correlations(std::span<const SummaryAnalysis> batch, int layer);
CorrelationMatrix layer_correlations(std::span<const SummaryAnalysis> batch);

/// Mean and minimum of the defined off-diagonal entries.
struct MatrixSummary {
  std::optional<double> mean;
  std::optional<double> min;
};
MatrixSummary off_diagonal_summary(const CorrelationMatrix& m);

/// Per sentence, the unit with the largest head-mean attention (ties: lowest index).
std::vector<int> argmax_paragraph(const awd::SentenceAwd& attention, int layer);

struct PosBiasHeatmap {
  int rows = 0;  // within-document unit position
  int cols = 0;  // generated sentence index
  std::vector<std::int64_t> counts;
  std::vector<double> normalized;  // each column with any tally sums to 1

  std::int64_t count(int r, int c) const { return counts[static_cast<std::size_t>(r) * cols + c]; }
  double value(int r, int c) const { return normalized[static_cast<std::size_t>(r) * cols + c]; }
};

/// Tallies the within-document position of each sentence's argmax unit.
/// Throws InvalidArgument when any summary lacks doc_boundaries.
PosBiasHeatmap positional_bias(std::span<const SummaryAnalysis> batch, int layer);

}  // namespace attnorigin::origin
