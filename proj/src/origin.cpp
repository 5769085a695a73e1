// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/origin.hpp"

#include <algorithm>
#include <cmath>

#include "attnorigin/error.hpp"

namespace attnorigin::origin {

namespace {

using rouge::RougeScore;
using rouge::RougeTriple;

std::vector<std::vector<rouge::Tokens>> unit_sentences(const textunits::UnitizedInput& input) {
  std::vector<std::vector<rouge::Tokens>> out(input.units.size());
  for (std::size_t p = 0; p < input.units.size(); ++p) {
    const auto& unit = input.units[p];
    if (unit.pad) continue;
    if (unit.original_text.empty()) {
      out[p].push_back(unit.tokens);
      continue;
    }
    for (const auto& s : textunits::split_sentences(unit.original_text)) {
      out[p].push_back(textunits::tokenize(s));
    }
  }
  return out;
}

void add_score(RougeScore& acc, const RougeScore& s) {
  acc.precision += s.precision;
  acc.recall += s.recall;
  acc.f1 += s.f1;
}

void scale_score(RougeScore& s, double k) {
  s.precision *= k;
  s.recall *= k;
  s.f1 *= k;
}

RougeTriple cell_metric(const rouge::Tokens& sentence, const std::vector<rouge::Tokens>& sources) {
  RougeTriple acc;
  if (sources.empty()) return acc;
  for (const auto& src : sources) {
    const RougeTriple t = rouge::rouge_triple(sentence, src);
    add_score(acc.r1, t.r1);
    add_score(acc.r2, t.r2);
    add_score(acc.rl, t.rl);
  }
  const double k = 1.0 / static_cast<double>(sources.size());
  scale_score(acc.r1, k);
  scale_score(acc.r2, k);
  scale_score(acc.rl, k);
  return acc;
}

OriginMetric empty_metric(const std::vector<rouge::Tokens>& sentences,
                          const textunits::UnitizedInput& input) {
  if (input.real_units() == 0) throw InvalidArgument("reference_metric: input has no real units");
  OriginMetric m;
  m.sentences = static_cast<int>(sentences.size());
  m.units = input.num_units;
  m.cells.resize(sentences.size() * static_cast<std::size_t>(input.num_units));
  m.pad_units = input.pad_units();
  return m;
}

double finish(double r) {
  r = std::clamp(r, -1.0, 1.0);
  if (r > 1.0 - kUnitSnap) return 1.0;
  if (r < -1.0 + kUnitSnap) return -1.0;
  return r;
}

void check_pair(const SummaryAnalysis& a) {
  if (a.attention.sentences != a.origin.sentences || a.attention.units != a.origin.units) {
    throw InvalidArgument("summary '" + a.set_id + "': attention is " +
                          std::to_string(a.attention.sentences) + "x" +
                          std::to_string(a.attention.units) + " but origin metric is " +
                          std::to_string(a.origin.sentences) + "x" + std::to_string(a.origin.units));
  }
}

bool is_real(const SummaryAnalysis& a, int p) {
  return a.origin.pad_units.empty() || a.origin.pad_units[static_cast<std::size_t>(p)] == 0;
}

void check_batch(std::span<const SummaryAnalysis> batch) {
  if (batch.empty()) throw InvalidArgument("correlation: empty batch");
  for (const auto& a : batch) {
    check_pair(a);
    if (a.attention.layers != batch.front().attention.layers ||
        a.attention.heads != batch.front().attention.heads) {
      throw InvalidArgument("correlation: layer/head counts differ across summaries");
    }
  }
}

// Accumulators for one summary: [0, dl) per layer, then dl*mh per head.
std::vector<PearsonAccumulator> summary_partials(const SummaryAnalysis& a, rouge::Variant variant) {
  const int dl = a.attention.layers;
  const int mh = a.attention.heads;
  std::vector<PearsonAccumulator> acc(static_cast<std::size_t>(dl + dl * mh));
  for (int s = 0; s < a.attention.sentences; ++s) {
    for (int l = 0; l < dl; ++l) {
      const auto mean = a.attention.head_mean(s, l);
      for (int p = 0; p < a.attention.units; ++p) {
        if (!is_real(a, p)) continue;
        const double r = a.origin.f1(s, p, variant);
        acc[static_cast<std::size_t>(l)].add(mean[static_cast<std::size_t>(p)], r);
        for (int h = 0; h < mh; ++h) {
          acc[static_cast<std::size_t>(dl + l * mh + h)].add(a.attention.at(s, l, h, p), r);
        }
      }
    }
  }
  return acc;
}

// Flattened attention vectors (over summaries, sentences, real units) for
// every head of `layer`, or for every head-mean layer when layer < 0.
std::vector<std::vector<double>> flatten(std::span<const SummaryAnalysis> batch, int layer) {
  const int dl = batch.front().attention.layers;
  const int mh = batch.front().attention.heads;
  std::vector<std::vector<double>> out(static_cast<std::size_t>(layer < 0 ? dl : mh));
  for (const auto& a : batch) {
    for (int s = 0; s < a.attention.sentences; ++s) {
      for (int p = 0; p < a.attention.units; ++p) {
        if (!is_real(a, p)) continue;
        if (layer >= 0) {
          for (int h = 0; h < mh; ++h) out[static_cast<std::size_t>(h)].push_back(a.attention.at(s, layer, h, p));
        }
      }
      if (layer < 0) {
        for (int l = 0; l < dl; ++l) {
          const auto mean = a.attention.head_mean(s, l);
          for (int p = 0; p < a.attention.units; ++p) {
            if (is_real(a, p)) out[static_cast<std::size_t>(l)].push_back(mean[static_cast<std::size_t>(p)]);
          }
        }
      }
    }
  }
  return out;
}

CorrelationMatrix pairwise(const std::vector<std::vector<double>>& series) {
  CorrelationMatrix m;
  m.size = static_cast<int>(series.size());
  m.values.resize(series.size() * series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto self = pearson(series[i], series[i]);
    m.values[i * series.size() + i] = self ? std::optional<double>(1.0) : std::nullopt;
    for (std::size_t j = i + 1; j < series.size(); ++j) {
      const auto r = pearson(series[i], series[j]);
      m.values[i * series.size() + j] = r;
      m.values[j * series.size() + i] = r;
    }
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------

OriginMetric reference_metric_serial(const std::vector<rouge::Tokens>& summary_sentences,
                                     const textunits::UnitizedInput& input) {
  OriginMetric m = empty_metric(summary_sentences, input);
  const auto sources = unit_sentences(input);
  for (int s = 0; s < m.sentences; ++s) {
    for (int p = 0; p < m.units; ++p) {
      if (m.pad_units[static_cast<std::size_t>(p)]) continue;
      m.cells[static_cast<std::size_t>(s) * m.units + p] =
          cell_metric(summary_sentences[static_cast<std::size_t>(s)], sources[static_cast<std::size_t>(p)]);
    }
  }
  return m;
}

OriginMetric reference_metric(const std::vector<rouge::Tokens>& summary_sentences,
                              const textunits::UnitizedInput& input) {
  OriginMetric m = empty_metric(summary_sentences, input);
  const auto sources = unit_sentences(input);
  const auto cells = static_cast<std::ptrdiff_t>(m.cells.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    const auto s = static_cast<std::size_t>(c / m.units);
    const auto p = static_cast<std::size_t>(c % m.units);
    if (m.pad_units[p]) continue;
    m.cells[static_cast<std::size_t>(c)] = cell_metric(summary_sentences[s], sources[p]);
  }
  return m;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
  if (x.size() < 2) throw InvalidArgument("pearson: need at least two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return finish(sxy / std::sqrt(sxx * syy));
}

void PearsonAccumulator::add(double x, double y) {
  ++n_;
  const double n = static_cast<double>(n_);
  const double dx = x - mean_x_;
  const double dy = y - mean_y_;
  mean_x_ += dx / n;
  mean_y_ += dy / n;
  m2x_ += dx * (x - mean_x_);
  m2y_ += dy * (y - mean_y_);
  cxy_ += dx * (y - mean_y_);
}

void PearsonAccumulator::merge(const PearsonAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double dx = other.mean_x_ - mean_x_;
  const double dy = other.mean_y_ - mean_y_;
  mean_x_ += dx * nb / n;
  mean_y_ += dy * nb / n;
  m2x_ += other.m2x_ + dx * dx * na * nb / n;
  m2y_ += other.m2y_ + dy * dy * na * nb / n;
  cxy_ += other.cxy_ + dx * dy * na * nb / n;
  n_ += other.n_;
}

std::optional<double> PearsonAccumulator::coefficient() const {
  if (n_ < 2 || m2x_ <= 0.0 || m2y_ <= 0.0) return std::nullopt;
  return finish(cxy_ / std::sqrt(m2x_ * m2y_));
}

Correlations correlate_awd_origin(std::span<const SummaryAnalysis> batch, rouge::Variant variant) {
  check_batch(batch);
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
  std::vector<std::vector<PearsonAccumulator>> partials(batch.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    partials[static_cast<std::size_t>(i)] = summary_partials(batch[static_cast<std::size_t>(i)], variant);
  }
  std::vector<PearsonAccumulator> total = partials.front();
  for (std::size_t i = 1; i < partials.size(); ++i) {
    for (std::size_t k = 0; k < total.size(); ++k) total[k].merge(partials[i][k]);
  }

  const int dl = batch.front().attention.layers;
  Correlations out;
  out.sample_count = total.front().count();
  if (out.sample_count == 0) throw InvalidArgument("correlation: no usable (sentence, unit) cells");
  for (int l = 0; l < dl; ++l) out.per_layer.push_back(total[static_cast<std::size_t>(l)].coefficient());
  for (std::size_t k = static_cast<std::size_t>(dl); k < total.size(); ++k) {
    out.per_head.push_back(total[k].coefficient());
  }
  return out;
}

Correlations correlate_awd_origin_serial(std::span<const SummaryAnalysis> batch,
                                         rouge::Variant variant) {
  check_batch(batch);
  const int dl = batch.front().attention.layers;
  const int mh = batch.front().attention.heads;
  std::vector<std::vector<double>> layer_x(static_cast<std::size_t>(dl));
  std::vector<std::vector<double>> head_x(static_cast<std::size_t>(dl * mh));
  std::vector<double> ys;
  for (const auto& a : batch) {
    for (int s = 0; s < a.attention.sentences; ++s) {
      for (int p = 0; p < a.attention.units; ++p) {
        if (!is_real(a, p)) continue;
        ys.push_back(a.origin.f1(s, p, variant));
        for (int l = 0; l < dl; ++l) {
          double mean = 0.0;
          for (int h = 0; h < mh; ++h) {
            const double v = a.attention.at(s, l, h, p);
            head_x[static_cast<std::size_t>(l * mh + h)].push_back(v);
            mean += v;
          }
          layer_x[static_cast<std::size_t>(l)].push_back(mean / mh);
        }
      }
    }
  }
  if (ys.empty()) throw InvalidArgument("correlation: no usable (sentence, unit) cells");
  Correlations out;
  out.sample_count = static_cast<std::int64_t>(ys.size());
  auto corr = [&](const std::vector<double>& x) -> std::optional<double> {
    return ys.size() < 2 ? std::nullopt : pearson(x, ys);
  };
  for (const auto& x : layer_x) out.per_layer.push_back(corr(x));
  for (const auto& x : head_x) out.per_head.push_back(corr(x));
  return out;
}

CorrelationMatrix head_correlations(std::span<const SummaryAnalysis> batch, int layer) {
  check_batch(batch);
  if (layer < 0 || layer >= batch.front().attention.layers) {
    throw InvalidArgument("head_correlations: layer out of range");
  }
  return pairwise(flatten(batch, layer));
}

CorrelationMatrix layer_correlations(std::span<const SummaryAnalysis> batch) {
  check_batch(batch);
  return pairwise(flatten(batch, -1));
}

MatrixSummary off_diagonal_summary(const CorrelationMatrix& m) {
  MatrixSummary out;
  double total = 0.0;
  int count = 0;
  for (int i = 0; i < m.size; ++i) {
    for (int j = i + 1; j < m.size; ++j) {
      const auto& v = m.at(i, j);
      if (!v) continue;
      total += *v;
      ++count;
      out.min = out.min ? std::min(*out.min, *v) : *v;
    }
  }
  if (count > 0) out.mean = total / count;
  return out;
}

std::vector<int> argmax_paragraph(const awd::SentenceAwd& attention, int layer) {
  if (layer < 0 || layer >= attention.layers) throw InvalidArgument("argmax_paragraph: layer out of range");
  std::vector<int> out;
  for (int s = 0; s < attention.sentences; ++s) {
    const auto mean = attention.head_mean(s, layer);
    int best = 0;
    for (int p = 1; p < attention.units; ++p) {
      if (mean[static_cast<std::size_t>(p)] > mean[static_cast<std::size_t>(best)]) best = p;
    }
    out.push_back(best);
  }
  return out;
}

PosBiasHeatmap positional_bias(std::span<const SummaryAnalysis> batch, int layer) {
  PosBiasHeatmap map;
  std::vector<std::pair<int, int>> tallies;  // (position, sentence)
  int max_position = -1;
  int max_sentences = 0;
  for (const auto& a : batch) {
    if (!a.doc_boundaries) {
      throw InvalidArgument("positional bias needs document boundaries; summary '" + a.set_id +
                            "' has none");
    }
    const auto& b = *a.doc_boundaries;
    std::vector<int> position(b.size());
    for (std::size_t p = 0; p < b.size(); ++p) {
      position[p] = p > 0 && b[p] == b[p - 1] ? position[p - 1] + 1 : 0;
      max_position = std::max(max_position, position[p]);
    }
    const auto best = argmax_paragraph(a.attention, layer);
    max_sentences = std::max(max_sentences, static_cast<int>(best.size()));
    for (std::size_t s = 0; s < best.size(); ++s) {
      const auto p = static_cast<std::size_t>(best[s]);
      if (p >= position.size()) continue;  // pad slot
      tallies.emplace_back(position[p], static_cast<int>(s));
    }
  }
  map.rows = max_position + 1;
  map.cols = max_sentences;
  map.counts.assign(static_cast<std::size_t>(map.rows) * map.cols, 0);
  map.normalized.assign(map.counts.size(), 0.0);
  for (const auto& [r, c] : tallies) ++map.counts[static_cast<std::size_t>(r) * map.cols + c];
  for (int c = 0; c < map.cols; ++c) {
    std::int64_t total = 0;
    for (int r = 0; r < map.rows; ++r) total += map.count(r, c);
    if (total == 0) continue;
    for (int r = 0; r < map.rows; ++r) {
      map.normalized[static_cast<std::size_t>(r) * map.cols + c] =
          static_cast<double>(map.count(r, c)) / static_cast<double>(total);
    }
  }
  return map;
}

}  // namespace attnorigin::origin
