// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/simgraph.hpp"

#include <algorithm>
#include <cmath>

#include "attnorigin/error.hpp"

namespace attnorigin::simgraph {

namespace {

double norm_squared(const TfIdfVector& v) {
  double acc = 0.0;
  for (const auto& [term, w] : v) acc += w * w;
  return acc;
}

void check_threshold(double threshold) {
  if (!(threshold >= 0.0 && threshold < 1.0)) {
    throw InvalidArgument("build_graph: threshold must lie in [0, 1)");
  }
}

double edge(const std::vector<TfIdfVector>& vecs, std::span<const textunits::TextualUnit> units,
            std::size_t i, std::size_t j, double threshold) {
  if (units[i].pad || units[j].pad) return 0.0;
  const double c = cosine_similarity(vecs[i], vecs[j]);
  return c < threshold ? 0.0 : c;
}

void fill_diagonal(SimilarityGraph& g, std::span<const textunits::TextualUnit> units) {
  for (int i = 0; i < g.size; ++i) g.at(i, i) = units[i].pad ? 0.0 : 1.0;
}

}  // namespace

SimilarityGraph SimilarityGraph::filled(int n, double value) {
  SimilarityGraph g(n);
  std::fill(g.weights.begin(), g.weights.end(), value);
  return g;
}

std::vector<TfIdfVector> tfidf_vectors(std::span<const textunits::TextualUnit> units) {
  std::map<std::string, int> df;
  int real = 0;
  std::vector<std::map<std::string, int>> tf(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (units[i].pad) continue;
    ++real;
    for (const auto& tok : units[i].tokens) ++tf[i][tok];
    for (const auto& [term, count] : tf[i]) ++df[term];
  }

  std::vector<TfIdfVector> out(units.size());
  const double n = static_cast<double>(real);
  for (std::size_t i = 0; i < units.size(); ++i) {
    for (const auto& [term, count] : tf[i]) {
      const double idf = std::log((n + 1.0) / (df[term] + 1.0)) + 1.0;
      const double w = count * idf;
      if (w > 0.0) out[i].emplace(term, w);
    }
  }
  return out;
}

double cosine_similarity(const TfIdfVector& u, const TfIdfVector& v) {
  if (u.empty() || v.empty()) return 0.0;
  const TfIdfVector& small = u.size() <= v.size() ? u : v;
  const TfIdfVector& large = u.size() <= v.size() ? v : u;
  double acc = 0.0;
  for (const auto& [term, w] : small) {
    auto it = large.find(term);
    if (it != large.end()) acc += w * it->second;
  }
  const double denom = std::sqrt(norm_squared(u) * norm_squared(v));
  if (denom == 0.0) return 0.0;
  return std::clamp(acc / denom, 0.0, 1.0);
}

SimilarityGraph build_graph_serial(std::span<const textunits::TextualUnit> units,
                                   double threshold) {
  check_threshold(threshold);
  const auto vecs = tfidf_vectors(units);
  SimilarityGraph g(static_cast<int>(units.size()));
  for (std::size_t i = 0; i < units.size(); ++i) {
    for (std::size_t j = i + 1; j < units.size(); ++j) {
      const double w = edge(vecs, units, i, j, threshold);
      g.at(static_cast<int>(i), static_cast<int>(j)) = w;
      g.at(static_cast<int>(j), static_cast<int>(i)) = w;
    }
  }
  fill_diagonal(g, units);
  return g;
}

SimilarityGraph build_graph(std::span<const textunits::TextualUnit> units, double threshold) {
  check_threshold(threshold);
  const auto vecs = tfidf_vectors(units);
  SimilarityGraph g(static_cast<int>(units.size()));
  const auto n = static_cast<std::ptrdiff_t>(units.size());
  // Row i owns pairs (i, j>i); the mirrored writes never collide.
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
      const double w = edge(vecs, units, static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                            threshold);
      g.at(static_cast<int>(i), static_cast<int>(j)) = w;
      g.at(static_cast<int>(j), static_cast<int>(i)) = w;
    }
  }
  fill_diagonal(g, units);
  return g;
}

}  // namespace attnorigin::simgraph
