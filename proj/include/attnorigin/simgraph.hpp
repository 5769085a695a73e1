// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "attnorigin/textunits.hpp"

namespace attnorigin::simgraph {

/// Sparse term weights; ordered so iteration (and therefore summation) is deterministic.
using TfIdfVector = std::map<std::string, double>;

/// Symmetric L×L matrix of cosine similarities in [0, 1].
/// Diagonal is 1 for real units and 0 for pad slots; pad rows/columns are 0.
struct SimilarityGraph {
  int size = 0;
  std::vector<double> weights;

  SimilarityGraph() = default;
  explicit SimilarityGraph(int n) : size(n), weights(static_cast<std::size_t>(n) * n, 0.0) {}

  double at(int i, int j) const { return weights[static_cast<std::size_t>(i) * size + j]; }
  double& at(int i, int j) { return weights[static_cast<std::size_t>(i) * size + j]; }
  std::span<const double> row(int i) const {
    return {weights.data() + static_cast<std::size_t>(i) * size, static_cast<std::size_t>(size)};
  }

  /// Graph with every entry equal to `value` (used to neutralize the shift).
  static SimilarityGraph filled(int n, double value);

  bool operator==(const SimilarityGraph&) const = default;
};

/// tf = raw count, idf = ln((N+1)/(df+1)) + 1 with N the number of real units.
std::vector<TfIdfVector> tfidf_vectors(std::span<const textunits::TextualUnit> units);

/// dot(u,v) / (|u||v|), clamped to [0,1]; 0 when either vector is empty.
double cosine_similarity(const TfIdfVector& u, const TfIdfVector& v);

/// Pairwise cosine graph; off-diagonal entries below `threshold` become 0.
/// Each unordered pair is computed once (OpenMP over rows) and mirrored.
SimilarityGraph build_graph(std::span<const textunits::TextualUnit> units, double threshold = 0.0);
SimilarityGraph build_graph_serial(std::span<const textunits::TextualUnit> units,
                                   double threshold = 0.0);

}  // namespace attnorigin::simgraph
