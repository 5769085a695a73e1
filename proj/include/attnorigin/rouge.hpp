// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attnorigin::rouge {

using Tokens = std::vector<std::string>;

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  /// Builds a score from a match count and the two denominators; a zero
  /// denominator yields 0 for that side.
  static RougeScore from_counts(double matches, double candidate_total, double reference_total);

  bool operator==(const RougeScore&) const = default;
};

struct RougeTriple {
  RougeScore r1;
  RougeScore r2;
  RougeScore rl;

  bool operator==(const RougeTriple&) const = default;
};

enum class Variant { r1, r2, rl };

const char* to_string(Variant v);
Variant parse_variant(std::string_view name);
const RougeScore& pick(const RougeTriple& triple, Variant v);

/// Clipped n-gram overlap: sum over n-grams g of min(count_cand(g), count_ref(g)).
std::size_t clipped_ngram_matches(std::span<const std::string> candidate,
                                  std::span<const std::string> reference, int n);
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   int n);

/// Longest common subsequence length (O(|a|·|b|) dynamic programming, two rows).
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

RougeTriple rouge_triple(std::span<const std::string> candidate,
                         std::span<const std::string> reference);

/// Tokenizes both texts with the rule tokenizer and scores them (no stemming,
/// no stopword removal).
RougeTriple evaluate_summary(std::string_view generated, std::string_view gold);

}  // namespace attnorigin::rouge
