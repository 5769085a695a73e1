// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/rouge.hpp"

#include <algorithm>
#include <map>

#include "attnorigin/error.hpp"
#include "attnorigin/textunits.hpp"

namespace attnorigin::rouge {

namespace {

using NgramCounts = std::map<std::vector<std::string_view>, std::size_t>;

NgramCounts count_ngrams(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string_view> key(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[key];
  }
  return counts;
}

std::size_t ngram_total(std::size_t len, std::size_t n) { return len >= n ? len - n + 1 : 0; }

}  // namespace

RougeScore RougeScore::from_counts(double matches, double candidate_total, double reference_total) {
  RougeScore s;
  s.precision = candidate_total > 0 ? matches / candidate_total : 0.0;
  s.recall = reference_total > 0 ? matches / reference_total : 0.0;
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::r1: return "r1";
    case Variant::r2: return "r2";
    case Variant::rl: return "rl";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "r1") return Variant::r1;
  if (name == "r2") return Variant::r2;
  if (name == "rl") return Variant::rl;
  throw InvalidArgument("unknown ROUGE variant '" + std::string(name) + "'");
}

const RougeScore& pick(const RougeTriple& triple, Variant v) {
  switch (v) {
    case Variant::r1: return triple.r1;
    case Variant::r2: return triple.r2;
    case Variant::rl: break;
  }
  return triple.rl;
}

std::size_t clipped_ngram_matches(std::span<const std::string> candidate,
                                  std::span<const std::string> reference, int n) {
  if (n < 1) throw InvalidArgument("rouge_n: n must be >= 1");
  const auto cand = count_ngrams(candidate, static_cast<std::size_t>(n));
  const auto ref = count_ngrams(reference, static_cast<std::size_t>(n));
  std::size_t matches = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) matches += std::min(count, it->second);
  }
  return matches;
}

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   int n) {
  const std::size_t m = clipped_ngram_matches(candidate, reference, n);
  return RougeScore::from_counts(static_cast<double>(m),
                                 static_cast<double>(ngram_total(candidate.size(), n)),
                                 static_cast<double>(ngram_total(reference.size(), n)));
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  const std::size_t l = lcs_length(candidate, reference);
  return RougeScore::from_counts(static_cast<double>(l), static_cast<double>(candidate.size()),
                                 static_cast<double>(reference.size()));
}

RougeTriple rouge_triple(std::span<const std::string> candidate,
                         std::span<const std::string> reference) {
  return {rouge_n(candidate, reference, 1), rouge_n(candidate, reference, 2),
          rouge_l(candidate, reference)};
}

RougeTriple evaluate_summary(std::string_view generated, std::string_view gold) {
  const auto cand = textunits::tokenize(generated);
  const auto ref = textunits::tokenize(gold);
  return rouge_triple(cand, ref);
}

}  // namespace attnorigin::rouge
