// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "attnorigin/error.hpp"

namespace attnorigin::awd {

/// Recorded attention A, indexed [beam][token][layer][head][paragraph].
/// Values are float32 to match the on-disk layout bit for bit.
class AwdTensor {
 public:
  AwdTensor() = default;
  AwdTensor(std::uint32_t beams, std::uint32_t steps, std::uint32_t layers, std::uint32_t heads,
            std::uint32_t units, float fill = 0.0f);

  std::uint32_t beams() const { return dims_[0]; }
  std::uint32_t steps() const { return dims_[1]; }
  std::uint32_t layers() const { return dims_[2]; }
  std::uint32_t heads() const { return dims_[3]; }
  std::uint32_t units() const { return dims_[4]; }
  const std::array<std::uint32_t, 5>& dims() const { return dims_; }

  std::size_t offset(std::size_t b, std::size_t t, std::size_t l, std::size_t h) const {
    return (((b * dims_[1] + t) * dims_[2] + l) * dims_[3] + h) * dims_[4];
  }
  /// Distribution over paragraphs for one (beam, step, layer, head).
  std::span<float> slice(std::size_t b, std::size_t t, std::size_t l, std::size_t h) {
    return {values_.data() + offset(b, t, l, h), dims_[4]};
  }
  std::span<const float> slice(std::size_t b, std::size_t t, std::size_t l, std::size_t h) const {
    return {values_.data() + offset(b, t, l, h), dims_[4]};
  }

  std::span<float> values() { return values_; }
  std::span<const float> values() const { return values_; }

  /// Copy keeping only the first `steps` steps.
  AwdTensor truncated(std::uint32_t steps) const;

  bool operator==(const AwdTensor&) const = default;

 private:
  std::array<std::uint32_t, 5> dims_{};
  std::vector<float> values_;
};

/// Per-step parent indices; trace[t][i] is the slot at step t-1 that slot i
/// at step t extends (0 for every slot at step 0). -1 marks an empty slot.
using BeamTrace = std::vector<std::vector<int>>;

/// Attention of the winning hypothesis, indexed [token][layer][head][paragraph].
struct AlignedAwd {
  int steps = 0;
  int layers = 0;
  int heads = 0;
  int units = 0;
  std::vector<double> values;

  std::size_t offset(int t, int l, int h) const {
    return ((static_cast<std::size_t>(t) * layers + l) * heads + h) * units;
  }
  std::span<const double> slice(int t, int l, int h) const {
    return {values.data() + offset(t, l, h), static_cast<std::size_t>(units)};
  }
};

/// Half-open token ranges [first, second) of each generated sentence.
using SentenceSpans = std::vector<std::pair<int, int>>;

/// A', indexed [sentence][layer][head][paragraph].
struct SentenceAwd {
  int sentences = 0;
  int layers = 0;
  int heads = 0;
  int units = 0;
  std::vector<double> values;

  std::size_t offset(int s, int l, int h) const {
    return ((static_cast<std::size_t>(s) * layers + l) * heads + h) * units;
  }
  double at(int s, int l, int h, int p) const { return values[offset(s, l, h) + p]; }
  std::span<const double> slice(int s, int l, int h) const {
    return {values.data() + offset(s, l, h), static_cast<std::size_t>(units)};
  }
  /// Mean over heads of one (sentence, layer) row.
  std::vector<double> head_mean(int s, int l) const;
};

enum class Aggregation { mean, median };

Aggregation parse_aggregation(std::string_view name);
const char* to_string(Aggregation a);

/// Follows parent links back from `winning_beam` at step `length-1` and picks,
/// for each step, the slice recorded on the beam that produced that token.
AlignedAwd beam_decode_awd(const AwdTensor& awd, const BeamTrace& trace, int winning_beam,
                           int length);

/// Spans end at (and include) each end-of-sentence token; trailing tokens
/// without a terminator form a final span.
SentenceSpans split_summary_sentences(std::span<const int> tokens, int eos_sentence_id);

/// Mean or median over each span's tokens. Median slices of multi-token spans are
/// renormalized to sum to 1; single-token spans copy their slice. OpenMP over sentences.
SentenceAwd aggregate_to_sentences(const AlignedAwd& aligned, const SentenceSpans& spans,
                                   Aggregation method);
SentenceAwd aggregate_to_sentences_serial(const AlignedAwd& aligned, const SentenceSpans& spans,
                                          Aggregation method);

class AwdFormatError : public Error {
 public:
  using Error::Error;
};
class AwdBadMagic : public AwdFormatError {
 public:
  using AwdFormatError::AwdFormatError;
};
class AwdDimOverflow : public AwdFormatError {
 public:
  using AwdFormatError::AwdFormatError;
};
class AwdTruncated : public AwdFormatError {
 public:
  using AwdFormatError::AwdFormatError;
};

/// AWD1 layout: "AWD1", five u32 LE dims (bs, sl, dl, mh, L), then the
/// float32 LE payload in [beam][token][layer][head][paragraph] order.
std::vector<std::uint8_t> encode_awd(const AwdTensor& tensor);
AwdTensor decode_awd(std::span<const std::uint8_t> bytes);
void write_awd(const AwdTensor& tensor, const std::filesystem::path& path);
AwdTensor read_awd(const std::filesystem::path& path);

}  // namespace attnorigin::awd
