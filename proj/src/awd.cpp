// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/awd.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace attnorigin::awd {

namespace {

constexpr std::array<char, 4> kMagic{'A', 'W', 'D', '1'};
constexpr std::size_t kHeaderBytes = 4 + 5 * 4;
// 2^31 floats (8 GiB); anything larger is treated as a corrupt header.
constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 31;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t checked_count(const std::array<std::uint32_t, 5>& dims) {
  std::uint64_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > kMaxValues / d) {
      throw AwdDimOverflow("AWD dims overflow the supported payload size");
    }
    n *= d;
  }
  if (n > kMaxValues) throw AwdDimOverflow("AWD dims overflow the supported payload size");
  return n;
}

double median_of(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_spans(const AlignedAwd& aligned, const SentenceSpans& spans) {
  for (const auto& [b, e] : spans) {
    if (b < 0 || e <= b || e > aligned.steps) {
      throw InvalidArgument("aggregate_to_sentences: span [" + std::to_string(b) + ", " +
                            std::to_string(e) + ") outside tensor of " +
                            std::to_string(aligned.steps) + " tokens");
    }
  }
}

SentenceAwd empty_like(const AlignedAwd& aligned, std::size_t sentences) {
  SentenceAwd out;
  out.sentences = static_cast<int>(sentences);
  out.layers = aligned.layers;
  out.heads = aligned.heads;
  out.units = aligned.units;
  out.values.assign(sentences * aligned.layers * aligned.heads * aligned.units, 0.0);
  return out;
}

void aggregate_sentence(const AlignedAwd& aligned, std::pair<int, int> span, Aggregation method,
                        SentenceAwd& out, int s) {
  const auto [begin, end] = span;
  const double count = end - begin;
  std::vector<double> column;
  for (int l = 0; l < aligned.layers; ++l) {
    for (int h = 0; h < aligned.heads; ++h) {
      double* dst = out.values.data() + out.offset(s, l, h);
      if (end - begin == 1) {
        // A one-token sentence keeps its recorded slice as is.
        const auto src = aligned.slice(begin, l, h);
        std::copy(src.begin(), src.end(), dst);
        continue;
      }
      if (method == Aggregation::mean) {
        for (int t = begin; t < end; ++t) {
          const auto src = aligned.slice(t, l, h);
          for (int p = 0; p < aligned.units; ++p) dst[p] += src[p];
        }
        for (int p = 0; p < aligned.units; ++p) dst[p] /= count;
        continue;
      }
      double total = 0.0;
      for (int p = 0; p < aligned.units; ++p) {
        column.clear();
        for (int t = begin; t < end; ++t) column.push_back(aligned.slice(t, l, h)[p]);
        dst[p] = median_of(column);
        total += dst[p];
      }
      for (int p = 0; p < aligned.units; ++p) {
        dst[p] = total > 0.0 ? dst[p] / total : 1.0 / aligned.units;
      }
    }
  }
}

}  // namespace

AwdTensor::AwdTensor(std::uint32_t beams, std::uint32_t steps, std::uint32_t layers,
                     std::uint32_t heads, std::uint32_t units, float fill)
    : dims_{beams, steps, layers, heads, units} {
  values_.assign(static_cast<std::size_t>(checked_count(dims_)), fill);
}

AwdTensor AwdTensor::truncated(std::uint32_t steps) const {
  const std::uint32_t keep = std::min(steps, dims_[1]);
  AwdTensor out(dims_[0], keep, dims_[2], dims_[3], dims_[4]);
  const std::size_t step_block = static_cast<std::size_t>(dims_[2]) * dims_[3] * dims_[4];
  for (std::size_t b = 0; b < dims_[0]; ++b) {
    const float* src = values_.data() + offset(b, 0, 0, 0);
    float* dst = out.values_.data() + out.offset(b, 0, 0, 0);
    std::copy(src, src + keep * step_block, dst);
  }
  return out;
}

std::vector<double> SentenceAwd::head_mean(int s, int l) const {
  std::vector<double> out(static_cast<std::size_t>(units), 0.0);
  for (int h = 0; h < heads; ++h) {
    const auto row = slice(s, l, h);
    for (int p = 0; p < units; ++p) out[p] += row[p];
  }
  for (double& v : out) v /= heads;
  return out;
}

Aggregation parse_aggregation(std::string_view name) {
  if (name == "mean") return Aggregation::mean;
  if (name == "median") return Aggregation::median;
  throw InvalidArgument("unknown aggregation '" + std::string(name) + "'");
}

const char* to_string(Aggregation a) { return a == Aggregation::mean ? "mean" : "median"; }

AlignedAwd beam_decode_awd(const AwdTensor& awd, const BeamTrace& trace, int winning_beam,
                           int length) {
  if (length < 0 || static_cast<std::uint32_t>(length) > awd.steps() ||
      static_cast<std::size_t>(length) > trace.size()) {
    throw InvalidArgument("beam_decode_awd: hypothesis length " + std::to_string(length) +
                          " exceeds recorded steps");
  }
  AlignedAwd out;
  out.steps = length;
  out.layers = static_cast<int>(awd.layers());
  out.heads = static_cast<int>(awd.heads());
  out.units = static_cast<int>(awd.units());
  out.values.resize(static_cast<std::size_t>(length) * out.layers * out.heads * out.units);

  const int bs = static_cast<int>(awd.beams());
  int slot = winning_beam;
  for (int t = length - 1; t >= 0; --t) {
    const auto& parents = trace[static_cast<std::size_t>(t)];
    if (slot < 0 || slot >= static_cast<int>(parents.size())) {
      throw InvalidArgument("beam_decode_awd: slot " + std::to_string(slot) +
                            " missing from trace at step " + std::to_string(t));
    }
    const int parent = parents[static_cast<std::size_t>(slot)];
    if (parent < 0 || parent >= bs) {
      throw InvalidArgument("beam_decode_awd: inconsistent trace, parent " +
                            std::to_string(parent) + " at step " + std::to_string(t) +
                            " with beam size " + std::to_string(bs));
    }
    for (int l = 0; l < out.layers; ++l) {
      for (int h = 0; h < out.heads; ++h) {
        const auto src = awd.slice(static_cast<std::size_t>(parent), static_cast<std::size_t>(t),
                                   static_cast<std::size_t>(l), static_cast<std::size_t>(h));
        std::copy(src.begin(), src.end(), out.values.begin() + static_cast<std::ptrdiff_t>(out.offset(t, l, h)));
      }
    }
    slot = parent;
  }
  return out;
}

SentenceSpans split_summary_sentences(std::span<const int> tokens, int eos_sentence_id) {
  SentenceSpans spans;
  int start = 0;
  for (int i = 0; i < static_cast<int>(tokens.size()); ++i) {
    if (tokens[static_cast<std::size_t>(i)] == eos_sentence_id) {
      spans.emplace_back(start, i + 1);
      start = i + 1;
    }
  }
  if (start < static_cast<int>(tokens.size())) {
    spans.emplace_back(start, static_cast<int>(tokens.size()));
  }
  return spans;
}

SentenceAwd aggregate_to_sentences_serial(const AlignedAwd& aligned, const SentenceSpans& spans,
                                          Aggregation method) {
  check_spans(aligned, spans);
  SentenceAwd out = empty_like(aligned, spans.size());
  for (std::size_t s = 0; s < spans.size(); ++s) {
    aggregate_sentence(aligned, spans[s], method, out, static_cast<int>(s));
  }
  return out;
}

SentenceAwd aggregate_to_sentences(const AlignedAwd& aligned, const SentenceSpans& spans,
                                   Aggregation method) {
  check_spans(aligned, spans);
  SentenceAwd out = empty_like(aligned, spans.size());
  const auto n = static_cast<std::ptrdiff_t>(spans.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    aggregate_sentence(aligned, spans[static_cast<std::size_t>(s)], method, out, static_cast<int>(s));
  }
  return out;
}

std::vector<std::uint8_t> encode_awd(const AwdTensor& tensor) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + tensor.values().size() * 4);
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  for (auto d : tensor.dims()) put_u32(out, d);
  for (float v : tensor.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

AwdTensor decode_awd(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw AwdBadMagic("AWD: bad magic (expected \"AWD1\")");
  }
  if (bytes.size() < kHeaderBytes) throw AwdTruncated("AWD: truncated header");
  std::array<std::uint32_t, 5> dims{};
  for (int i = 0; i < 5; ++i) dims[i] = get_u32(bytes.data() + 4 + 4 * i);
  const std::uint64_t count = checked_count(dims);
  const std::uint64_t payload = bytes.size() - kHeaderBytes;
  if (payload < count * 4) {
    throw AwdTruncated("AWD: payload has " + std::to_string(payload) + " bytes, dims imply " +
                       std::to_string(count * 4));
  }
  if (payload > count * 4) {
    throw AwdFormatError("AWD: " + std::to_string(payload - count * 4) + " trailing bytes");
  }
  AwdTensor out(dims[0], dims[1], dims[2], dims[3], dims[4]);
  auto values = out.values();
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(get_u32(p + 4 * i));
  }
  return out;
}

void write_awd(const AwdTensor& tensor, const std::filesystem::path& path) {
  const auto bytes = encode_awd(tensor);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

AwdTensor read_awd(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_awd(bytes);
}

}  // namespace attnorigin::awd
