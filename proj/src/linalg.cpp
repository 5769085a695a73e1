// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attnorigin/error.hpp"

namespace attnorigin {

namespace {

constexpr std::size_t kParallelColumns = 512;

void check_linear(std::span<const double> x, const Matrix& w) {
  if (x.size() != w.rows()) {
    throw InvalidArgument("linear: vector length " + std::to_string(x.size()) +
                          " does not match matrix rows " + std::to_string(w.rows()));
  }
}

// Accumulates columns [begin, end) of x·W, rows in ascending order.
void linear_block(std::span<const double> x, const Matrix& w, std::size_t begin,
                  std::size_t end, double* out) {
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double xr = x[r];
    const double* row = w.row(r).data();
    for (std::size_t c = begin; c < end; ++c) out[c] += xr * row[c];
  }
}

}  // namespace

Vec linear_serial(std::span<const double> x, const Matrix& w) {
  check_linear(x, w);
  Vec out(w.cols(), 0.0);
  linear_block(x, w, 0, w.cols(), out.data());
  return out;
}

Vec linear(std::span<const double> x, const Matrix& w) {
  check_linear(x, w);
  Vec out(w.cols(), 0.0);
  const auto cols = static_cast<std::ptrdiff_t>(w.cols());
  constexpr std::ptrdiff_t kBlock = 64;
  const std::ptrdiff_t blocks = (cols + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static) if (w.cols() >= kParallelColumns)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const auto begin = static_cast<std::size_t>(b * kBlock);
    const auto end = static_cast<std::size_t>(std::min(cols, (b + 1) * kBlock));
    linear_block(x, w, begin, end, out.data());
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Vec softmax(std::span<const double> logits) {
  Vec out(logits.size(), 0.0);
  double max = -std::numeric_limits<double>::infinity();
  for (double v : logits) max = std::max(max, v);
  if (!std::isfinite(max)) {
    throw InvalidArgument("softmax: no finite logit");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

Vec log_softmax(std::span<const double> logits) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : logits) max = std::max(max, v);
  if (!std::isfinite(max)) {
    throw InvalidArgument("log_softmax: no finite logit");
  }
  double total = 0.0;
  for (double v : logits) total += std::exp(v - max);
  const double log_z = max + std::log(total);
  Vec out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
  return out;
}

Vec layer_norm(std::span<const double> x, std::span<const double> gain,
               std::span<const double> bias) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  const double inv = 1.0 / std::sqrt(var + 1e-5);
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) * inv * gain[i] + bias[i];
  return out;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

}  // namespace attnorigin
