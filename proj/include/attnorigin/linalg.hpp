// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace attnorigin {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles. Vectors stored as parameters use 1×n.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// x·W for a row vector x (length W.rows()); result has W.cols() entries.
/// Columns are split across OpenMP threads once the output is wide enough.
Vec linear(std::span<const double> x, const Matrix& w);
/// Serial reference for `linear`; identical summation order, so bit-identical.
Vec linear_serial(std::span<const double> x, const Matrix& w);

double dot(std::span<const double> a, std::span<const double> b);

/// Numerically stable softmax; -infinity entries get probability 0.
Vec softmax(std::span<const double> logits);
Vec log_softmax(std::span<const double> logits);

/// Layer normalization with per-channel gain and bias (epsilon 1e-5).
Vec layer_norm(std::span<const double> x, std::span<const double> gain,
               std::span<const double> bias);

bool all_finite(std::span<const double> v);

}  // namespace attnorigin
