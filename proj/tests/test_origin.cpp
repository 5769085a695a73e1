// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "attnorigin/error.hpp"
#include "attnorigin/origin.hpp"

using namespace attnorigin;
using namespace attnorigin::origin;
using rouge::Variant;

namespace {

// Textbook formula: cov / (sd_x sd_y) with sums of raw products.
double direct_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

textunits::UnitizedInput input_of(std::vector<std::string> paragraphs, int L) {
  textunits::MultiDocSet s;
  s.set_id = "o";
  s.documents.push_back(textunits::RawDocument::from_paragraphs("d", std::move(paragraphs)));
  return textunits::unitize(s, textunits::UnitMode::paragraph, L, 20);
}

awd::SentenceAwd sentence_awd(int sentences, int layers, int heads, int units, std::vector<double> values) {
  awd::SentenceAwd a{sentences, layers, heads, units, std::move(values)};
  REQUIRE(a.values.size() == static_cast<std::size_t>(sentences * layers * heads * units));
  return a;
}

// Origin metric whose F-scores for every variant are the given grid.
OriginMetric metric_of(int sentences, int units, const std::vector<double>& f, std::vector<std::uint8_t> pads = {}) {
  OriginMetric m;
  m.sentences = sentences;
  m.units = units;
  m.pad_units = pads.empty() ? std::vector<std::uint8_t>(static_cast<std::size_t>(units), 0) : pads;
  for (double v : f) {
    rouge::RougeScore s{v, v, v};
    m.cells.push_back({s, s, s});
  }
  return m;
}

SummaryAnalysis random_analysis(std::mt19937& rng, int sentences, int layers, int heads, int units,
                                std::vector<std::uint8_t> pads = {}) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> a(static_cast<std::size_t>(sentences * layers * heads * units));
  for (double& v : a) v = u(rng);
  std::vector<double> f(static_cast<std::size_t>(sentences * units));
  for (double& v : f) v = u(rng);
  SummaryAnalysis out;
  out.set_id = "r";
  out.attention = sentence_awd(sentences, layers, heads, units, a);
  out.origin = metric_of(sentences, units, f, pads);
  return out;
}

}  // namespace

TEST_CASE("reference metric cells") {
  const auto in = input_of({"The storm hit.", "Blue sky", "A! Zed"}, 4);
  const std::vector<rouge::Tokens> sentences{{"the", "storm", "hit", "."}, {"a", "!", "q"}};
  const auto m = reference_metric(sentences, in);
  CHECK(m.sentences == 2);
  CHECK(m.units == 4);
  for (auto v : {Variant::r1, Variant::r2, Variant::rl}) {
    CHECK(m.f1(0, 0, v) == 1.0);
    CHECK(m.f1(0, 1, v) == 0.0);
  }
  // "A!" scores F1 0.8 against [a ! q] and "Zed" scores 0.
  CHECK(m.f1(1, 2, Variant::r1) == doctest::Approx(0.4));
  CHECK(m.f1(1, 2, Variant::rl) == doctest::Approx(0.4));
  CHECK(m.at(1, 3) == rouge::RougeTriple{});
  CHECK(m.pad_units == std::vector<std::uint8_t>{0, 0, 0, 1});
  const auto s = reference_metric_serial(sentences, in);
  CHECK(s.cells == m.cells);
}

TEST_CASE("pearson") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1, 3, 2, 4};
  CHECK(*pearson(x, y) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(*pearson(x, x) == 1.0);
  const std::vector<double> neg{-1, -2, -3, -4};
  CHECK(*pearson(x, neg) == -1.0);
  CHECK_FALSE(pearson(x, std::vector<double>{2, 2, 2, 2}).has_value());
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), InvalidArgument);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
}

TEST_CASE("property: pearson bounds, affine invariance, accumulator agreement") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_int_distribution<int> len(2, 60);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = len(rng);
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] = u(rng);
      y[static_cast<std::size_t>(i)] = 0.3 * x[static_cast<std::size_t>(i)] + u(rng);
    }
    const double r = *pearson(x, y);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    CHECK(r == doctest::Approx(direct_pearson(x, y)).epsilon(1e-9));

    const double a = std::abs(u(rng)) + 0.1;
    const double b = u(rng);
    std::vector<double> ax(x), nx(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      ax[i] = a * x[i] + b;
      nx[i] = -a * x[i] + b;
    }
    CHECK(*pearson(ax, y) == doctest::Approx(r).epsilon(1e-12));
    CHECK(*pearson(nx, y) == doctest::Approx(-r).epsilon(1e-12));
    CHECK(*pearson(x, ax) == 1.0);
    CHECK(*pearson(x, nx) == -1.0);

    PearsonAccumulator whole, left, right;
    const int cut = n / 2;
    for (int i = 0; i < n; ++i) {
      whole.add(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
      (i < cut ? left : right).add(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
    }
    left.merge(right);
    CHECK(left.count() == n);
    CHECK(*left.coefficient() == doctest::Approx(r).epsilon(1e-12));
    CHECK(*whole.coefficient() == doctest::Approx(r).epsilon(1e-12));
  }
  PearsonAccumulator one;
  one.add(1, 2);
  CHECK_FALSE(one.coefficient().has_value());
}

TEST_CASE("attention proportional to R correlates perfectly") {
  const std::vector<double> f{0.1, 0.5, 0.2, 0.9, 0.0, 0.3};
  std::vector<double> a;
  // Layout [s][l][h][p]: 2 sentences, 2 layers, 1 head, 3 units.
  for (int s = 0; s < 2; ++s) {
    for (int l = 0; l < 2; ++l) {
      for (int p = 0; p < 3; ++p) a.push_back((l + 1) * 0.5 * f[static_cast<std::size_t>(s * 3 + p)]);
    }
  }
  SummaryAnalysis x{"p", sentence_awd(2, 2, 1, 3, a), metric_of(2, 3, f), std::nullopt};
  const auto c = correlate_awd_origin(std::span(&x, 1), Variant::r2);
  CHECK(c.sample_count == 6);
  CHECK(*c.per_layer[0] == 1.0);
  CHECK(*c.per_layer[1] == 1.0);
  CHECK(*c.per_head[1] == 1.0);
}

TEST_CASE("uniform attention is flagged undefined") {
  SummaryAnalysis x{"u", sentence_awd(2, 1, 2, 2, std::vector<double>(8, 0.5)), metric_of(2, 2, {0.1, 0.2, 0.3, 0.4}),
                    std::nullopt};
  const auto c = correlate_awd_origin(std::span(&x, 1), Variant::r1);
  CHECK_FALSE(c.per_layer[0].has_value());
  CHECK_FALSE(c.per_head[0].has_value());
}

TEST_CASE("two-summary fixture matches a hand-flattened oracle") {
  // Summary A: 1 sentence, 3 units (last one pad). Summary B: 2 sentences, 2 units.
  SummaryAnalysis a{"a",
                    sentence_awd(1, 1, 2, 3, {0.6, 0.4, 0.0, 0.2, 0.8, 0.0}),
                    metric_of(1, 3, {0.5, 0.1, 0.0}, {0, 0, 1}),
                    std::nullopt};
  SummaryAnalysis b{"b",
                    sentence_awd(2, 1, 2, 2, {0.9, 0.1, 0.7, 0.3, 0.3, 0.7, 0.5, 0.5}),
                    metric_of(2, 2, {0.8, 0.2, 0.1, 0.6}),
                    std::nullopt};
  const std::vector<SummaryAnalysis> batch{a, b};
  // Cells in order (a,s0,p0) (a,s0,p1) (b,s0,p0) (b,s0,p1) (b,s1,p0) (b,s1,p1).
  const std::vector<double> head0{0.6, 0.4, 0.9, 0.1, 0.3, 0.7};
  const std::vector<double> head1{0.2, 0.8, 0.7, 0.3, 0.5, 0.5};
  const std::vector<double> mean{0.4, 0.6, 0.8, 0.2, 0.4, 0.6};
  const std::vector<double> r{0.5, 0.1, 0.8, 0.2, 0.1, 0.6};
  const auto c = correlate_awd_origin(batch, Variant::rl);
  CHECK(c.sample_count == 6);
  CHECK(*c.per_layer[0] == doctest::Approx(direct_pearson(mean, r)).epsilon(1e-12));
  CHECK(*c.per_head[0] == doctest::Approx(direct_pearson(head0, r)).epsilon(1e-12));
  CHECK(*c.per_head[1] == doctest::Approx(direct_pearson(head1, r)).epsilon(1e-12));

  const auto hm = head_correlations(batch, 0);
  CHECK(*hm.at(0, 1) == doctest::Approx(direct_pearson(head0, head1)).epsilon(1e-12));
  CHECK(*hm.at(0, 0) == 1.0);
}

TEST_CASE("property: parallel pooled correlation equals the serial reference") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> dim(1, 4);
  for (int trial = 0; trial < 50; ++trial) {
    const int layers = dim(rng);
    const int heads = dim(rng);
    const int units = dim(rng) + 1;
    std::vector<SummaryAnalysis> batch;
    const int n = dim(rng);
    for (int i = 0; i < n; ++i) batch.push_back(random_analysis(rng, dim(rng), layers, heads, units));
    for (auto v : {Variant::r1, Variant::r2, Variant::rl}) {
      const auto p = correlate_awd_origin(batch, v);
      const auto s = correlate_awd_origin_serial(batch, v);
      CHECK(p.sample_count == s.sample_count);
      for (std::size_t i = 0; i < p.per_layer.size(); ++i) {
        REQUIRE(p.per_layer[i].has_value() == s.per_layer[i].has_value());
        if (p.per_layer[i]) CHECK(*p.per_layer[i] == doctest::Approx(*s.per_layer[i]).epsilon(1e-12));
      }
      for (std::size_t i = 0; i < p.per_head.size(); ++i) {
        REQUIRE(p.per_head[i].has_value() == s.per_head[i].has_value());
        if (p.per_head[i]) CHECK(*p.per_head[i] == doctest::Approx(*s.per_head[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("correlation matrices") {
  std::mt19937 rng(23);
  auto x = random_analysis(rng, 3, 2, 3, 4);
  // Make head 1 of layer 0 a copy of head 0.
  for (int s = 0; s < 3; ++s) {
    for (int p = 0; p < 4; ++p) {
      x.attention.values[x.attention.offset(s, 0, 1) + static_cast<std::size_t>(p)] = x.attention.at(s, 0, 0, p);
    }
  }
  const std::vector<SummaryAnalysis> batch{x};
  const auto m = head_correlations(batch, 0);
  CHECK(m.size == 3);
  CHECK(*m.at(0, 1) == 1.0);
  std::vector<std::vector<double>> series(3);
  for (int h = 0; h < 3; ++h) {
    for (int s = 0; s < 3; ++s) {
      for (int p = 0; p < 4; ++p) series[static_cast<std::size_t>(h)].push_back(x.attention.at(s, 0, h, p));
    }
  }
  CHECK(*m.at(0, 2) == doctest::Approx(direct_pearson(series[0], series[2])).epsilon(1e-12));
  CHECK(*m.at(1, 2) == doctest::Approx(direct_pearson(series[1], series[2])).epsilon(1e-12));

  const auto lm = layer_correlations(batch);
  CHECK(lm.size == 2);
  for (const auto* mat : {&m, &lm}) {
    for (int i = 0; i < mat->size; ++i) {
      CHECK(*mat->at(i, i) == 1.0);
      for (int j = 0; j < mat->size; ++j) CHECK(mat->at(i, j) == mat->at(j, i));
    }
  }
  const auto summary = off_diagonal_summary(m);
  const double oracle_mean = (1.0 + *m.at(0, 2) + *m.at(1, 2)) / 3.0;
  CHECK(*summary.mean == doctest::Approx(oracle_mean));
  CHECK(*summary.min == std::min({1.0, *m.at(0, 2), *m.at(1, 2)}));
  CHECK_FALSE(off_diagonal_summary(CorrelationMatrix{1, {1.0}}).mean.has_value());
  CHECK_THROWS_AS(head_correlations(batch, 2), InvalidArgument);
}

TEST_CASE("argmax_paragraph") {
  const auto onehot = sentence_awd(2, 1, 1, 3, {0, 0, 1, 0, 1, 0});
  CHECK(argmax_paragraph(onehot, 0) == std::vector<int>{2, 1});
  const auto uniform = sentence_awd(1, 1, 2, 3, std::vector<double>(6, 1.0 / 3));
  CHECK(argmax_paragraph(uniform, 0) == std::vector<int>{0});
  CHECK_THROWS_AS(argmax_paragraph(uniform, 1), InvalidArgument);

  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(5);
    for (double& x : v) x = u(rng);
    std::vector<double> t(v);
    for (double& x : t) x = std::exp(3.0 * x) - 7.0;
    CHECK(argmax_paragraph(sentence_awd(1, 1, 1, 5, v), 0) == argmax_paragraph(sentence_awd(1, 1, 1, 5, t), 0));
  }
}

TEST_CASE("positional bias") {
  // Units: doc0 = {0,1}, doc1 = {2,3,4}.
  const std::vector<int> bounds{0, 0, 1, 1, 1};
  auto make = [&](std::vector<int> targets) {
    const int n = static_cast<int>(targets.size());
    std::vector<double> a(static_cast<std::size_t>(n * 5), 0.0);
    for (int s = 0; s < n; ++s) a[static_cast<std::size_t>(s * 5 + targets[static_cast<std::size_t>(s)])] = 1.0;
    return SummaryAnalysis{"x", sentence_awd(n, 1, 1, 5, a), metric_of(n, 5, std::vector<double>(a.size(), 0.0)), bounds};
  };
  const std::vector<SummaryAnalysis> leading{make({0, 2}), make({2, 0, 2})};
  const auto lead = positional_bias(leading, 0);
  CHECK(lead.rows == 3);
  CHECK(lead.cols == 3);
  for (int c = 0; c < 3; ++c) CHECK(lead.value(0, c) == 1.0);

  const std::vector<SummaryAnalysis> single{make({3})};
  const auto one = positional_bias(single, 0);
  int hot = 0;
  for (double v : one.normalized) hot += v == 1.0;
  CHECK(hot == 1);
  CHECK(one.value(1, 0) == 1.0);

  // Hand tally. Positions: unit0->0, 1->1, 2->0, 3->1, 4->2.
  const std::vector<SummaryAnalysis> three{make({1, 4}), make({3, 3, 0}), make({4})};
  const auto h = positional_bias(three, 0);
  CHECK(h.count(1, 0) == 2);
  CHECK(h.count(2, 0) == 1);
  CHECK(h.count(2, 1) == 1);
  CHECK(h.count(1, 1) == 1);
  CHECK(h.count(0, 2) == 1);
  CHECK(h.value(1, 0) == doctest::Approx(2.0 / 3.0));
  for (int c = 0; c < h.cols; ++c) {
    double sum = 0.0;
    for (int r = 0; r < h.rows; ++r) sum += h.value(r, c);
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }

  auto no_bounds = make({0});
  no_bounds.doc_boundaries.reset();
  CHECK_THROWS_AS(positional_bias(std::vector<SummaryAnalysis>{no_bounds}, 0), InvalidArgument);
}
