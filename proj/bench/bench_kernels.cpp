// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.
//
// Serial references against their OpenMP counterparts.

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "attnorigin/awd.hpp"
#include "attnorigin/linalg.hpp"
#include "attnorigin/origin.hpp"
#include "attnorigin/simgraph.hpp"
#include "attnorigin/textunits.hpp"

using namespace attnorigin;

namespace {

std::string random_text(std::mt19937& rng, int words) {
  std::uniform_int_distribution<int> w(0, 400);
  std::string out;
  for (int i = 0; i < words; ++i) {
    out += "w" + std::to_string(w(rng));
    out += i % 12 == 11 ? ". " : " ";
  }
  return out + ".";
}

textunits::UnitizedInput make_input(int paragraphs) {
  std::mt19937 rng(1);
  textunits::MultiDocSet set;
  set.set_id = "bench";
  for (int d = 0; d < paragraphs / 10; ++d) {
    std::vector<std::string> ps;
    for (int p = 0; p < 10; ++p) ps.push_back(random_text(rng, 60));
    set.documents.push_back(textunits::RawDocument::from_paragraphs("d" + std::to_string(d), ps));
  }
  return textunits::unitize(set, textunits::UnitMode::paragraph, paragraphs, 60);
}

std::vector<rouge::Tokens> make_summary(int sentences) {
  std::mt19937 rng(2);
  std::vector<rouge::Tokens> out;
  for (int s = 0; s < sentences; ++s) out.push_back(textunits::tokenize(random_text(rng, 20)));
  return out;
}

awd::AlignedAwd make_aligned(int steps, int layers, int heads, int units) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  awd::AlignedAwd a{steps, layers, heads, units, {}};
  a.values.resize(static_cast<std::size_t>(steps) * layers * heads * units);
  for (std::size_t i = 0; i < a.values.size(); i += units) {
    double z = 0.0;
    for (int p = 0; p < units; ++p) z += a.values[i + p] = u(rng);
    for (int p = 0; p < units; ++p) a.values[i + p] /= z;
  }
  return a;
}

awd::SentenceSpans spans_of(int steps, int length) {
  awd::SentenceSpans spans;
  for (int b = 0; b < steps; b += length) spans.emplace_back(b, std::min(steps, b + length));
  return spans;
}

template <bool Serial>
void BM_BuildGraph(benchmark::State& state) {
  const auto in = make_input(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Serial ? simgraph::build_graph_serial(in.units) : simgraph::build_graph(in.units));
  }
}

template <bool Serial>
void BM_ReferenceMetric(benchmark::State& state) {
  const auto in = make_input(static_cast<int>(state.range(0)));
  const auto summary = make_summary(10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Serial ? origin::reference_metric_serial(summary, in)
                                    : origin::reference_metric(summary, in));
  }
}

template <bool Serial>
void BM_Aggregate(benchmark::State& state) {
  const auto a = make_aligned(static_cast<int>(state.range(0)), 8, 8, 30);
  const auto spans = spans_of(a.steps, 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Serial ? awd::aggregate_to_sentences_serial(a, spans, awd::Aggregation::median)
                                    : awd::aggregate_to_sentences(a, spans, awd::Aggregation::median));
  }
}

template <bool Serial>
void BM_Correlate(benchmark::State& state) {
  const int summaries = static_cast<int>(state.range(0));
  const auto in = make_input(30);
  const auto summary = make_summary(8);
  const auto origin_metric = origin::reference_metric(summary, in);
  std::vector<origin::SummaryAnalysis> batch;
  for (int i = 0; i < summaries; ++i) {
    origin::SummaryAnalysis a;
    a.set_id = "s" + std::to_string(i);
    a.attention = awd::aggregate_to_sentences(make_aligned(160, 8, 8, 30), spans_of(160, 20), awd::Aggregation::mean);
    a.origin = origin_metric;
    batch.push_back(std::move(a));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(Serial ? origin::correlate_awd_origin_serial(batch, rouge::Variant::r1)
                                    : origin::correlate_awd_origin(batch, rouge::Variant::r1));
  }
}

template <bool Serial>
void BM_Linear(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix w(n, n);
  for (double& v : w.data()) v = u(rng);
  Vec x(n);
  for (double& v : x) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(Serial ? linear_serial(x, w) : linear(x, w));
}

}  // namespace

BENCHMARK(BM_BuildGraph<true>)->Name("build_graph/serial")->Arg(30)->Arg(120);
BENCHMARK(BM_BuildGraph<false>)->Name("build_graph/openmp")->Arg(30)->Arg(120);
BENCHMARK(BM_ReferenceMetric<true>)->Name("reference_metric/serial")->Arg(30)->Arg(60);
BENCHMARK(BM_ReferenceMetric<false>)->Name("reference_metric/openmp")->Arg(30)->Arg(60);
BENCHMARK(BM_Aggregate<true>)->Name("aggregate_median/serial")->Arg(160);
BENCHMARK(BM_Aggregate<false>)->Name("aggregate_median/openmp")->Arg(160);
BENCHMARK(BM_Correlate<true>)->Name("correlate/serial")->Arg(16)->Arg(64);
BENCHMARK(BM_Correlate<false>)->Name("correlate/openmp")->Arg(16)->Arg(64);
BENCHMARK(BM_Linear<true>)->Name("linear/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_Linear<false>)->Name("linear/openmp")->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
