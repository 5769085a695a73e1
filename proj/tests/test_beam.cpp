// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"

#include "attnorigin/beam.hpp"
#include "attnorigin/error.hpp"

using namespace attnorigin;
using namespace attnorigin::beam;

namespace {

// Logits depend on the whole prefix through a hash-seeded table.
class TableModel final : public StepModel {
 public:
  TableModel(int vocab, std::uint32_t seed, int beam) : vocab_(vocab), seed_(seed), prefixes_(static_cast<std::size_t>(beam)) {}

  int vocab_size() const override { return vocab_; }

  std::vector<double> advance(int slot, int token) override {
    auto& p = prefixes_[static_cast<std::size_t>(slot)];
    p.push_back(token);
    return logits_for(p);
  }

  void reorder(std::span<const int> parents) override {
    std::vector<std::vector<int>> next(prefixes_.size());
    for (std::size_t i = 0; i < parents.size(); ++i) {
      if (parents[i] >= 0) next[i] = prefixes_[static_cast<std::size_t>(parents[i])];
    }
    prefixes_ = std::move(next);
  }

  std::vector<double> logits_for(const std::vector<int>& prefix) const {
    std::uint32_t h = seed_;
    for (int t : prefix) h = h * 2654435761u + static_cast<std::uint32_t>(t) + 1u;
    std::mt19937 rng(h);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<double> out(static_cast<std::size_t>(vocab_));
    for (double& v : out) v = u(rng);
    return out;
  }

 private:
  int vocab_;
  std::uint32_t seed_;
  std::vector<std::vector<int>> prefixes_;
};

double log_softmax_at(const std::vector<double>& logits, int k, const std::vector<bool>& banned) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!banned[i]) m = std::max(m, logits[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!banned[i]) z += std::exp(logits[i] - m);
  }
  return logits[static_cast<std::size_t>(k)] - m - std::log(z);
}

struct Best {
  std::vector<int> tokens;
  double score = -std::numeric_limits<double>::infinity();
};

// Exhaustive search over every sequence that ends in EOS or reaches max_len.
Best exhaustive(const TableModel& model, const BeamConfig& cfg) {
  std::vector<bool> banned(static_cast<std::size_t>(model.vocab_size()), false);
  for (int b : cfg.banned_ids) banned[static_cast<std::size_t>(b)] = true;
  Best best;
  std::function<void(std::vector<int>&, std::vector<int>&, double)> rec =
      [&](std::vector<int>& inputs, std::vector<int>& out, double lp) {
        const auto logits = model.logits_for(inputs);
        for (int v = 0; v < model.vocab_size(); ++v) {
          if (banned[static_cast<std::size_t>(v)]) continue;
          const double l = lp + log_softmax_at(logits, v, banned);
          out.push_back(v);
          if (v == cfg.eos_id || static_cast<int>(out.size()) == cfg.max_len) {
            const double s = l / std::pow(static_cast<double>(out.size()), cfg.length_penalty);
            if (s > best.score) best = {out, s};
          } else {
            inputs.push_back(v);
            rec(inputs, out, l);
            inputs.pop_back();
          }
          out.pop_back();
        }
      };
  std::vector<int> inputs{cfg.bos_id};
  std::vector<int> out;
  rec(inputs, out, 0.0);
  return best;
}

}  // namespace

TEST_CASE("wide beam equals exhaustive search over three steps") {
  for (std::uint32_t seed = 0; seed < 40; ++seed) {
    const int vocab = 5;
    BeamConfig cfg;
    cfg.beam_size = vocab * vocab * vocab;
    cfg.max_len = 3;
    cfg.length_penalty = seed % 2 == 0 ? 0.0 : 0.6;
    cfg.banned_ids = {0, 1};
    TableModel model(vocab, seed, cfg.beam_size);
    const auto r = beam_search(model, cfg);
    const auto oracle = exhaustive(TableModel(vocab, seed, 1), cfg);
    CHECK(r.tokens == oracle.tokens);
    CHECK(r.score == doctest::Approx(oracle.score).epsilon(1e-12));
  }
}

TEST_CASE("trace shape and winning slot") {
  BeamConfig cfg;
  cfg.beam_size = 3;
  cfg.max_len = 6;
  TableModel model(7, 123, cfg.beam_size);
  const auto r = beam_search(model, cfg);
  CHECK(static_cast<int>(r.trace.size()) == r.steps);
  for (const auto& row : r.trace) CHECK(row.size() == 3);
  CHECK(r.winning_beam >= 0);
  CHECK(r.winning_beam < 3);
  CHECK(r.trace[static_cast<std::size_t>(r.tokens.size() - 1)][static_cast<std::size_t>(r.winning_beam)] >= 0);
}

TEST_CASE("first step expands only the root slot") {
  BeamConfig cfg;
  cfg.beam_size = 4;
  cfg.max_len = 2;
  TableModel model(6, 1, cfg.beam_size);
  const auto r = beam_search(model, cfg);
  for (int p : r.trace[0]) CHECK(p == 0);
}

TEST_CASE("min_len keeps EOS out of short hypotheses") {
  BeamConfig cfg;
  cfg.beam_size = 2;
  cfg.max_len = 5;
  cfg.min_len = 5;
  cfg.banned_ids = {0, 1};
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    TableModel model(5, seed, cfg.beam_size);
    const auto r = beam_search(model, cfg);
    CHECK(r.tokens.size() == 5);
    for (std::size_t i = 0; i + 1 < r.tokens.size(); ++i) CHECK(r.tokens[i] != cfg.eos_id);
  }
}

TEST_CASE("bad configuration") {
  TableModel model(4, 0, 1);
  BeamConfig cfg;
  cfg.beam_size = 0;
  CHECK_THROWS_AS(beam_search(model, cfg), InvalidArgument);
  cfg.beam_size = 1;
  cfg.max_len = 0;
  CHECK_THROWS_AS(beam_search(model, cfg), InvalidArgument);
  cfg.max_len = 3;
  cfg.eos_id = 9;
  CHECK_THROWS_AS(beam_search(model, cfg), InvalidArgument);
}
