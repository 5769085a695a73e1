// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/beam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attnorigin/linalg.hpp"

namespace attnorigin::beam {

namespace {

struct Hypothesis {
  std::vector<int> tokens;
  double log_prob = 0.0;
};

struct Candidate {
  double log_prob;
  int parent;
  int token;
};

struct Finished {
  std::vector<int> tokens;
  double log_prob;
  double score;
  int slot;
};

}  // namespace

BeamResult beam_search(StepModel& model, const BeamConfig& config) {
  if (config.beam_size < 1) throw InvalidArgument("beam_search: beam size must be >= 1");
  if (config.max_len < 1) throw InvalidArgument("beam_search: max_len must be >= 1");
  if (config.min_len < 0) throw InvalidArgument("beam_search: min_len must be >= 0");
  const int vocab = model.vocab_size();
  if (config.eos_id < 0 || config.eos_id >= vocab) {
    throw InvalidArgument("beam_search: EOS id outside the vocabulary");
  }
  std::vector<bool> banned(static_cast<std::size_t>(vocab), false);
  for (int id : config.banned_ids) {
    if (id >= 0 && id < vocab) banned[static_cast<std::size_t>(id)] = true;
  }

  // Slot index -> live hypothesis (nullopt-like: empty slots have live=false).
  std::vector<Hypothesis> slots(1);
  std::vector<bool> live(1, true);
  std::vector<Finished> finished;
  BeamResult result;

  for (int t = 0; t < config.max_len; ++t) {
    std::vector<Candidate> candidates;
    bool any_live = false;
    for (int b = 0; b < static_cast<int>(slots.size()); ++b) {
      if (!live[static_cast<std::size_t>(b)]) continue;
      any_live = true;
      const auto& hyp = slots[static_cast<std::size_t>(b)];
      const int input = hyp.tokens.empty() ? config.bos_id : hyp.tokens.back();
      auto logits = model.advance(b, input);
      for (int v = 0; v < vocab; ++v) {
        if (banned[static_cast<std::size_t>(v)]) logits[static_cast<std::size_t>(v)] = -std::numeric_limits<double>::infinity();
      }
      const bool eos_open = t + 1 >= config.min_len;
      if (!eos_open) logits[static_cast<std::size_t>(config.eos_id)] = -std::numeric_limits<double>::infinity();
      const auto logp = log_softmax(logits);
      for (int v = 0; v < vocab; ++v) {
        if (banned[static_cast<std::size_t>(v)] || (!eos_open && v == config.eos_id)) continue;
        candidates.push_back({hyp.log_prob + logp[static_cast<std::size_t>(v)], b, v});
      }
    }
    if (!any_live) break;

    const std::size_t keep = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(config.beam_size));
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      [](const Candidate& a, const Candidate& b) {
                        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });

    std::vector<int> parents(static_cast<std::size_t>(config.beam_size), -1);
    std::vector<int> continuing(static_cast<std::size_t>(config.beam_size), -1);
    std::vector<Hypothesis> next(static_cast<std::size_t>(config.beam_size));
    std::vector<bool> next_live(static_cast<std::size_t>(config.beam_size), false);
    const bool last_step = t == config.max_len - 1;
    for (std::size_t i = 0; i < keep; ++i) {
      const auto& c = candidates[i];
      parents[i] = c.parent;
      Hypothesis h{slots[static_cast<std::size_t>(c.parent)].tokens, c.log_prob};
      h.tokens.push_back(c.token);
      if (c.token == config.eos_id || last_step) {
        const double len = static_cast<double>(h.tokens.size());
        const double score = c.log_prob / std::pow(len, config.length_penalty);
        finished.push_back({h.tokens, c.log_prob, score, static_cast<int>(i)});
      } else {
        next_live[i] = true;
        continuing[i] = c.parent;
      }
      next[i] = std::move(h);
    }
    result.trace.push_back(parents);
    result.steps = t + 1;
    model.reorder(continuing);
    slots = std::move(next);
    live = std::move(next_live);
  }

  // First finished hypothesis wins ties: earlier step, then lower slot.
  const Finished* best = nullptr;
  for (const auto& f : finished) {
    if (best == nullptr || f.score > best->score) best = &f;
  }
  if (best == nullptr) throw Error("beam_search: no hypothesis finished");
  result.tokens = best->tokens;
  result.winning_beam = best->slot;
  result.log_prob = best->log_prob;
  result.score = best->score;
  return result;
}

}  // namespace attnorigin::beam
