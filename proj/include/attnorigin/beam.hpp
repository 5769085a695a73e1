// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <span>
#include <vector>

#include "attnorigin/awd.hpp"

namespace attnorigin::beam {

/// A model driven by beam search. Slots are the beam positions of the
/// previous step; the model keeps one decoding state per slot.
class StepModel {
 public:
  virtual ~StepModel() = default;
  virtual int vocab_size() const = 0;
  /// Feeds `token` to the hypothesis held in `slot` and returns the logits
  /// for the next token.
  virtual std::vector<double> advance(int slot, int token) = 0;
  /// After selection, new slot i continues old slot parents[i]; -1 means the
  /// new slot holds no live hypothesis.
  virtual void reorder(std::span<const int> parents) = 0;
};

struct BeamConfig {
  int beam_size = 4;
  int max_len = 64;
  double length_penalty = 0.6;  // alpha in score / length^alpha
  int bos_id = 1;
  int eos_id = 2;
  /// Ids that may never be generated (padding, begin-of-sequence).
  std::vector<int> banned_ids;
  /// EOS is unavailable until a hypothesis holds this many tokens.
  int min_len = 0;
};

struct BeamResult {
  std::vector<int> tokens;  // best hypothesis, including its EOS if it produced one
  int winning_beam = 0;     // slot of the final token at step tokens.size()-1
  double log_prob = 0.0;
  double score = 0.0;  // log_prob / length^alpha
  awd::BeamTrace trace;
  int steps = 0;  // number of decoding steps executed
};

/// Fixed-width beam search. At every step each live slot is advanced once;
/// the beam_size best (hypothesis, token) candidates by cumulative log
/// probability fill the next step's slots (ties: lower parent, then lower
/// token id). Candidates ending in EOS, and every candidate at step
/// max_len-1, are finished and ranked by length-normalized score.
BeamResult beam_search(StepModel& model, const BeamConfig& config);

}  // namespace attnorigin::beam
