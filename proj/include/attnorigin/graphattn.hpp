// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attnorigin/awd.hpp"
#include "attnorigin/beam.hpp"
#include "attnorigin/linalg.hpp"
#include "attnorigin/simgraph.hpp"
#include "attnorigin/textunits.hpp"

namespace attnorigin::graphattn {

/// Token ids reserved at the start of every vocabulary.
inline constexpr int kPadId = 0;
inline constexpr int kBosId = 1;
inline constexpr int kEosId = 2;
inline constexpr int kEosSentenceId = 3;
inline constexpr int kNumSpecial = 4;

class Vocabulary {
 public:
  Vocabulary();
  /// Specials followed by `words` (duplicates and special names ignored).
  explicit Vocabulary(const std::vector<std::string>& words);

  /// Sorted distinct tokens of every real unit, after the specials.
  static Vocabulary from_units(std::span<const textunits::UnitizedInput> inputs);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  /// -1 for unknown tokens.
  int id(std::string_view token) const;
  static bool is_special(int id) { return id >= 0 && id < kNumSpecial; }
  /// True when the reserved ids carry the expected special names.
  bool has_specials() const;
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int, std::less<>> index_;
};

/// How the graph penalty combines a similarity g in [0,1]:
/// squared_similarity: (1 - g^2) / (2 sigma^2)   (default)
/// squared_distance:   (1 - g)^2 / (2 sigma^2)
enum class ShiftForm { squared_similarity, squared_distance };

ShiftForm parse_shift_form(std::string_view name);
const char* to_string(ShiftForm form);

struct ModelConfig {
  int d_model = 64;
  int num_layers = 8;
  int num_heads = 8;
  int d_ff = 128;
  double sigma = 1.0;
  int vocab_size = kNumSpecial;
  int num_units = textunits::kParagraphUnits;  // L
  int max_len = 64;
  ShiftForm shift = ShiftForm::squared_similarity;

  int d_head() const { return d_model / num_heads; }
  /// Throws InvalidArgument when any invariant fails.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct LayerNormParams {
  Matrix gain;  // 1×d
  Matrix bias;  // 1×d
  bool operator==(const LayerNormParams&) const = default;
};

/// Two dense maps d→d→1 with ReLU between; its sigmoid picks the central unit.
struct CentralFfn {
  Matrix w1;  // d×d
  Matrix b1;  // 1×d
  Matrix w2;  // d×1
  Matrix b2;  // 1×1
  bool operator==(const CentralFfn&) const = default;
};

struct DecoderLayerWeights {
  LayerNormParams ln_self;
  Matrix self_q, self_k, self_v, self_o;  // d×d
  LayerNormParams ln_graph;
  std::vector<Matrix> graph_q;  // per head, d×d_head
  std::vector<Matrix> graph_k;  // per head, d×d_head
  CentralFfn central;
  Matrix graph_o;  // (heads·d)×d, mixes the concatenated per-head contexts
  LayerNormParams ln_ffn;
  Matrix ffn_w1;  // d×d_ff
  Matrix ffn_b1;  // 1×d_ff
  Matrix ffn_w2;  // d_ff×d
  Matrix ffn_b2;  // 1×d
  bool operator==(const DecoderLayerWeights&) const = default;
};

struct DecoderWeights {
  ModelConfig config;
  Vocabulary vocab;
  Matrix token_embedding;   // V×d
  Matrix unit_position;     // L×d
  Matrix decoder_position;  // max_len×d
  Matrix enc_q, enc_k, enc_v;  // d×d, single-head encoder self-attention
  std::vector<DecoderLayerWeights> layers;
  LayerNormParams ln_final;
  Matrix output;       // d×V
  Matrix output_bias;  // 1×V

  /// Visits every parameter with a stable dotted name.
  void for_each_param(const std::function<void(const std::string&, Matrix&)>& fn);
  void for_each_param(const std::function<void(const std::string&, const Matrix&)>& fn) const;
  /// Checks every shape against `config` and that all values are finite.
  void validate() const;
};

/// Encoded unit vectors x_j, one row per unit slot; pad rows are zero.
struct EncodedUnits {
  Matrix x;  // L×d
};

/// Penalty subtracted from a logit for graph similarity `g`.
double graph_shift(double g, double sigma, ShiftForm form = ShiftForm::squared_similarity);

/// Encoder self-attention weights over units (rows = queries); logits carry
/// the graph shift -shift(G[i][j]) and pad keys are masked. Pad rows are 0.
Matrix encoder_attention(const Matrix& unit_inputs, const DecoderWeights& weights,
                         const simgraph::SimilarityGraph& graph,
                         std::span<const std::uint8_t> pad_units);

/// u_i = mean token embedding + unit position; x_i = u_i + sum_j alpha_ij u_j W_V.
EncodedUnits encode_units(const textunits::UnitizedInput& input, const DecoderWeights& weights,
                          const simgraph::SimilarityGraph& graph);

/// e_j = (y W_Q)(x_j W_K)^T / sqrt(d_head).
Vec unscaled_attention(std::span<const double> y, const Matrix& x, const Matrix& w_q,
                       const Matrix& w_k);

/// round(sigmoid(ffn(y)) · (L-1)).
int central_paragraph(std::span<const double> y, const CentralFfn& ffn, int num_units);

/// beta = softmax_j(e_j - shift(G[s][j])), pad units masked to -infinity.
Vec graph_shifted_attention(std::span<const double> e, const simgraph::SimilarityGraph& graph,
                            int central, double sigma, std::span<const std::uint8_t> pad_units,
                            ShiftForm form = ShiftForm::squared_similarity);

/// g = sum_j beta_j x_j (no value projection).
Vec global_context(std::span<const double> beta, const Matrix& x);

/// Everything fixed for one input set during decoding.
struct DecoderContext {
  const DecoderWeights* weights = nullptr;
  const simgraph::SimilarityGraph* graph = nullptr;
  EncodedUnits encoded;
  std::vector<std::uint8_t> pad_units;
  /// x_j W_K for every [layer][head], L×d_head; step-independent.
  std::vector<std::vector<Matrix>> graph_keys;
};

DecoderContext make_context(const textunits::UnitizedInput& input, const DecoderWeights& weights,
                            const simgraph::SimilarityGraph& graph);

/// Cached per-layer keys and values of the generated prefix.
struct DecodeState {
  std::vector<std::vector<Vec>> self_keys;    // [layer][position]
  std::vector<std::vector<Vec>> self_values;  // [layer][position]
  int length() const { return self_keys.empty() ? 0 : static_cast<int>(self_keys.front().size()); }
};

struct StepOutput {
  Vec logits;
  /// beta for every [layer][head], each of length L.
  std::vector<std::vector<Vec>> attention;
  std::vector<int> central;  // per layer
};

/// Runs all decoder layers for one new input token at position state.length().
StepOutput decode_step(DecodeState& state, int input_token, const DecoderContext& context);

struct GenerationConfig {
  int beam_size = 4;
  int max_len = 64;
  double length_penalty = 0.6;
  int min_len = 0;
};

struct GenerationResult {
  std::vector<int> tokens;
  awd::BeamTrace beam_trace;
  int winning_beam = 0;
  double score = 0.0;
  awd::AwdTensor awd;
};

/// Beam search over decode_step, recording beta for every live slot at every
/// step. Slots without a live hypothesis keep the uniform distribution over
/// real units.
GenerationResult generate_with_beam(const textunits::UnitizedInput& input,
                                    const DecoderWeights& weights,
                                    const simgraph::SimilarityGraph& graph,
                                    const GenerationConfig& config);

/// Correctly shaped weights with every entry zero.
DecoderWeights zero_weights(const ModelConfig& config, const Vocabulary& vocab);

/// Seeded uniform(-a, a) weights with a = sqrt(3 / fan_in); portable across
/// standard libraries (splitmix64 stream, no std distributions).
DecoderWeights make_synthetic_weights(std::uint64_t seed, const ModelConfig& config,
                                      const Vocabulary& vocab);

struct ConcentratorOptions {
  int target = 0;          // unit index every head should attend
  double margin = 25.0;    // guaranteed e_target - e_j for every other unit
  int sentence_length = 6; // every n-th generated token is pushed to EOS-SENT
};

/// Weights under which every head of every layer attends `target`.
/// Channel layout: token content in [0, d/2 - 1), a constant channel at
/// d/2 - 1 (fed by layer-norm bias), sinusoidal unit positions in [d/2, d).
/// Queries read only the constant channel and keys only the positional half,
/// so e_target - e_j >= margin independent of the input text. The global
/// context is copied into the residual stream and read out through the tied
/// embedding, so generated tokens come from the target unit.
DecoderWeights make_concentrator_weights(std::uint64_t seed, const ModelConfig& config,
                                         const Vocabulary& vocab,
                                         const ConcentratorOptions& options);

}  // namespace attnorigin::graphattn
