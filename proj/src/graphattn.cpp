// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/graphattn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attnorigin/error.hpp"

namespace attnorigin::graphattn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const std::vector<std::string>& special_names() {
  static const std::vector<std::string> names{"<pad>", "<bos>", "<eos>", "<eos_sent>"};
  return names;
}

Vec relu(Vec v) {
  for (double& d : v) d = std::max(0.0, d);
  return v;
}

void add_into(Vec& acc, std::span<const double> v) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

Vec ln(std::span<const double> x, const LayerNormParams& p) {
  return layer_norm(x, p.gain.data(), p.bias.data());
}

// e_j = q·k_j / sqrt(d_head) against precomputed keys.
Vec scores_from_keys(std::span<const double> q, const Matrix& keys) {
  const double scale = std::sqrt(static_cast<double>(q.size()));
  Vec e(keys.rows());
  for (std::size_t j = 0; j < keys.rows(); ++j) e[j] = dot(q, keys.row(j)) / scale;
  return e;
}

Matrix project_rows(const Matrix& x, const Matrix& w) {
  Matrix out(x.rows(), w.cols());
  for (std::size_t j = 0; j < x.rows(); ++j) {
    const Vec r = linear_serial(x.row(j), w);
    std::copy(r.begin(), r.end(), out.row(j).begin());
  }
  return out;
}

// splitmix64; portable, so weights are identical across toolchains.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform(double a) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * a;
  }

 private:
  std::uint64_t state_;
};

void fill_sinusoid(Matrix& m, std::size_t first_col, std::size_t width) {
  for (std::size_t p = 0; p < m.rows(); ++p) {
    for (std::size_t i = 0; i < width; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(i / 2 * 2) / static_cast<double>(width));
      const double angle = static_cast<double>(p) * freq;
      m(p, first_col + i) = i % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  }
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <class Weights, class Fn>
void visit_params(Weights& w, Fn&& fn) {
  fn(std::string("token_embedding"), w.token_embedding);
  fn(std::string("unit_position"), w.unit_position);
  fn(std::string("decoder_position"), w.decoder_position);
  fn(std::string("encoder.q"), w.enc_q);
  fn(std::string("encoder.k"), w.enc_k);
  fn(std::string("encoder.v"), w.enc_v);
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    auto& layer = w.layers[l];
    const std::string p = "layers." + std::to_string(l) + ".";
    fn(p + "ln_self.gain", layer.ln_self.gain);
    fn(p + "ln_self.bias", layer.ln_self.bias);
    fn(p + "self.q", layer.self_q);
    fn(p + "self.k", layer.self_k);
    fn(p + "self.v", layer.self_v);
    fn(p + "self.o", layer.self_o);
    fn(p + "ln_graph.gain", layer.ln_graph.gain);
    fn(p + "ln_graph.bias", layer.ln_graph.bias);
    for (std::size_t h = 0; h < layer.graph_q.size(); ++h) {
      fn(p + "graph.q." + std::to_string(h), layer.graph_q[h]);
      fn(p + "graph.k." + std::to_string(h), layer.graph_k[h]);
    }
    fn(p + "central.w1", layer.central.w1);
    fn(p + "central.b1", layer.central.b1);
    fn(p + "central.w2", layer.central.w2);
    fn(p + "central.b2", layer.central.b2);
    fn(p + "graph.o", layer.graph_o);
    fn(p + "ln_ffn.gain", layer.ln_ffn.gain);
    fn(p + "ln_ffn.bias", layer.ln_ffn.bias);
    fn(p + "ffn.w1", layer.ffn_w1);
    fn(p + "ffn.b1", layer.ffn_b1);
    fn(p + "ffn.w2", layer.ffn_w2);
    fn(p + "ffn.b2", layer.ffn_b2);
  }
  fn(std::string("ln_final.gain"), w.ln_final.gain);
  fn(std::string("ln_final.bias"), w.ln_final.bias);
  fn(std::string("output"), w.output);
  fn(std::string("output_bias"), w.output_bias);
}

void check_units(const DecoderWeights& weights, int units, const simgraph::SimilarityGraph& graph) {
  if (graph.size != units) {
    throw InvalidArgument("graph size " + std::to_string(graph.size) +
                          " does not match unit count " + std::to_string(units));
  }
  if (weights.config.num_units != units) {
    throw InvalidArgument("weights expect " + std::to_string(weights.config.num_units) +
                          " units, input has " + std::to_string(units));
  }
}

// Model adapter recording beta per live slot and step.
class RecordingDecoder final : public beam::StepModel {
 public:
  RecordingDecoder(const DecoderContext& context, int beam_size, int max_len)
      : context_(context), states_(static_cast<std::size_t>(beam_size)) {
    const auto& cfg = context.weights->config;
    awd_ = awd::AwdTensor(static_cast<std::uint32_t>(beam_size), static_cast<std::uint32_t>(max_len),
                          static_cast<std::uint32_t>(cfg.num_layers),
                          static_cast<std::uint32_t>(cfg.num_heads),
                          static_cast<std::uint32_t>(cfg.num_units));
    const auto real = static_cast<int>(std::count(context.pad_units.begin(), context.pad_units.end(), 0));
    const float uniform = real > 0 ? 1.0f / static_cast<float>(real) : 0.0f;
    auto values = awd_.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = context.pad_units[i % context.pad_units.size()] ? 0.0f : uniform;
    }
  }

  int vocab_size() const override { return context_.weights->config.vocab_size; }

  std::vector<double> advance(int slot, int token) override {
    auto& state = states_[static_cast<std::size_t>(slot)];
    const int t = state.length();
    StepOutput out = decode_step(state, token, context_);
    for (std::size_t l = 0; l < out.attention.size(); ++l) {
      for (std::size_t h = 0; h < out.attention[l].size(); ++h) {
        auto dst = awd_.slice(static_cast<std::size_t>(slot), static_cast<std::size_t>(t), l, h);
        const auto& beta = out.attention[l][h];
        for (std::size_t p = 0; p < beta.size(); ++p) dst[p] = static_cast<float>(beta[p]);
      }
    }
    return std::move(out.logits);
  }

  void reorder(std::span<const int> parents) override {
    std::vector<DecodeState> next(states_.size());
    for (std::size_t i = 0; i < parents.size(); ++i) {
      if (parents[i] >= 0) next[i] = states_[static_cast<std::size_t>(parents[i])];
    }
    states_ = std::move(next);
  }

  awd::AwdTensor take_awd(int steps) { return awd_.truncated(static_cast<std::uint32_t>(steps)); }

 private:
  const DecoderContext& context_;
  std::vector<DecodeState> states_;
  awd::AwdTensor awd_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  for (const auto& s : special_names()) {
    index_.emplace(s, static_cast<int>(tokens_.size()));
    tokens_.push_back(s);
  }
  for (const auto& w : words) {
    if (index_.count(w) != 0) continue;
    index_.emplace(w, static_cast<int>(tokens_.size()));
    tokens_.push_back(w);
  }
}

Vocabulary Vocabulary::from_units(std::span<const textunits::UnitizedInput> inputs) {
  std::vector<std::string> words;
  for (const auto& input : inputs) {
    for (const auto& unit : input.units) {
      if (unit.pad) continue;
      words.insert(words.end(), unit.tokens.begin(), unit.tokens.end());
    }
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return Vocabulary(words);
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

bool Vocabulary::has_specials() const {
  if (tokens_.size() < static_cast<std::size_t>(kNumSpecial)) return false;
  for (int i = 0; i < kNumSpecial; ++i) {
    if (tokens_[static_cast<std::size_t>(i)] != special_names()[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Config and weights

ShiftForm parse_shift_form(std::string_view name) {
  if (name == "squared-similarity") return ShiftForm::squared_similarity;
  if (name == "squared-distance") return ShiftForm::squared_distance;
  throw InvalidArgument("unknown shift form '" + std::string(name) + "'");
}

const char* to_string(ShiftForm form) {
  return form == ShiftForm::squared_similarity ? "squared-similarity" : "squared-distance";
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidArgument("model config: " + msg); };
  if (d_model < 1) fail("d_model must be >= 1");
  if (num_heads < 1) fail("num_heads must be >= 1");
  if (d_model % num_heads != 0) fail("d_model must be divisible by num_heads");
  if (num_layers < 1) fail("num_layers must be >= 1");
  if (d_ff < 1) fail("d_ff must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail("sigma must be a positive finite real");
  if (vocab_size < kNumSpecial) fail("vocab_size must cover the special tokens");
  if (num_units < 1) fail("num_units must be >= 1");
  if (max_len < 1) fail("max_len must be >= 1");
}

DecoderWeights zero_weights(const ModelConfig& config, const Vocabulary& vocab) {
  config.validate();
  if (vocab.size() != config.vocab_size) {
    throw InvalidArgument("vocabulary size " + std::to_string(vocab.size()) +
                          " does not match config vocab_size " + std::to_string(config.vocab_size));
  }
  const auto d = static_cast<std::size_t>(config.d_model);
  const auto dh = static_cast<std::size_t>(config.d_head());
  const auto ff = static_cast<std::size_t>(config.d_ff);
  const auto v = static_cast<std::size_t>(config.vocab_size);
  auto norm = [d] { return LayerNormParams{Matrix(1, d, 1.0), Matrix(1, d, 0.0)}; };

  DecoderWeights w;
  w.config = config;
  w.vocab = vocab;
  w.token_embedding = Matrix(v, d);
  w.unit_position = Matrix(static_cast<std::size_t>(config.num_units), d);
  w.decoder_position = Matrix(static_cast<std::size_t>(config.max_len), d);
  w.enc_q = Matrix(d, d);
  w.enc_k = Matrix(d, d);
  w.enc_v = Matrix(d, d);
  w.layers.resize(static_cast<std::size_t>(config.num_layers));
  for (auto& layer : w.layers) {
    layer.ln_self = norm();
    layer.self_q = layer.self_k = layer.self_v = layer.self_o = Matrix(d, d);
    layer.ln_graph = norm();
    layer.graph_q.assign(static_cast<std::size_t>(config.num_heads), Matrix(d, dh));
    layer.graph_k.assign(static_cast<std::size_t>(config.num_heads), Matrix(d, dh));
    layer.central = CentralFfn{Matrix(d, d), Matrix(1, d), Matrix(d, 1), Matrix(1, 1)};
    layer.graph_o = Matrix(static_cast<std::size_t>(config.num_heads) * d, d);
    layer.ln_ffn = norm();
    layer.ffn_w1 = Matrix(d, ff);
    layer.ffn_b1 = Matrix(1, ff);
    layer.ffn_w2 = Matrix(ff, d);
    layer.ffn_b2 = Matrix(1, d);
  }
  w.ln_final = norm();
  w.output = Matrix(d, v);
  w.output_bias = Matrix(1, v);
  return w;
}

void DecoderWeights::for_each_param(const std::function<void(const std::string&, Matrix&)>& fn) {
  visit_params(*this, fn);
}

void DecoderWeights::for_each_param(
    const std::function<void(const std::string&, const Matrix&)>& fn) const {
  visit_params(*this, fn);
}

void DecoderWeights::validate() const {
  config.validate();
  if (vocab.size() != config.vocab_size) throw InvalidArgument("weights: vocabulary size mismatch");
  const DecoderWeights expected = zero_weights(config, vocab);
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  expected.for_each_param([&](const std::string&, const Matrix& m) { shapes.emplace_back(m.rows(), m.cols()); });
  if (layers.size() != expected.layers.size()) throw InvalidArgument("weights: layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].graph_q.size() != static_cast<std::size_t>(config.num_heads) ||
        layers[l].graph_k.size() != static_cast<std::size_t>(config.num_heads)) {
      throw InvalidArgument("weights: head count mismatch in layer " + std::to_string(l));
    }
  }
  std::size_t i = 0;
  for_each_param([&](const std::string& name, const Matrix& m) {
    if (m.rows() != shapes[i].first || m.cols() != shapes[i].second) {
      throw InvalidArgument("weights: parameter '" + name + "' has shape " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()) + ", expected " +
                            std::to_string(shapes[i].first) + "x" + std::to_string(shapes[i].second));
    }
    if (!all_finite(m.data())) throw InvalidArgument("weights: parameter '" + name + "' is not finite");
    ++i;
  });
}

// ---------------------------------------------------------------------------
// Attention primitives

double graph_shift(double g, double sigma, ShiftForm form) {
  const double num = form == ShiftForm::squared_similarity ? 1.0 - g * g : (1.0 - g) * (1.0 - g);
  return num / (2.0 * sigma * sigma);
}

Matrix encoder_attention(const Matrix& unit_inputs, const DecoderWeights& weights,
                         const simgraph::SimilarityGraph& graph,
                         std::span<const std::uint8_t> pad_units) {
  const std::size_t n = unit_inputs.rows();
  if (graph.size != static_cast<int>(n) || pad_units.size() != n) {
    throw InvalidArgument("encoder_attention: graph/input shape mismatch");
  }
  const auto& cfg = weights.config;
  const Matrix q = project_rows(unit_inputs, weights.enc_q);
  const Matrix k = project_rows(unit_inputs, weights.enc_k);
  const double scale = std::sqrt(static_cast<double>(cfg.d_model));
  Matrix alpha(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (pad_units[i]) continue;
    Vec logits(n, kNegInf);
    for (std::size_t j = 0; j < n; ++j) {
      if (pad_units[j]) continue;
      logits[j] = dot(q.row(i), k.row(j)) / scale -
                  graph_shift(graph.at(static_cast<int>(i), static_cast<int>(j)), cfg.sigma, cfg.shift);
    }
    const Vec a = softmax(logits);
    std::copy(a.begin(), a.end(), alpha.row(i).begin());
  }
  return alpha;
}

EncodedUnits encode_units(const textunits::UnitizedInput& input, const DecoderWeights& weights,
                          const simgraph::SimilarityGraph& graph) {
  check_units(weights, input.num_units, graph);
  const auto n = static_cast<std::size_t>(input.num_units);
  const auto d = static_cast<std::size_t>(weights.config.d_model);
  const auto pad = input.pad_units();

  Matrix u(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& unit = input.units[i];
    if (unit.pad) continue;
    auto row = u.row(i);
    int known = 0;
    for (const auto& tok : unit.tokens) {
      const int id = weights.vocab.id(tok);
      if (id < 0) continue;
      ++known;
      const auto emb = weights.token_embedding.row(static_cast<std::size_t>(id));
      for (std::size_t c = 0; c < d; ++c) row[c] += emb[c];
    }
    for (std::size_t c = 0; c < d; ++c) {
      if (known > 0) row[c] /= known;
      row[c] += weights.unit_position(i, c);
    }
  }

  EncodedUnits out{u};
  if (std::all_of(pad.begin(), pad.end(), [](std::uint8_t p) { return p != 0; })) return out;
  const Matrix alpha = encoder_attention(u, weights, graph, pad);
  const Matrix v = project_rows(u, weights.enc_v);
  for (std::size_t i = 0; i < n; ++i) {
    if (pad[i]) continue;
    auto row = out.x.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = alpha(i, j);
      if (a == 0.0) continue;
      for (std::size_t c = 0; c < d; ++c) row[c] += a * v(j, c);
    }
  }
  return out;
}

Vec unscaled_attention(std::span<const double> y, const Matrix& x, const Matrix& w_q,
                       const Matrix& w_k) {
  if (!all_finite(y) || !all_finite(x.data())) {
    throw InvalidArgument("unscaled_attention: non-finite input");
  }
  if (y.size() != w_q.rows() || x.cols() != w_k.rows() || w_q.cols() != w_k.cols()) {
    throw InvalidArgument("unscaled_attention: shape mismatch");
  }
  const Vec q = linear_serial(y, w_q);
  return scores_from_keys(q, project_rows(x, w_k));
}

int central_paragraph(std::span<const double> y, const CentralFfn& ffn, int num_units) {
  if (num_units < 1) throw InvalidArgument("central_paragraph: need at least one unit");
  Vec hidden = linear_serial(y, ffn.w1);
  for (std::size_t i = 0; i < hidden.size(); ++i) hidden[i] += ffn.b1.data()[i];
  hidden = relu(std::move(hidden));
  const double z = linear_serial(hidden, ffn.w2)[0] + ffn.b2(0, 0);
  if (std::isnan(z)) throw InvalidArgument("central_paragraph: NaN activation");
  const double p = 1.0 / (1.0 + std::exp(-z));
  const auto s = std::lround(p * (num_units - 1));
  return static_cast<int>(std::clamp<long>(s, 0, num_units - 1));
}

Vec graph_shifted_attention(std::span<const double> e, const simgraph::SimilarityGraph& graph,
                            int central, double sigma, std::span<const std::uint8_t> pad_units,
                            ShiftForm form) {
  if (!(sigma > 0.0)) throw InvalidArgument("graph_shifted_attention: sigma must be > 0");
  if (static_cast<int>(e.size()) != graph.size) {
    throw InvalidArgument("graph_shifted_attention: score/graph size mismatch");
  }
  if (central < 0 || central >= graph.size) {
    throw InvalidArgument("graph_shifted_attention: central index out of range");
  }
  if (!pad_units.empty() && pad_units.size() != e.size()) {
    throw InvalidArgument("graph_shifted_attention: pad mask size mismatch");
  }
  Vec logits(e.size(), kNegInf);
  bool any = false;
  const auto g = graph.row(central);
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (!pad_units.empty() && pad_units[j]) continue;
    any = true;
    logits[j] = e[j] - graph_shift(g[j], sigma, form);
  }
  if (!any) throw InvalidArgument("graph_shifted_attention: every unit is padding");
  return softmax(logits);
}

Vec global_context(std::span<const double> beta, const Matrix& x) {
  if (beta.size() != x.rows()) throw InvalidArgument("global_context: weight/unit count mismatch");
  double total = 0.0;
  for (double b : beta) total += b;
  if (std::abs(total - 1.0) > 1e-6) {
    throw InvalidArgument("global_context: weights do not sum to 1");
  }
  Vec g(x.cols(), 0.0);
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] == 0.0) continue;
    const auto row = x.row(j);
    for (std::size_t c = 0; c < g.size(); ++c) g[c] += beta[j] * row[c];
  }
  return g;
}

// ---------------------------------------------------------------------------
// Decoding

DecoderContext make_context(const textunits::UnitizedInput& input, const DecoderWeights& weights,
                            const simgraph::SimilarityGraph& graph) {
  DecoderContext ctx;
  ctx.weights = &weights;
  ctx.graph = &graph;
  ctx.encoded = encode_units(input, weights, graph);
  ctx.pad_units = input.pad_units();
  ctx.graph_keys.resize(weights.layers.size());
  for (std::size_t l = 0; l < weights.layers.size(); ++l) {
    for (const auto& wk : weights.layers[l].graph_k) {
      ctx.graph_keys[l].push_back(project_rows(ctx.encoded.x, wk));
    }
  }
  return ctx;
}

StepOutput decode_step(DecodeState& state, int input_token, const DecoderContext& context) {
  const DecoderWeights& w = *context.weights;
  const ModelConfig& cfg = w.config;
  const int t = state.length();
  if (t >= cfg.max_len) {
    throw InvalidArgument("decode_step: position " + std::to_string(t) + " exceeds max_len " +
                          std::to_string(cfg.max_len));
  }
  if (input_token < 0 || input_token >= cfg.vocab_size) {
    throw InvalidArgument("decode_step: token id out of range");
  }
  if (state.self_keys.empty()) {
    state.self_keys.resize(static_cast<std::size_t>(cfg.num_layers));
    state.self_values.resize(static_cast<std::size_t>(cfg.num_layers));
  }
  const auto d = static_cast<std::size_t>(cfg.d_model);
  const double self_scale = std::sqrt(static_cast<double>(d));

  Vec h(d);
  const auto emb = w.token_embedding.row(static_cast<std::size_t>(input_token));
  const auto pos = w.decoder_position.row(static_cast<std::size_t>(t));
  for (std::size_t c = 0; c < d; ++c) h[c] = emb[c] + pos[c];

  StepOutput out;
  out.attention.resize(static_cast<std::size_t>(cfg.num_layers));
  out.central.resize(static_cast<std::size_t>(cfg.num_layers));
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    const auto& layer = w.layers[l];

    // Causal single-head self-attention over the generated prefix.
    const Vec a = ln(h, layer.ln_self);
    const Vec q = linear(a, layer.self_q);
    state.self_keys[l].push_back(linear(a, layer.self_k));
    state.self_values[l].push_back(linear(a, layer.self_v));
    const auto& keys = state.self_keys[l];
    Vec scores(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) scores[i] = dot(q, keys[i]) / self_scale;
    const Vec weights = softmax(scores);
    Vec mixed(d, 0.0);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const auto& v = state.self_values[l][i];
      for (std::size_t c = 0; c < d; ++c) mixed[c] += weights[i] * v[c];
    }
    add_into(h, linear(mixed, layer.self_o));

    // Global graph attention over the encoded units.
    const Vec y = ln(h, layer.ln_graph);
    const int central = central_paragraph(y, layer.central, cfg.num_units);
    out.central[l] = central;
    Vec heads_concat;
    heads_concat.reserve(static_cast<std::size_t>(cfg.num_heads) * d);
    for (std::size_t head = 0; head < layer.graph_q.size(); ++head) {
      const Vec qh = linear(y, layer.graph_q[head]);
      const Vec e = scores_from_keys(qh, context.graph_keys[l][head]);
      Vec beta = graph_shifted_attention(e, *context.graph, central, cfg.sigma, context.pad_units,
                                         cfg.shift);
      const Vec g = global_context(beta, context.encoded.x);
      heads_concat.insert(heads_concat.end(), g.begin(), g.end());
      out.attention[l].push_back(std::move(beta));
    }
    add_into(h, linear(heads_concat, layer.graph_o));

    // Position-wise feed-forward.
    const Vec f = ln(h, layer.ln_ffn);
    Vec hidden = linear(f, layer.ffn_w1);
    for (std::size_t i = 0; i < hidden.size(); ++i) hidden[i] += layer.ffn_b1.data()[i];
    hidden = relu(std::move(hidden));
    Vec ffn_out = linear(hidden, layer.ffn_w2);
    for (std::size_t c = 0; c < d; ++c) h[c] += ffn_out[c] + layer.ffn_b2.data()[c];
  }

  out.logits = linear(ln(h, w.ln_final), w.output);
  for (std::size_t v = 0; v < out.logits.size(); ++v) out.logits[v] += w.output_bias.data()[v];
  if (!all_finite(out.logits)) throw Error("decode_step: non-finite logits");
  return out;
}

GenerationResult generate_with_beam(const textunits::UnitizedInput& input,
                                    const DecoderWeights& weights,
                                    const simgraph::SimilarityGraph& graph,
                                    const GenerationConfig& config) {
  if (config.beam_size < 1) throw InvalidArgument("generate: beam size must be >= 1");
  if (config.max_len < 1 || config.max_len > weights.config.max_len) {
    throw InvalidArgument("generate: max_len must lie in [1, " +
                          std::to_string(weights.config.max_len) + "]");
  }
  if (!weights.vocab.has_specials()) {
    throw InvalidArgument("generate: vocabulary lacks the end-of-sentence/end-of-sequence ids");
  }
  if (input.real_units() == 0) throw InvalidArgument("generate: input has no real units");
  const DecoderContext context = make_context(input, weights, graph);
  RecordingDecoder model(context, config.beam_size, config.max_len);

  beam::BeamConfig bc;
  bc.beam_size = config.beam_size;
  bc.max_len = config.max_len;
  bc.length_penalty = config.length_penalty;
  bc.bos_id = kBosId;
  bc.eos_id = kEosId;
  bc.banned_ids = {kPadId, kBosId};
  bc.min_len = config.min_len;
  beam::BeamResult best = beam::beam_search(model, bc);

  GenerationResult out;
  out.tokens = std::move(best.tokens);
  out.beam_trace = std::move(best.trace);
  out.winning_beam = best.winning_beam;
  out.score = best.score;
  out.awd = model.take_awd(best.steps);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic weights

DecoderWeights make_synthetic_weights(std::uint64_t seed, const ModelConfig& config,
                                      const Vocabulary& vocab) {
  DecoderWeights w = zero_weights(config, vocab);
  SplitMix rng(seed);
  w.for_each_param([&](const std::string& name, Matrix& m) {
    if (ends_with(name, "gain")) {
      std::fill(m.data().begin(), m.data().end(), 1.0);
    } else if (ends_with(name, "bias") || ends_with(name, "b1") || ends_with(name, "b2")) {
      // zero
    } else if (ends_with(name, "position")) {
      fill_sinusoid(m, 0, m.cols());
    } else {
      const double a = name == "token_embedding" ? 1.0 : std::sqrt(3.0 / static_cast<double>(m.rows()));
      for (double& v : m.data()) v = rng.uniform(a);
    }
  });
  return w;
}

DecoderWeights make_concentrator_weights(std::uint64_t seed, const ModelConfig& config,
                                         const Vocabulary& vocab,
                                         const ConcentratorOptions& options) {
  if (config.d_model < 8 || config.d_model % 2 != 0) {
    throw InvalidArgument("concentrator: d_model must be even and >= 8");
  }
  if (options.target < 0 || options.target >= config.num_units) {
    throw InvalidArgument("concentrator: target unit out of range");
  }
  if (!(options.margin > 0.0)) throw InvalidArgument("concentrator: margin must be > 0");
  if (options.sentence_length < 2) throw InvalidArgument("concentrator: sentence length must be >= 2");
  if (!vocab.has_specials()) throw InvalidArgument("concentrator: vocabulary lacks special ids");

  DecoderWeights w = make_synthetic_weights(seed, config, vocab);
  const auto d = static_cast<std::size_t>(config.d_model);
  const std::size_t half = d / 2;
  const std::size_t constant = half - 1;  // content channels are [0, constant)
  const auto dh = static_cast<std::size_t>(config.d_head());
  const auto heads = static_cast<std::size_t>(config.num_heads);

  // Token content in [0, constant); zero elsewhere, scaled to unit expected norm.
  SplitMix rng(seed ^ 0xC0FFEEULL);
  const double a = std::sqrt(3.0 / static_cast<double>(constant));
  w.token_embedding = Matrix(w.token_embedding.rows(), d);
  for (std::size_t v = 0; v < w.token_embedding.rows(); ++v) {
    for (std::size_t c = 0; c < constant; ++c) w.token_embedding(v, c) = rng.uniform(a);
  }

  w.unit_position = Matrix(w.unit_position.rows(), d);
  fill_sinusoid(w.unit_position, half, d - half);

  // Keys read the positional half against the target's own encoding.
  const auto target_pos = w.unit_position.row(static_cast<std::size_t>(options.target));
  const double self = dot(target_pos, target_pos);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < w.unit_position.rows(); ++j) {
    if (j == static_cast<std::size_t>(options.target)) continue;
    gap = std::min(gap, self - dot(w.unit_position.row(j), target_pos));
  }
  if (!(gap > 1e-9)) {
    if (std::isinf(gap)) gap = 1.0;  // single unit, nothing to separate
    else throw InvalidArgument("concentrator: positional encodings do not separate the target");
  }
  const double query_scale = options.margin * std::sqrt(static_cast<double>(dh)) / gap;

  constexpr double kCopyGain = 4.0;
  const double copy_total = kCopyGain * config.num_layers;
  for (auto& layer : w.layers) {
    layer.self_o = Matrix(d, d);
    layer.ln_graph.gain(0, constant) = 0.0;
    layer.ln_graph.bias(0, constant) = 1.0;
    for (std::size_t h = 0; h < heads; ++h) {
      layer.graph_q[h] = Matrix(d, dh);
      layer.graph_q[h](constant, 0) = query_scale;
      layer.graph_k[h] = Matrix(d, dh);
      for (std::size_t c = half; c < d; ++c) layer.graph_k[h](c, 0) = target_pos[c];
    }
    layer.central = CentralFfn{Matrix(d, d), Matrix(1, d), Matrix(d, 1), Matrix(1, 1)};
    layer.graph_o = Matrix(heads * d, d);
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t c = 0; c < constant; ++c) {
        layer.graph_o(h * d + c, c) = kCopyGain / static_cast<double>(heads);
      }
    }
    layer.ffn_w2 = Matrix(layer.ffn_w2.rows(), d);
    layer.ffn_b2 = Matrix(1, d);
  }
  w.enc_v = Matrix(d, d);

  // Periodic sentence ends via the decoder position table.
  w.decoder_position = Matrix(w.decoder_position.rows(), d);
  const auto eos_sent = w.token_embedding.row(kEosSentenceId);
  for (std::size_t t = 0; t < w.decoder_position.rows(); ++t) {
    if ((t + 1) % static_cast<std::size_t>(options.sentence_length) != 0) continue;
    for (std::size_t c = 0; c < constant; ++c) w.decoder_position(t, c) = 3.0 * copy_total * eos_sent[c];
  }

  // Tied read-out.
  w.ln_final = LayerNormParams{Matrix(1, d, 1.0), Matrix(1, d, 0.0)};
  w.output = Matrix(d, w.token_embedding.rows());
  for (std::size_t v = 0; v < w.token_embedding.rows(); ++v) {
    for (std::size_t c = 0; c < d; ++c) w.output(c, v) = w.token_embedding(v, c);
  }
  w.output_bias = Matrix(1, w.token_embedding.rows());
  w.output_bias(0, kEosId) = -30.0;
  return w;
}

}  // namespace attnorigin::graphattn
