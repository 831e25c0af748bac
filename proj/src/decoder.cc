// Copyright 2026 The tasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tasr/decoder.h"

#include <stdexcept>
#include <string>

namespace tasr {

namespace {

void add_into(std::span<float> x, std::span<const float> y) {
  for (std::size_t j = 0; j < x.size(); ++j) x[j] += y[j];
}

void feed_forward_residual(const NormParams& norm, const FeedForwardParams& ff,
                           std::span<float> x) {
  std::vector<float> h(x.size());
  layer_norm_row(x, norm.gain, norm.bias, kLayerNormEps, h);
  std::vector<float> inner(ff.w1.cols());
  matvec_row(h, ff.w1, ff.b1, inner);
  relu_inplace(inner);
  std::vector<float> outer(ff.w2.cols());
  matvec_row(inner, ff.w2, ff.b2, outer);
  add_into(x, outer);
}

std::vector<double> output_log_posterior(const DecoderParams& p, std::span<const float> z) {
  std::vector<float> y(z.size());
  layer_norm_row(z, p.final_norm.gain, p.final_norm.bias, kLayerNormEps, y);
  std::vector<float> logits(p.vocab_size);
  matvec_row(y, p.out_w, p.out_b, logits);
  return log_softmax(logits);
}

void check_token(const DecoderParams& p, int token) {
  if (token < 0 || static_cast<std::size_t>(token) >= p.vocab_size) {
    throw std::invalid_argument("label " + std::to_string(token) + " outside vocabulary of size " +
                                std::to_string(p.vocab_size));
  }
}

void check_nu(std::size_t nu, std::size_t frames) {
  if (nu < 1 || nu > frames) {
    throw std::out_of_range("trigger index out of range: " + std::to_string(nu) + " not in [1, " +
                            std::to_string(frames) + "]");
  }
}

}  // namespace

void DecoderParams::validate() const {
  if (layers.empty()) throw std::invalid_argument("decoder: at least one layer required");
  if (embed.rows() != vocab_size || embed.cols() != d_model) {
    throw std::invalid_argument("decoder: embedding must be vocab_size x d_model");
  }
  if (out_w.rows() != d_model || out_w.cols() != vocab_size || out_b.size() != vocab_size) {
    throw std::invalid_argument("decoder: output projection must be d_model x vocab_size");
  }
  if (sos_id < 0 || static_cast<std::size_t>(sos_id) >= vocab_size) {
    throw std::invalid_argument("decoder: <sos> id outside vocabulary");
  }
  if (eos_id >= 0 && static_cast<std::size_t>(eos_id) >= vocab_size) {
    throw std::invalid_argument("decoder: <eos> id outside vocabulary");
  }
  for (const auto& l : layers) {
    l.self_mha.validate();
    l.src_mha.validate();
    if (l.self_mha.d_model() != d_model || l.src_mha.d_model() != d_model) {
      throw std::invalid_argument("decoder: attention d_model mismatch");
    }
  }
}

// ---------------------------------------------------------------------------
// TriggeredDecoder

TriggeredDecoder::TriggeredDecoder(const DecoderParams& params) : params_(params) {
  params_.validate();
  src_keys_.assign(params_.d_layers(), Matrix(0, params_.d_model));
  src_values_.assign(params_.d_layers(), Matrix(0, params_.d_model));
}

void TriggeredDecoder::project_source(const Matrix& enc, std::size_t rows) {
  if (enc.cols() != params_.d_model) {
    throw std::invalid_argument("decoder: encoder width " + std::to_string(enc.cols()) +
                                " != d_model " + std::to_string(params_.d_model));
  }
  std::vector<float> k(params_.d_model);
  std::vector<float> v(params_.d_model);
  for (std::size_t d = 0; d < params_.d_layers(); ++d) {
    const auto& mha = params_.layers[d].src_mha;
    for (std::size_t r = src_keys_[d].rows(); r < rows; ++r) {
      matvec_row(enc.row(r), mha.w_k, {}, k);
      matvec_row(enc.row(r), mha.w_v, {}, v);
      src_keys_[d].append_row(k);
      src_values_[d].append_row(v);
    }
  }
}

void TriggeredDecoder::extend(State& state, int token, std::size_t nu) const {
  check_token(params_, token);
  const std::size_t d_model = params_.d_model;
  const std::size_t pos = state.keys.empty() ? 0 : state.keys[0].rows();
  if (state.keys.empty()) {
    state.keys.assign(params_.d_layers(), Matrix(0, d_model));
    state.values.assign(params_.d_layers(), Matrix(0, d_model));
  }
  std::vector<float> z(params_.embed.row(token).begin(), params_.embed.row(token).end());
  add_into(z, positional_encoding(pos, d_model));

  std::vector<float> h(d_model), q(d_model), k(d_model), v(d_model), att(d_model);
  for (std::size_t d = 0; d < params_.d_layers(); ++d) {
    const auto& layer = params_.layers[d];
    layer_norm_row(z, layer.norm_self.gain, layer.norm_self.bias, kLayerNormEps, h);
    matvec_row(h, layer.self_mha.w_q, {}, q);
    matvec_row(h, layer.self_mha.w_k, {}, k);
    matvec_row(h, layer.self_mha.w_v, {}, v);
    state.keys[d].append_row(k);
    state.values[d].append_row(v);
    mha_row(q, state.keys[d], state.values[d], pos + 1, {}, layer.self_mha, att);
    add_into(z, att);

    layer_norm_row(z, layer.norm_src.gain, layer.norm_src.bias, kLayerNormEps, h);
    matvec_row(h, layer.src_mha.w_q, {}, q);
    mha_row(q, src_keys_[d], src_values_[d], nu, {}, layer.src_mha, att);
    add_into(z, att);

    feed_forward_residual(layer.norm_ff, layer.ff, z);
  }
  state.log_posterior = output_log_posterior(params_, z);
}

const TriggeredDecoder::State& TriggeredDecoder::state_for(const Matrix& enc, std::size_t nu,
                                                           const Labels& labels) {
  auto key = std::make_pair(nu, labels);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  State state;
  if (!labels.empty()) {
    const Labels parent(labels.begin(), labels.end() - 1);
    state = state_for(enc, nu, parent);
    extend(state, labels.back(), nu);
  } else {
    extend(state, params_.sos_id, nu);
  }
  return cache_.emplace(std::move(key), std::move(state)).first->second;
}

const std::vector<double>& TriggeredDecoder::next_log_posterior(const Matrix& enc,
                                                                std::size_t nu,
                                                                const Labels& labels) {
  check_nu(nu, enc.rows());
  project_source(enc, nu);
  return state_for(enc, nu, labels).log_posterior;
}

void TriggeredDecoder::drop_below(std::size_t nu) {
  for (auto it = cache_.begin(); it != cache_.end();) {
    it = it->first.first < nu ? cache_.erase(it) : std::next(it);
  }
}

// ---------------------------------------------------------------------------
// Free functions

std::vector<double> decoder_log_posterior(const EncoderStates& enc, std::size_t nu,
                                          std::span<const int> labels,
                                          const DecoderParams& params) {
  TriggeredDecoder dec(params);
  return dec.next_log_posterior(enc.states, nu, Labels(labels.begin(), labels.end()));
}

std::vector<double> decoder_posterior(const EncoderStates& enc, std::size_t nu,
                                      std::span<const int> labels, const DecoderParams& params) {
  auto p = decoder_log_posterior(enc, nu, labels, params);
  for (double& v : p) v = std::exp(v);
  return p;
}

double ta_prefix_score(const EncoderStates& enc, std::span<const int> labels,
                       std::span<const std::size_t> nu_per_label, const DecoderParams& params) {
  if (labels.size() != nu_per_label.size()) {
    throw std::invalid_argument("ta_prefix_score: " + std::to_string(labels.size()) +
                                " labels but " + std::to_string(nu_per_label.size()) +
                                " trigger frames");
  }
  TriggeredDecoder dec(params);
  double score = 0.0;
  Labels history;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const std::size_t nu = std::min(nu_per_label[l], enc.frames());
    check_token(params, labels[l]);
    score += dec.next_log_posterior(enc.states, nu, history)[labels[l]];
    history.push_back(labels[l]);
  }
  return score;
}

double full_sequence_score(const EncoderStates& enc, std::span<const int> labels,
                           const DecoderParams& params) {
  params.validate();
  const std::size_t n_pos = labels.size() + 1;
  const std::size_t frames = enc.frames();
  if (frames == 0) throw std::invalid_argument("full_sequence_score: empty encoder output");
  Matrix z(n_pos, params.d_model);
  for (std::size_t i = 0; i < n_pos; ++i) {
    const int token = i == 0 ? params.sos_id : labels[i - 1];
    check_token(params, token);
    std::copy(params.embed.row(token).begin(), params.embed.row(token).end(), z.row(i).begin());
  }
  add_positional_encoding(z);
  const AttentionMask causal = AttentionMask::causal(n_pos);
  const AttentionMask source = AttentionMask::full(n_pos, frames);
  for (const auto& layer : params.layers) {
    Matrix h = layer_norm(z, layer.norm_self.gain, layer.norm_self.bias, kLayerNormEps);
    Matrix att = multi_head_attention(h, h, h, layer.self_mha, causal);
    for (std::size_t i = 0; i < n_pos; ++i) add_into(z.row(i), att.row(i));
    h = layer_norm(z, layer.norm_src.gain, layer.norm_src.bias, kLayerNormEps);
    att = multi_head_attention(h, enc.states, enc.states, layer.src_mha, source);
    for (std::size_t i = 0; i < n_pos; ++i) add_into(z.row(i), att.row(i));
    for (std::size_t i = 0; i < n_pos; ++i) feed_forward_residual(layer.norm_ff, layer.ff, z.row(i));
  }
  double score = 0.0;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    score += output_log_posterior(params, z.row(l))[labels[l]];
  }
  return score;
}

}  // namespace tasr
