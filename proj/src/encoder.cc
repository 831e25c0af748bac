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

#include "tasr/encoder.h"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace tasr {

namespace {

// x += FF(LN(x)), one row.
void feed_forward_residual(const NormParams& norm, const FeedForwardParams& ff,
                           std::span<float> x) {
  std::vector<float> h(x.size());
  layer_norm_row(x, norm.gain, norm.bias, kLayerNormEps, h);
  std::vector<float> inner(ff.w1.cols());
  matvec_row(h, ff.w1, ff.b1, inner);
  relu_inplace(inner);
  std::vector<float> outer(ff.w2.cols());
  matvec_row(inner, ff.w2, ff.b2, outer);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] += outer[j];
}

void check_norm(const NormParams& n, std::size_t d, const std::string& what) {
  if (n.gain.size() != d || n.bias.size() != d) {
    throw std::invalid_argument(what + ": norm gain/bias must have d_model entries");
  }
}

}  // namespace

LookAhead LookAhead::parse(const std::string& text) {
  if (text == "inf" || text == "infinity") return unbounded();
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("look-ahead must be a non-negative integer or 'inf': " + text);
  }
  return LookAhead(value);
}

std::string LookAhead::to_string() const {
  return bounded_ ? std::to_string(frames_) : std::string("inf");
}

void EncoderParams::validate() const {
  if (layers.empty()) throw std::invalid_argument("encoder: at least one layer required");
  if (conv1.in_channels != 1 || conv2.in_channels != conv1.out_channels) {
    throw std::invalid_argument("encoder: conv channel counts do not chain");
  }
  const std::size_t flat = conv2.out_channels * enc_cnn_output_freq(feat_dim);
  if (proj_w.rows() != flat || proj_w.cols() != d_model || proj_b.size() != d_model) {
    throw std::invalid_argument("encoder: projection must be " + std::to_string(flat) + " x " +
                                std::to_string(d_model));
  }
  for (std::size_t e = 0; e < layers.size(); ++e) {
    const auto& l = layers[e];
    const std::string name = "encoder layer " + std::to_string(e);
    l.mha.validate();
    if (l.mha.d_model() != d_model) throw std::invalid_argument(name + ": d_model mismatch");
    check_norm(l.norm_mha, d_model, name);
    check_norm(l.norm_ff, d_model, name);
  }
  check_norm(final_norm, d_model, "encoder final");
}

std::size_t enc_cnn_output_length(std::size_t t) {
  return conv_output_length(conv_output_length(t, kCnnStride, kCnnPad), kCnnStride, kCnnPad);
}

std::size_t enc_cnn_output_freq(std::size_t feat_dim) { return enc_cnn_output_length(feat_dim); }

Matrix enc_cnn(const FeatureMatrix& x, const EncoderParams& params) {
  const Matrix& f = x.frames;
  if (f.rows() == 0) throw std::invalid_argument("input too short");
  if (f.cols() != params.feat_dim) {
    throw std::invalid_argument("enc_cnn: feature dim " + std::to_string(f.cols()) +
                                " != model feature dim " + std::to_string(params.feat_dim));
  }
  Volume in(1, f.rows(), f.cols());
  in.data = f.data();
  Volume h1 = conv2d(in, params.conv1, kCnnStride, kCnnPad);
  relu_inplace(h1.data);
  Volume h2 = conv2d(h1, params.conv2, kCnnStride, kCnnPad);
  relu_inplace(h2.data);
  Matrix flat(h2.time, h2.channels * h2.freq);
  for (std::size_t t = 0; t < h2.time; ++t) {
    for (std::size_t c = 0; c < h2.channels; ++c) {
      for (std::size_t q = 0; q < h2.freq; ++q) flat(t, c * h2.freq + q) = h2.at(c, t, q);
    }
  }
  return affine(flat, params.proj_w, params.proj_b);
}

std::vector<float> positional_encoding(std::size_t pos, std::size_t d_model) {
  std::vector<float> pe(d_model);
  for (std::size_t i = 0; 2 * i < d_model; ++i) {
    const double angle = static_cast<double>(pos) /
                         std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(d_model));
    pe[2 * i] = static_cast<float>(std::sin(angle));
    if (2 * i + 1 < d_model) pe[2 * i + 1] = static_cast<float>(std::cos(angle));
  }
  return pe;
}

void add_positional_encoding(Matrix& m, std::size_t first_pos) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto pe = positional_encoding(first_pos + r, m.cols());
    auto row = m.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += pe[j];
  }
}

EncoderStates encoder_forward(const Matrix& x0, const EncoderParams& params,
                              LookAhead look_ahead) {
  if (x0.cols() != params.d_model) {
    throw std::invalid_argument("encoder_forward: input width " + std::to_string(x0.cols()) +
                                " != d_model " + std::to_string(params.d_model));
  }
  const std::size_t n = x0.rows();
  const AttentionMask mask = look_ahead.bounded() ? AttentionMask::look_ahead(n, look_ahead.frames())
                                                  : AttentionMask::full(n, n);
  Matrix x = x0;
  for (const auto& layer : params.layers) {
    const Matrix h = layer_norm(x, layer.norm_mha.gain, layer.norm_mha.bias, kLayerNormEps);
    const Matrix att = multi_head_attention(h, h, h, layer.mha, mask);
    for (std::size_t k = 0; k < x.data().size(); ++k) x.data()[k] += att.data()[k];
    for (std::size_t r = 0; r < n; ++r) feed_forward_residual(layer.norm_ff, layer.ff, x.row(r));
  }
  EncoderStates out;
  out.states = layer_norm(x, params.final_norm.gain, params.final_norm.bias, kLayerNormEps);
  return out;
}

EncoderStates encode(const FeatureMatrix& x, const EncoderParams& params, LookAhead look_ahead) {
  Matrix x0 = enc_cnn(x, params);
  add_positional_encoding(x0);
  EncoderStates out = encoder_forward(x0, params, look_ahead);
  out.frame_duration_ms = 4.0 * x.frame_shift_ms;
  return out;
}

// ---------------------------------------------------------------------------
// IncrementalEncoder

IncrementalEncoder::IncrementalEncoder(const EncoderParams& params, LookAhead look_ahead)
    : params_(params), look_ahead_(look_ahead) {
  params_.validate();
  freq1_ = conv_output_length(params_.feat_dim, kCnnStride, kCnnPad);
  freq2_ = conv_output_length(freq1_, kCnnStride, kCnnPad);
  feats_ = Matrix(0, params_.feat_dim);
  conv1_ = Matrix(0, params_.conv1.out_channels * freq1_);
  const std::size_t layers = params_.e_layers();
  inputs_.assign(layers, Matrix(0, params_.d_model));
  keys_.assign(layers, Matrix(0, params_.d_model));
  values_.assign(layers, Matrix(0, params_.d_model));
  out_ = Matrix(0, params_.d_model);
}

void IncrementalEncoder::push(const Matrix& frames) {
  if (finished_) throw std::logic_error("encoder input already finished");
  if (frames.rows() == 0) return;
  if (frames.cols() != params_.feat_dim) {
    throw std::invalid_argument("feature dim " + std::to_string(frames.cols()) +
                                " != model feature dim " + std::to_string(params_.feat_dim));
  }
  for (std::size_t r = 0; r < frames.rows(); ++r) feats_.append_row(frames.row(r));
  advance();
}

void IncrementalEncoder::finish() {
  if (finished_) return;
  finished_ = true;
  if (feats_.rows() > 0) advance();
}

void IncrementalEncoder::compute_conv1_row(std::size_t t) {
  auto at = [this](std::size_t, long tt, long f) -> float {
    if (tt < 0 || f < 0 || tt >= static_cast<long>(feats_.rows()) ||
        f >= static_cast<long>(feats_.cols())) {
      return 0.0f;
    }
    return feats_(static_cast<std::size_t>(tt), static_cast<std::size_t>(f));
  };
  std::vector<float> row(conv1_.cols());
  conv2d_time_row(at, params_.feat_dim, params_.conv1, kCnnStride, kCnnPad, t, row);
  relu_inplace(row);
  conv1_.append_row(row);
}

void IncrementalEncoder::compute_conv2_row(std::size_t t) {
  auto at = [this](std::size_t c, long tt, long f) -> float {
    if (tt < 0 || f < 0 || tt >= static_cast<long>(conv1_.rows()) ||
        f >= static_cast<long>(freq1_)) {
      return 0.0f;
    }
    return conv1_(static_cast<std::size_t>(tt), c * freq1_ + static_cast<std::size_t>(f));
  };
  std::vector<float> row(params_.conv2.out_channels * freq2_);
  conv2d_time_row(at, freq1_, params_.conv2, kCnnStride, kCnnPad, t, row);
  relu_inplace(row);
  std::vector<float> x0(params_.d_model);
  matvec_row(row, params_.proj_w, params_.proj_b, x0);
  const auto pe = positional_encoding(t, params_.d_model);
  for (std::size_t j = 0; j < x0.size(); ++j) x0[j] += pe[j];
  ++x0_rows_;
  absorb_layer_input(0, x0);
}

void IncrementalEncoder::absorb_layer_input(std::size_t layer, std::span<const float> row) {
  const auto& p = params_.layers[layer];
  inputs_[layer].append_row(row);
  std::vector<float> h(row.size());
  layer_norm_row(row, p.norm_mha.gain, p.norm_mha.bias, kLayerNormEps, h);
  std::vector<float> k(params_.d_model);
  std::vector<float> v(params_.d_model);
  matvec_row(h, p.mha.w_k, {}, k);
  matvec_row(h, p.mha.w_v, {}, v);
  keys_[layer].append_row(k);
  values_[layer].append_row(v);
}

void IncrementalEncoder::compute_layer_row(std::size_t layer, std::size_t i) {
  const auto& p = params_.layers[layer];
  const Matrix& in = inputs_[layer];
  std::vector<float> x(in.row(i).begin(), in.row(i).end());
  std::vector<float> h(x.size());
  layer_norm_row(x, p.norm_mha.gain, p.norm_mha.bias, kLayerNormEps, h);
  std::vector<float> q(params_.d_model);
  matvec_row(h, p.mha.w_q, {}, q);
  const std::size_t keys =
      look_ahead_.bounded() ? std::min(in.rows(), i + look_ahead_.frames() + 1) : in.rows();
  std::vector<float> att(params_.d_model);
  mha_row(q, keys_[layer], values_[layer], keys, {}, p.mha, att);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] += att[j];
  feed_forward_residual(p.norm_ff, p.ff, x);
  if (layer + 1 < params_.e_layers()) {
    absorb_layer_input(layer + 1, x);
    return;
  }
  std::vector<float> y(x.size());
  layer_norm_row(x, params_.final_norm.gain, params_.final_norm.bias, kLayerNormEps, y);
  out_.append_row(y);
}

void IncrementalEncoder::advance() {
  // conv1 row t reads input rows 2t-1..2t+1; beyond the end only after finish().
  const std::size_t t_in = feats_.rows();
  const std::size_t conv1_total = finished_ ? conv_output_length(t_in, kCnnStride, kCnnPad) : 0;
  while (true) {
    const std::size_t t = conv1_.rows();
    if (finished_ ? t < conv1_total : 2 * t + 1 < t_in) {
      compute_conv1_row(t);
    } else {
      break;
    }
  }
  const std::size_t conv2_total =
      finished_ ? conv_output_length(conv1_.rows(), kCnnStride, kCnnPad) : 0;
  while (true) {
    const std::size_t t = x0_rows_;
    if (finished_ ? t < conv2_total : 2 * t + 1 < conv1_.rows()) {
      compute_conv2_row(t);
    } else {
      break;
    }
  }
  // Layer e row i needs rows up to i + look_ahead of layer e's input, or the
  // complete input once the utterance has ended.
  for (std::size_t e = 0; e < params_.e_layers(); ++e) {
    const Matrix& in = inputs_[e];
    const bool input_complete = finished_ && in.rows() == x0_rows_;
    const std::size_t done = e + 1 < params_.e_layers() ? inputs_[e + 1].rows() : out_.rows();
    for (std::size_t i = done; i < in.rows(); ++i) {
      const bool ready = input_complete ||
                         (look_ahead_.bounded() && i + look_ahead_.frames() < in.rows());
      if (!ready) break;
      compute_layer_row(e, i);
    }
  }
}

}  // namespace tasr
