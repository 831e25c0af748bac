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

// Convolutional front-end plus a stack of time-restricted self-attention
// layers. Each layer lets frame i attend to every past frame and to at most
// `look_ahead` future frames, so the stack as a whole looks E * look_ahead
// frames into the future.

#ifndef TASR_ENCODER_H_
#define TASR_ENCODER_H_

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "tasr/attention.h"
#include "tasr/numcore.h"

namespace tasr {

/// Number of future frames a component may consume; may be unbounded.
class LookAhead {
 public:
  constexpr LookAhead() = default;
  constexpr explicit LookAhead(std::size_t frames) : frames_(frames), bounded_(true) {}
  static constexpr LookAhead unbounded() { return LookAhead(); }

  constexpr bool bounded() const { return bounded_; }
  /// Frame count; only meaningful when bounded().
  constexpr std::size_t frames() const { return frames_; }

  /// Parses a non-negative integer or "inf".
  static LookAhead parse(const std::string& text);
  std::string to_string() const;

  friend constexpr bool operator==(LookAhead, LookAhead) = default;

 private:
  std::size_t frames_ = 0;
  bool bounded_ = false;
};

struct NormParams {
  std::vector<float> gain;
  std::vector<float> bias;
};

struct FeedForwardParams {
  Matrix w1;  // d_model x d_ff
  std::vector<float> b1;
  Matrix w2;  // d_ff x d_model
  std::vector<float> b2;
};

struct EncoderLayerParams {
  NormParams norm_mha;
  MhaParams mha;
  NormParams norm_ff;
  FeedForwardParams ff;
};

struct EncoderParams {
  std::size_t feat_dim = 83;
  std::size_t d_model = 256;
  std::size_t d_ff = 2048;
  std::size_t heads = 4;
  ConvKernel conv1;  // 1 -> c1 channels
  ConvKernel conv2;  // c1 -> c2 channels
  Matrix proj_w;     // (c2 * freq after two convs) x d_model
  std::vector<float> proj_b;
  std::vector<EncoderLayerParams> layers;
  NormParams final_norm;
  float dropout = 0.1f;  // training only; inference ignores it

  std::size_t e_layers() const { return layers.size(); }
  void validate() const;
};

/// T x d_feat acoustic features.
struct FeatureMatrix {
  Matrix frames;
  double frame_shift_ms = 10.0;
};

/// N x d_model encoder output at a quarter of the feature frame rate.
struct EncoderStates {
  Matrix states;
  double frame_duration_ms = 40.0;

  std::size_t frames() const { return states.rows(); }
};

inline constexpr std::size_t kCnnStride = 2;
inline constexpr std::size_t kCnnPad = 1;
inline constexpr float kLayerNormEps = 1e-12f;

/// Rows produced by the CNN front-end for `t` input frames.
std::size_t enc_cnn_output_length(std::size_t t);
/// Frequency bins left after both convolutions.
std::size_t enc_cnn_output_freq(std::size_t feat_dim);

/// Two stride-2 3x3 convolutions with ReLU, flattened and projected to
/// d_model. Positional encoding is not added.
Matrix enc_cnn(const FeatureMatrix& x, const EncoderParams& params);

std::vector<float> positional_encoding(std::size_t pos, std::size_t d_model);
/// Adds encodings for positions first_pos, first_pos + 1, ... to the rows.
void add_positional_encoding(Matrix& m, std::size_t first_pos = 0);

/// Runs the self-attention stack over x0 (CNN output + positional encoding).
EncoderStates encoder_forward(const Matrix& x0, const EncoderParams& params, LookAhead look_ahead);

/// enc_cnn + positional encoding + encoder_forward.
EncoderStates encode(const FeatureMatrix& x, const EncoderParams& params, LookAhead look_ahead);

/// Streaming encoder. Feature frames are pushed as they arrive; each output
/// row is computed once, as soon as all inputs inside its look-ahead window
/// exist. Past keys and values are cached per layer. Results are
/// bit-identical to encode() on the complete utterance.
class IncrementalEncoder {
 public:
  IncrementalEncoder(const EncoderParams& params, LookAhead look_ahead);

  void push(const Matrix& frames);
  /// Marks end of input and flushes rows that needed end padding.
  void finish();

  bool finished() const { return finished_; }
  std::size_t input_frames() const { return feats_.rows(); }
  std::size_t cnn_rows() const { return x0_rows_; }
  /// Encoder output rows emitted so far.
  const Matrix& states() const { return out_; }

 private:
  void advance();
  void compute_conv1_row(std::size_t t);
  void compute_conv2_row(std::size_t t);
  void absorb_layer_input(std::size_t layer, std::span<const float> row);
  void compute_layer_row(std::size_t layer, std::size_t i);

  const EncoderParams& params_;
  LookAhead look_ahead_;
  bool finished_ = false;
  std::size_t freq1_ = 0;
  std::size_t freq2_ = 0;

  Matrix feats_;
  Matrix conv1_;  // time-major, each row [channel][freq] after ReLU
  std::size_t x0_rows_ = 0;
  // inputs_[e] holds the input rows of layer e; keys_/values_ their
  // projections after the pre-attention norm.
  std::vector<Matrix> inputs_;
  std::vector<Matrix> keys_;
  std::vector<Matrix> values_;
  Matrix out_;
};

}  // namespace tasr

#endif  // TASR_ENCODER_H_
