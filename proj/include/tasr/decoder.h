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

// Triggered-attention transformer decoder.
//
// The posterior of label l is computed by running the decoder over
// (<sos>, y_1, ..., y_{l-1}) with every position attending only to the first
// nu_l encoder frames. Label sequences passed to this module never contain
// <sos>; it is prepended internally.

#ifndef TASR_DECODER_H_
#define TASR_DECODER_H_

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "tasr/attention.h"
#include "tasr/encoder.h"
#include "tasr/numcore.h"

namespace tasr {

using Labels = std::vector<int>;

struct DecoderLayerParams {
  NormParams norm_self;
  MhaParams self_mha;
  NormParams norm_src;
  MhaParams src_mha;
  NormParams norm_ff;
  FeedForwardParams ff;
};

struct DecoderParams {
  std::size_t vocab_size = 0;
  std::size_t d_model = 0;
  int sos_id = 0;
  int eos_id = -1;  // -1: vocabulary has no <eos>
  Matrix embed;     // vocab_size x d_model
  std::vector<DecoderLayerParams> layers;
  NormParams final_norm;
  Matrix out_w;  // d_model x vocab_size
  std::vector<float> out_b;

  std::size_t d_layers() const { return layers.size(); }
  bool has_eos() const { return eos_id >= 0; }
  void validate() const;
};

/// Log posterior over the vocabulary for the label following `labels`,
/// attending encoder rows [0, nu). Requires 1 <= nu <= N.
std::vector<double> decoder_log_posterior(const EncoderStates& enc, std::size_t nu,
                                          std::span<const int> labels,
                                          const DecoderParams& params);

/// Same as decoder_log_posterior, exponentiated.
std::vector<double> decoder_posterior(const EncoderStates& enc, std::size_t nu,
                                      std::span<const int> labels, const DecoderParams& params);

/// Sum over l of log p(y_l | y_1..y_{l-1}, encoder rows 1..nu_l). Triggers
/// beyond N are clamped to N.
double ta_prefix_score(const EncoderStates& enc, std::span<const int> labels,
                       std::span<const std::size_t> nu_per_label, const DecoderParams& params);

/// Teacher-forced score of the whole sequence with full encoder context,
/// computed in one pass with a causal self-attention mask.
double full_sequence_score(const EncoderStates& enc, std::span<const int> labels,
                           const DecoderParams& params);

/// Per-session decoder state cache keyed by (truncation point, prefix). A
/// prefix extended by one label at the same truncation costs one decoder
/// step. Encoder rows handed in must not change between calls; new rows may
/// be appended.
class TriggeredDecoder {
 public:
  explicit TriggeredDecoder(const DecoderParams& params);

  /// Log posterior of the label following `labels` given encoder rows [0, nu).
  const std::vector<double>& next_log_posterior(const Matrix& enc, std::size_t nu,
                                                const Labels& labels);

  /// Drops cached states computed with a truncation point below `nu`.
  void drop_below(std::size_t nu);
  std::size_t cache_size() const { return cache_.size(); }

 private:
  struct State {
    std::vector<Matrix> keys;  // per layer, one row per position
    std::vector<Matrix> values;
    std::vector<double> log_posterior;
  };

  const State& state_for(const Matrix& enc, std::size_t nu, const Labels& labels);
  void project_source(const Matrix& enc, std::size_t rows);
  void extend(State& state, int token, std::size_t nu) const;

  const DecoderParams& params_;
  std::map<std::pair<std::size_t, Labels>, State> cache_;
  std::vector<Matrix> src_keys_;
  std::vector<Matrix> src_values_;
};

}  // namespace tasr

#endif  // TASR_DECODER_H_
