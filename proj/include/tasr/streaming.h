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

// Incremental recognition session.
//
// Feature frames are pushed as they arrive. Encoder row n (1-based) is
// emitted once 4 * (n + E * eps_enc) feature frames exist; the decoder
// advances over frame n once n + eps_dec encoder rows exist. finalize()
// pads the end of the utterance exactly like offline encoding, so its result
// equals decode() on the whole utterance bit for bit.

#ifndef TASR_STREAMING_H_
#define TASR_STREAMING_H_

#include <cstddef>
#include <optional>

#include "tasr/joint_decode.h"
#include "tasr/model_io.h"

namespace tasr {

struct StreamConfig {
  LookAhead eps_enc{0};
  std::size_t eps_dec = 18;
  double frame_shift_ms = 10.0;
};

/// CNN front end: 3 frames; each encoder look-ahead frame is 4 feature frames.
double encoder_latency_ms(const StreamConfig& cfg, std::size_t e_layers);
double decoder_latency_ms(const StreamConfig& cfg);
double theoretical_latency_ms(const StreamConfig& cfg, std::size_t e_layers);

class StreamingSession {
 public:
  /// `params.eps_dec` is replaced by `cfg.eps_dec`. The model and LM must
  /// outlive the session.
  StreamingSession(const ModelParams& model, const LanguageModel& lm, StreamConfig cfg,
                   DecodeParams params);

  /// Returns the best CTC prefix when it changed since the last report.
  std::optional<Labels> push(const Matrix& frames);
  DecodeResult finalize();

  bool closed() const { return closed_; }
  std::size_t input_frames() const { return encoder_.input_frames(); }
  std::size_t encoder_frames() const { return encoder_.states().rows(); }
  std::size_t decoded_frames() const { return decoder_.frames(); }
  const Labels& partial() const { return reported_; }
  const Posteriorgram& posteriorgram() const { return post_; }

 private:
  void drain(bool final);

  const ModelParams& model_;
  StreamConfig cfg_;
  IncrementalEncoder encoder_;
  JointDecoder decoder_;
  Posteriorgram post_;
  Labels reported_;
  bool closed_ = false;
};

}  // namespace tasr

#endif  // TASR_STREAMING_H_
