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

#include "tasr/streaming.h"

#include <limits>
#include <stdexcept>

namespace tasr {

namespace {

DecodeParams with_eps_dec(DecodeParams p, std::size_t eps_dec) {
  p.eps_dec = eps_dec;
  return p;
}

}  // namespace

double encoder_latency_ms(const StreamConfig& cfg, std::size_t e_layers) {
  if (!cfg.eps_enc.bounded()) return std::numeric_limits<double>::infinity();
  return static_cast<double>(e_layers * cfg.eps_enc.frames() * 4) * cfg.frame_shift_ms;
}

double decoder_latency_ms(const StreamConfig& cfg) {
  return static_cast<double>(cfg.eps_dec * 4) * cfg.frame_shift_ms;
}

double theoretical_latency_ms(const StreamConfig& cfg, std::size_t e_layers) {
  return 3.0 * cfg.frame_shift_ms + encoder_latency_ms(cfg, e_layers) + decoder_latency_ms(cfg);
}

StreamingSession::StreamingSession(const ModelParams& model, const LanguageModel& lm,
                                   StreamConfig cfg, DecodeParams params)
    : model_(model),
      cfg_(cfg),
      encoder_(model.encoder, cfg.eps_enc),
      decoder_(model.decoder, lm, with_eps_dec(params, cfg.eps_dec)),
      post_(0, model.ctc.w.cols()) {}

void StreamingSession::drain(bool final) {
  const Matrix& enc = encoder_.states();
  while (post_.frames() < enc.rows()) {
    post_.append_row(ctc_log_probs_row(enc.row(post_.frames()), model_.ctc));
  }
  while (decoder_.frames() < post_.frames() &&
         (final || enc.rows() >= decoder_.frames() + 1 + cfg_.eps_dec)) {
    decoder_.advance(post_.row(decoder_.frames()), enc);
  }
}

std::optional<Labels> StreamingSession::push(const Matrix& frames) {
  if (closed_) throw std::logic_error("session closed");
  if (frames.rows() == 0) throw std::invalid_argument("empty chunk");
  encoder_.push(frames);
  drain(false);
  if (decoder_.frames() == 0 || decoder_.best_ctc_prefix() == reported_) return std::nullopt;
  reported_ = decoder_.best_ctc_prefix();
  return reported_;
}

DecodeResult StreamingSession::finalize() {
  if (closed_) throw std::logic_error("session closed");
  closed_ = true;
  if (encoder_.input_frames() == 0) return {};
  encoder_.finish();
  drain(true);
  return decoder_.finalize(encoder_.states());
}

}  // namespace tasr
