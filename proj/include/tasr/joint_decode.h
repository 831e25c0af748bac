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

// Frame-synchronous one-pass joint CTC / triggered-attention beam search.
//
// Per encoder frame n:
//   1. extend the hypothesis set with the CTC prefix recursion,
//   2. score prefixes with CTC + LM + insertion bonus and prune to K / theta1,
//   3. drop and (re)compute attention scores as the hooks allow, truncating
//      the encoder at n + eps_dec,
//   4. score jointly, keep the P best jointly scored prefixes plus the CTC
//      prefixes that survive a second P / theta2 prune.
// The result is the best jointly scored prefix after the last frame.

#ifndef TASR_JOINT_DECODE_H_
#define TASR_JOINT_DECODE_H_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tasr/ctc.h"
#include "tasr/decoder.h"
#include "tasr/encoder.h"
#include "tasr/lm.h"

namespace tasr {

struct DecodeParams {
  double lambda = 0.5;  // CTC weight in the joint score
  double alpha0 = 0.7;  // LM weight for CTC prefix scores
  double alpha = 0.5;   // LM weight for joint scores
  double beta = 2.0;    // insertion bonus per label
  std::size_t k_size = 300;
  std::size_t p_size = 30;
  double theta1 = 16.0;
  double theta2 = 6.0;
  std::size_t eps_dec = 18;
  double local_threshold = kDefaultLocalThreshold;
  bool add_eos = true;  // add log p(<eos>) to attention scores before the final pick

  void validate() const;
};

struct LossParams {
  double gamma = 0.3;
};

/// p_b, p_nb, LM bookkeeping and cached scores of one prefix.
struct Hypothesis {
  Labels prefix;
  PrefixScores ctc;
  std::optional<double> ta_logp;
  LmState lm_state;
  double lm_logp = 0.0;
};

/// log(p_b + p_nb) + alpha0 * log p_LM + beta * |prefix|.
double prefix_score(const Hypothesis& h, double alpha0, double beta);

/// lambda * log p_prfx + (1 - lambda) * log p_ta + alpha * log p_LM + beta * |prefix|.
/// A zero weight drops its term entirely, so lambda = 1 never reads log_p_ta.
double joint_score(double log_p_prfx, double log_p_ta, double lm_logp, std::size_t length,
                   const DecodeParams& params);

using ScoreFn = std::function<double(const Labels&)>;

/// Orders by score descending, then shorter prefix, then lexicographically.
bool ranks_before(const Labels& a, double score_a, const Labels& b, double score_b);

/// Keeps the `size` best prefixes, then drops any scoring below best - width.
std::vector<Labels> prune(const std::vector<Labels>& hyps, const ScoreFn& score, std::size_t size,
                          double width);

/// The `count` best prefixes.
std::vector<Labels> select_max(const std::vector<Labels>& hyps, const ScoreFn& score,
                               std::size_t count);

/// Delete / add condition hook: (prefix, pruned beam, CTC row of the frame).
using BeamCondition =
    std::function<bool(const Labels&, const std::vector<Labels>&, std::span<const double>)>;

struct DecodeHooks {
  BeamCondition delete_condition;  // empty: never delete
  BeamCondition add_condition;     // empty: always add
};

struct FrameTrace {
  std::size_t frame = 0;
  std::size_t beam_size = 0;  // prefixes kept by the first prune
  Labels best;                // best jointly scored prefix
  double prefix_score = 0.0;
  double joint_score = 0.0;

  friend bool operator==(const FrameTrace&, const FrameTrace&) = default;
};

std::string format_trace(const FrameTrace& t);

struct DecodeResult {
  Labels labels;
  double score = 0.0;
  std::vector<FrameTrace> trace;
};

/// Incremental decoder state. Call advance() once per encoder frame; the
/// encoder matrix must then hold at least min(n + eps_dec, N) rows.
class JointDecoder {
 public:
  JointDecoder(const DecoderParams& dec, const LanguageModel& lm, DecodeParams params,
               DecodeHooks hooks = {});

  void advance(std::span<const double> ctc_row, const Matrix& enc);
  /// Best prefix; `enc` must hold all N encoder rows.
  DecodeResult finalize(const Matrix& enc);

  std::size_t frames() const { return frame_; }
  /// Best CTC prefix of the last frame (the partial result).
  const Labels& best_ctc_prefix() const { return best_ctc_; }
  const std::vector<FrameTrace>& trace() const { return trace_; }
  /// Prefixes currently holding an attention score.
  std::vector<Labels> scored_prefixes() const;

 private:
  struct Entry {
    PrefixScores ctc;
    LmState lm_state;
    double lm_logp = 0.0;
    double prefix_score = 0.0;
    double joint = 0.0;
  };

  double attention_score(const Labels& prefix, std::size_t nu, const Matrix& enc);

  const DecoderParams& dec_params_;
  const LanguageModel& lm_;
  DecodeParams params_;
  DecodeHooks hooks_;
  TriggeredDecoder dec_;
  std::size_t frame_ = 0;
  std::map<Labels, Entry> beam_;        // Omega: hypotheses carried to the next frame
  std::map<Labels, double> ta_scores_;  // Omega_ta
  std::map<Labels, Entry> last_pruned_;  // CTC prefixes surviving the second prune
  Labels best_ctc_;
  std::vector<FrameTrace> trace_;
};

/// Whole-utterance joint decoding; row_at(n) is called for n = 0, 1, ...
/// only after frames 0..n-1 are done.
DecodeResult decode(const EncoderStates& enc,
                    const std::function<std::span<const double>(std::size_t)>& row_at,
                    std::size_t frames, const LanguageModel& lm, const DecoderParams& dec,
                    const DecodeParams& params, const DecodeHooks& hooks = {});

DecodeResult decode(const EncoderStates& enc, const Posteriorgram& post, const LanguageModel& lm,
                    const DecoderParams& dec, const DecodeParams& params,
                    const DecodeHooks& hooks = {});

/// CTC prefix beam search alone, with the same scoring and pruning as the
/// joint decoder (K / theta1 prune, then the P best prefixes).
DecodeResult ctc_beam_search(const Posteriorgram& post, const LanguageModel& lm,
                             const DecodeParams& params);

/// -gamma log p_ctc(Y|X) - (1 - gamma) log p_ta(Y|X), with triggers from
/// `align`. Returns +inf when Y is unreachable.
double joint_loss(const Posteriorgram& post, const EncoderStates& enc, std::span<const int> labels,
                  const TriggerAlignment& align, const DecoderParams& dec,
                  const LossParams& loss);

}  // namespace tasr

#endif  // TASR_JOINT_DECODE_H_
