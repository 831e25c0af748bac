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

#include "tasr/joint_decode.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

namespace tasr {

namespace {

Labels parent_of(const Labels& prefix) { return Labels(prefix.begin(), prefix.end() - 1); }

double prefix_score_of(double ctc_total, double lm_logp, std::size_t length, double alpha0,
                       double beta) {
  return ctc_total + alpha0 * lm_logp + beta * static_cast<double>(length);
}

// One CTC prefix with its LM bookkeeping, before any attention scoring.
struct Candidate {
  PrefixScores ctc;
  LmState lm_state;
  double lm_logp = 0.0;
  double prefix_score = 0.0;
};

// Runs the CTC prefix recursion over `beam` for one frame and attaches LM and
// prefix scores. New prefixes always extend a member of `beam`.
template <typename BeamEntry>
std::map<Labels, Candidate> expand(std::span<const double> row,
                                   const std::map<Labels, BeamEntry>& beam,
                                   const LanguageModel& lm, const DecodeParams& params) {
  PrefixMap prefixes;
  for (const auto& [prefix, e] : beam) prefixes.emplace(prefix, e.ctc);
  PrefixMap stepped = ctc_prefix_step(row, prefixes, params.local_threshold);
  if (stepped.empty()) throw std::runtime_error("search collapsed");

  std::map<Labels, Candidate> out;
  for (auto& [prefix, scores] : stepped) {
    Candidate c;
    c.ctc = scores;
    if (auto it = beam.find(prefix); it != beam.end()) {
      c.lm_state = it->second.lm_state;
      c.lm_logp = it->second.lm_logp;
    } else {
      const auto& parent = beam.at(parent_of(prefix));
      LmStep step = lm.extend(parent.lm_state, prefix.back());
      c.lm_state = std::move(step.state);
      c.lm_logp = parent.lm_logp + step.logp;
    }
    c.prefix_score =
        prefix_score_of(c.ctc.total(), c.lm_logp, prefix.size(), params.alpha0, params.beta);
    out.emplace(prefix, std::move(c));
  }
  return out;
}

template <typename Map>
std::vector<Labels> keys_of(const Map& m) {
  std::vector<Labels> out;
  out.reserve(m.size());
  for (const auto& kv : m) out.push_back(kv.first);
  return out;
}

}  // namespace

void DecodeParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  if (p_size < 1 || k_size < p_size) throw std::invalid_argument("need K >= P >= 1");
  if (!(theta1 > 0.0) || !(theta2 > 0.0)) throw std::invalid_argument("beam widths must be > 0");
  if (!(local_threshold >= 0.0 && local_threshold < 1.0)) {
    throw std::invalid_argument("local threshold must lie in [0, 1)");
  }
}

double prefix_score(const Hypothesis& h, double alpha0, double beta) {
  return prefix_score_of(h.ctc.total(), h.lm_logp, h.prefix.size(), alpha0, beta);
}

double joint_score(double log_p_prfx, double log_p_ta, double lm_logp, std::size_t length,
                   const DecodeParams& params) {
  double p = 0.0;
  if (params.lambda != 0.0) p = params.lambda * log_p_prfx;
  if (params.lambda != 1.0) {
    const double ta = (1.0 - params.lambda) * log_p_ta;
    p = params.lambda != 0.0 ? p + ta : ta;
  }
  return p + params.alpha * lm_logp + params.beta * static_cast<double>(length);
}

bool ranks_before(const Labels& a, double score_a, const Labels& b, double score_b) {
  if (score_a != score_b) return score_a > score_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::vector<Labels> select_max(const std::vector<Labels>& hyps, const ScoreFn& score,
                               std::size_t count) {
  std::vector<std::pair<double, const Labels*>> ranked;
  ranked.reserve(hyps.size());
  for (const auto& h : hyps) ranked.emplace_back(score(h), &h);
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return ranks_before(*x.second, x.first, *y.second, y.first);
  });
  std::vector<Labels> out;
  for (std::size_t i = 0; i < std::min(count, ranked.size()); ++i) out.push_back(*ranked[i].second);
  return out;
}

std::vector<Labels> prune(const std::vector<Labels>& hyps, const ScoreFn& score, std::size_t size,
                          double width) {
  std::vector<Labels> top = select_max(hyps, score, size);
  if (top.empty()) return top;
  const double cut = score(top.front()) - width;
  std::erase_if(top, [&](const Labels& l) { return score(l) < cut; });
  return top;
}

std::string format_trace(const FrameTrace& t) {
  std::string best = "[";
  for (std::size_t i = 0; i < t.best.size(); ++i) {
    if (i) best += ",";
    best += std::to_string(t.best[i]);
  }
  best += "]";
  char buf[128];
  std::snprintf(buf, sizeof(buf), " prefix_score=%.17g joint=%.17g", t.prefix_score,
                t.joint_score);
  return "frame=" + std::to_string(t.frame) + " beam=" + std::to_string(t.beam_size) +
         " best=" + best + buf;
}

// ---------------------------------------------------------------------------
// JointDecoder

JointDecoder::JointDecoder(const DecoderParams& dec, const LanguageModel& lm, DecodeParams params,
                           DecodeHooks hooks)
    : dec_params_(dec), lm_(lm), params_(params), hooks_(std::move(hooks)), dec_(dec) {
  params_.validate();
  Entry root;
  root.ctc = PrefixScores{0.0, kLogZero};
  root.lm_state = lm_.start();
  beam_.emplace(Labels{}, root);
  ta_scores_.emplace(Labels{}, 0.0);
}

double JointDecoder::attention_score(const Labels& prefix, std::size_t nu, const Matrix& enc) {
  if (prefix.empty()) return 0.0;
  const Labels parent = parent_of(prefix);
  if (auto it = ta_scores_.find(parent); it != ta_scores_.end()) {
    return it->second + dec_.next_log_posterior(enc, nu, parent)[prefix.back()];
  }
  // No cached ancestor score: score every label against the same truncation.
  double score = 0.0;
  Labels history;
  for (int label : prefix) {
    score += dec_.next_log_posterior(enc, nu, history)[label];
    history.push_back(label);
  }
  return score;
}

void JointDecoder::advance(std::span<const double> ctc_row, const Matrix& enc) {
  ++frame_;
  const std::size_t nu = std::min(frame_ + params_.eps_dec, enc.rows());
  if (nu < 1) throw std::invalid_argument("joint decoding needs encoder rows");

  std::map<Labels, Candidate> cands = expand(ctc_row, beam_, lm_, params_);
  const ScoreFn by_prefix = [&](const Labels& l) { return cands.at(l).prefix_score; };
  const std::vector<Labels> pruned = prune(keys_of(cands), by_prefix, params_.k_size,
                                           params_.theta1);

  if (hooks_.delete_condition) {
    for (const auto& l : pruned) {
      if (ta_scores_.contains(l) && hooks_.delete_condition(l, pruned, ctc_row)) {
        ta_scores_.erase(l);
      }
    }
  }
  for (const auto& l : pruned) {
    if (ta_scores_.contains(l)) continue;
    if (hooks_.add_condition && !hooks_.add_condition(l, pruned, ctc_row)) continue;
    const double ta = attention_score(l, nu, enc);
    ta_scores_.emplace(l, ta);
  }

  std::map<Labels, Entry> scored;
  for (const auto& l : pruned) {
    const Candidate& c = cands.at(l);
    auto ta = ta_scores_.find(l);
    if (ta == ta_scores_.end() && !l.empty()) ta = ta_scores_.find(parent_of(l));
    if (ta == ta_scores_.end()) {
      throw std::logic_error("no attention score for a prefix or its parent");
    }
    Entry e;
    e.ctc = c.ctc;
    e.lm_state = c.lm_state;
    e.lm_logp = c.lm_logp;
    e.prefix_score = c.prefix_score;
    e.joint = joint_score(c.ctc.total(), ta->second, c.lm_logp, l.size(), params_);
    scored.emplace(l, std::move(e));
  }

  const ScoreFn by_joint = [&](const Labels& l) { return scored.at(l).joint; };
  const std::vector<Labels> best_joint = select_max(pruned, by_joint, params_.p_size);
  const std::vector<Labels> second = prune(pruned, by_prefix, params_.p_size, params_.theta2);

  std::map<Labels, Entry> next;
  for (const auto& l : best_joint) next.emplace(l, scored.at(l));
  last_pruned_.clear();
  for (const auto& l : second) {
    next.emplace(l, scored.at(l));
    last_pruned_.emplace(l, scored.at(l));
  }
  beam_ = std::move(next);

  // Keep attention scores of surviving prefixes and their ancestors; a child
  // may fall back to its parent's score.
  std::set<Labels> keep;
  for (const auto& [l, e] : beam_) {
    for (std::size_t len = 0; len <= l.size(); ++len) keep.emplace(l.begin(), l.begin() + len);
  }
  std::erase_if(ta_scores_, [&](const auto& kv) { return !keep.contains(kv.first); });
  dec_.drop_below(nu);

  best_ctc_ = pruned.front();
  const Labels best = select_max(second, by_joint, 1).front();
  trace_.push_back(FrameTrace{frame_, pruned.size(), best, scored.at(best).prefix_score,
                              scored.at(best).joint});
}

DecodeResult JointDecoder::finalize(const Matrix& enc) {
  DecodeResult result;
  result.trace = trace_;
  if (frame_ == 0) return result;
  std::map<Labels, double> final_scores;
  const bool use_eos = params_.add_eos && dec_params_.has_eos() && params_.lambda != 1.0;
  for (const auto& [l, e] : last_pruned_) {
    double score = e.joint;
    if (use_eos) {
      if (auto ta = ta_scores_.find(l); ta != ta_scores_.end()) {
        const double eos = dec_.next_log_posterior(enc, enc.rows(), l)[dec_params_.eos_id];
        score = joint_score(e.ctc.total(), ta->second + eos, e.lm_logp, l.size(), params_);
      }
    }
    final_scores.emplace(l, score);
  }
  const ScoreFn by_final = [&](const Labels& l) { return final_scores.at(l); };
  result.labels = select_max(keys_of(final_scores), by_final, 1).front();
  result.score = final_scores.at(result.labels);
  return result;
}

std::vector<Labels> JointDecoder::scored_prefixes() const { return keys_of(ta_scores_); }

// ---------------------------------------------------------------------------
// Drivers

DecodeResult decode(const EncoderStates& enc,
                    const std::function<std::span<const double>(std::size_t)>& row_at,
                    std::size_t frames, const LanguageModel& lm, const DecoderParams& dec,
                    const DecodeParams& params, const DecodeHooks& hooks) {
  if (frames != enc.frames()) {
    throw std::invalid_argument("posteriorgram has " + std::to_string(frames) +
                                " frames, encoder output " + std::to_string(enc.frames()));
  }
  JointDecoder decoder(dec, lm, params, hooks);
  for (std::size_t n = 0; n < frames; ++n) decoder.advance(row_at(n), enc.states);
  return decoder.finalize(enc.states);
}

DecodeResult decode(const EncoderStates& enc, const Posteriorgram& post, const LanguageModel& lm,
                    const DecoderParams& dec, const DecodeParams& params,
                    const DecodeHooks& hooks) {
  return decode(enc, [&post](std::size_t n) { return post.row(n); }, post.frames(), lm, dec,
                params, hooks);
}

DecodeResult ctc_beam_search(const Posteriorgram& post, const LanguageModel& lm,
                             const DecodeParams& params) {
  params.validate();
  std::map<Labels, Candidate> beam;
  Candidate root;
  root.ctc = PrefixScores{0.0, kLogZero};
  root.lm_state = lm.start();
  beam.emplace(Labels{}, root);

  DecodeResult result;
  std::vector<Labels> pruned;
  std::map<Labels, Candidate> cands;
  for (std::size_t n = 0; n < post.frames(); ++n) {
    cands = expand(post.row(n), beam, lm, params);
    const ScoreFn by_prefix = [&](const Labels& l) { return cands.at(l).prefix_score; };
    pruned = prune(keys_of(cands), by_prefix, params.k_size, params.theta1);
    std::map<Labels, Candidate> next;
    for (const auto& l : select_max(pruned, by_prefix, params.p_size)) next.emplace(l, cands.at(l));
    beam = std::move(next);
    const Labels& best = pruned.front();
    const double s = cands.at(best).prefix_score;
    result.trace.push_back(FrameTrace{n + 1, pruned.size(), best, s, s});
  }
  if (!pruned.empty()) {
    result.labels = pruned.front();
    result.score = cands.at(result.labels).prefix_score;
  }
  return result;
}

double joint_loss(const Posteriorgram& post, const EncoderStates& enc, std::span<const int> labels,
                  const TriggerAlignment& align, const DecoderParams& dec,
                  const LossParams& loss) {
  if (align.nu.size() != labels.size()) {
    throw std::invalid_argument("joint_loss: alignment does not match the label sequence");
  }
  const double ctc = ctc_forward_logprob(post, labels);
  if (ctc == kLogZero) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  if (loss.gamma != 0.0) total += -loss.gamma * ctc;
  if (loss.gamma != 1.0) {
    total += -(1.0 - loss.gamma) * ta_prefix_score(enc, labels, align.nu, dec);
  }
  return total;
}

}  // namespace tasr
