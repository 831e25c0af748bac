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

#include "tasr/ctc.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tasr {

namespace {

void check_labels(const Posteriorgram& post, std::span<const int> labels) {
  for (int y : labels) {
    if (y < 0 || ctc_column(y) >= post.width()) {
      throw std::invalid_argument("label " + std::to_string(y) +
                                  " has no column in a posteriorgram of width " +
                                  std::to_string(post.width()));
    }
  }
}

// Column of trellis state s over the blank-interleaved label sequence.
std::size_t state_column(std::span<const int> labels, std::size_t s) {
  return s % 2 == 0 ? 0 : ctc_column(labels[s / 2]);
}

bool can_skip(std::span<const int> labels, std::size_t s) {
  return s % 2 == 1 && s >= 3 && labels[s / 2] != labels[s / 2 - 1];
}

}  // namespace

void Posteriorgram::validate(double tol) const {
  if (width() < 2) throw std::invalid_argument("posteriorgram needs a blank and a label column");
  for (std::size_t n = 0; n < frames(); ++n) {
    const double z = log_sum_exp(row(n));
    if (!(std::abs(z) <= tol)) {
      throw std::invalid_argument("posteriorgram row " + std::to_string(n) +
                                  " is not normalized (log-sum-exp " + std::to_string(z) + ")");
    }
  }
}

std::vector<double> ctc_log_probs_row(std::span<const float> enc_row, const CtcHead& head) {
  std::vector<float> logits(head.w.cols());
  matvec_row(enc_row, head.w, head.b, logits);
  return log_softmax(logits, head.suppressed);
}

Posteriorgram ctc_posteriorgram(const Matrix& enc_states, const CtcHead& head) {
  Posteriorgram post(0, head.w.cols());
  for (std::size_t n = 0; n < enc_states.rows(); ++n) {
    post.append_row(ctc_log_probs_row(enc_states.row(n), head));
  }
  return post;
}

std::vector<int> ctc_collapse(std::span<const int> path) {
  std::vector<int> out;
  int prev = kBlank;
  for (int sym : path) {
    if (sym != kBlank && sym != prev) out.push_back(sym);
    prev = sym;
  }
  return out;
}

double ctc_forward_logprob(const Posteriorgram& post, std::span<const int> labels) {
  check_labels(post, labels);
  const std::size_t n_frames = post.frames();
  if (n_frames == 0) return labels.empty() ? 0.0 : kLogZero;
  const std::size_t states = 2 * labels.size() + 1;
  std::vector<double> alpha(states, kLogZero);
  std::vector<double> next(states);
  alpha[0] = post.row(0)[0];
  if (states > 1) alpha[1] = post.row(0)[state_column(labels, 1)];
  for (std::size_t t = 1; t < n_frames; ++t) {
    const auto row = post.row(t);
    for (std::size_t s = 0; s < states; ++s) {
      double acc = alpha[s];
      if (s >= 1) acc = log_add(acc, alpha[s - 1]);
      if (can_skip(labels, s)) acc = log_add(acc, alpha[s - 2]);
      next[s] = acc == kLogZero ? kLogZero : acc + row[state_column(labels, s)];
    }
    alpha.swap(next);
  }
  return states > 1 ? log_add(alpha[states - 1], alpha[states - 2]) : alpha[0];
}

TriggerAlignment ctc_viterbi_align(const Posteriorgram& post, std::span<const int> labels,
                                   std::size_t eps_dec) {
  check_labels(post, labels);
  const std::size_t n_frames = post.frames();
  const std::size_t states = 2 * labels.size() + 1;
  if (n_frames == 0) throw std::invalid_argument("no valid alignment");
  std::vector<double> score(states, kLogZero);
  std::vector<double> next(states);
  // back[t][s]: predecessor state at frame t - 1.
  std::vector<std::vector<std::size_t>> back(n_frames, std::vector<std::size_t>(states, 0));
  score[0] = post.row(0)[0];
  if (states > 1) score[1] = post.row(0)[state_column(labels, 1)];
  for (std::size_t t = 1; t < n_frames; ++t) {
    const auto row = post.row(t);
    for (std::size_t s = 0; s < states; ++s) {
      // Candidates in order stay, step, skip: at equal score the most
      // advanced predecessor wins, i.e. the label was emitted earlier.
      std::size_t best = s;
      double best_score = score[s];
      if (s >= 1 && score[s - 1] > best_score) {
        best = s - 1;
        best_score = score[s - 1];
      }
      if (can_skip(labels, s) && score[s - 2] > best_score) {
        best = s - 2;
        best_score = score[s - 2];
      }
      back[t][s] = best;
      next[s] = best_score == kLogZero ? kLogZero : best_score + row[state_column(labels, s)];
    }
    score.swap(next);
  }
  std::size_t end = states - 1;
  if (states > 1 && score[states - 2] > score[states - 1]) end = states - 2;
  if (score[end] == kLogZero) throw std::invalid_argument("no valid alignment");

  TriggerAlignment align;
  align.log_prob = score[end];
  std::vector<std::size_t> state_path(n_frames);
  std::size_t s = end;
  for (std::size_t t = n_frames; t-- > 0;) {
    state_path[t] = s;
    if (t > 0) s = back[t][s];
  }
  align.path.resize(n_frames);
  align.first_occurrence.assign(labels.size(), 0);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::size_t st = state_path[t];
    if (st % 2 == 0) {
      align.path[t] = kBlank;
      continue;
    }
    align.path[t] = labels[st / 2];
    if (align.first_occurrence[st / 2] == 0) align.first_occurrence[st / 2] = t + 1;
  }
  align.nu.resize(labels.size());
  for (std::size_t l = 0; l < labels.size(); ++l) align.nu[l] = align.first_occurrence[l] + eps_dec;
  return align;
}

PrefixMap ctc_initial_prefixes() {
  PrefixMap m;
  m[Labels{}] = PrefixScores{0.0, kLogZero};
  return m;
}

PrefixMap ctc_prefix_step(std::span<const double> logp_row, const PrefixMap& hyps,
                          double local_threshold) {
  const double floor = local_threshold > 0.0 ? std::log(local_threshold) : kLogZero;
  auto usable = [floor](double lp) { return lp != kLogZero && lp >= floor; };
  const double blank = logp_row[0];

  PrefixMap out;
  for (const auto& [prefix, s] : hyps) {
    const double total = s.total();
    if (total == kLogZero) continue;
    auto& self = out[prefix];
    if (blank != kLogZero) self.blank = log_add(self.blank, total + blank);
    const int last = prefix.empty() ? kBlank : prefix.back();
    if (last != kBlank) {
      const double lp = logp_row[ctc_column(last)];
      if (usable(lp) && s.non_blank != kLogZero) {
        self.non_blank = log_add(self.non_blank, s.non_blank + lp);
      }
    }
    for (std::size_t col = 1; col < logp_row.size(); ++col) {
      const double lp = logp_row[col];
      if (!usable(lp)) continue;
      const int c = static_cast<int>(col) - 1;
      // A repeated label only starts a new token after a blank.
      const double from = c == last ? s.blank : total;
      if (from == kLogZero) continue;
      Labels ext = prefix;
      ext.push_back(c);
      auto& e = out[ext];
      e.non_blank = log_add(e.non_blank, from + lp);
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.total() == kLogZero; });
  return out;
}

}  // namespace tasr
