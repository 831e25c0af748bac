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

// CTC machinery: forward likelihood, forced alignment and the one-frame
// prefix beam search update.
//
// Column 0 of a posteriorgram is the blank; column c >= 1 is vocabulary id
// c - 1. Label sequences use vocabulary ids.

#ifndef TASR_CTC_H_
#define TASR_CTC_H_

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "tasr/decoder.h"
#include "tasr/numcore.h"

namespace tasr {

inline constexpr int kBlank = -1;

inline std::size_t ctc_column(int label) { return static_cast<std::size_t>(label) + 1; }

/// N x (V + 1) natural-log CTC posteriors.
class Posteriorgram {
 public:
  Posteriorgram() = default;
  Posteriorgram(std::size_t frames, std::size_t width) : logp_(frames, width, kLogZero) {}
  explicit Posteriorgram(BasicMatrix<double> logp) : logp_(std::move(logp)) {}

  std::size_t frames() const { return logp_.rows(); }
  std::size_t width() const { return logp_.cols(); }
  /// Number of non-blank columns.
  std::size_t labels() const { return logp_.cols() == 0 ? 0 : logp_.cols() - 1; }

  std::span<const double> row(std::size_t n) const { return logp_.row(n); }
  std::span<double> row(std::size_t n) { return logp_.row(n); }
  void append_row(std::span<const double> row) { logp_.append_row(row); }

  const BasicMatrix<double>& matrix() const { return logp_; }
  /// Throws unless every row log-sum-exps to 0 within `tol`.
  void validate(double tol = 1e-5) const;

  friend bool operator==(const Posteriorgram&, const Posteriorgram&) = default;

 private:
  BasicMatrix<double> logp_;
};

/// Linear CTC output layer over encoder states. Columns flagged in
/// `suppressed` (the <sos>/<eos> columns) get probability exactly zero.
struct CtcHead {
  Matrix w;  // d_model x (vocab_size + 1)
  std::vector<float> b;
  std::vector<std::uint8_t> suppressed;
};

std::vector<double> ctc_log_probs_row(std::span<const float> enc_row, const CtcHead& head);
Posteriorgram ctc_posteriorgram(const Matrix& enc_states, const CtcHead& head);

/// log p_ctc(Y | X): sum over every path that collapses to `labels`. Returns
/// -inf when the sequence cannot fit in the available frames.
double ctc_forward_logprob(const Posteriorgram& post, std::span<const int> labels);

struct TriggerAlignment {
  std::vector<int> path;                     // per frame: kBlank or a label id
  std::vector<std::size_t> first_occurrence;  // 1-based frame n'_l per label
  std::vector<std::size_t> nu;                // n'_l + decoder look-ahead
  double log_prob = kLogZero;                 // log probability of `path`
};

/// Highest-probability CTC path for `labels`. At equal score the path that
/// emits labels earlier wins. Throws "no valid alignment" if unreachable.
TriggerAlignment ctc_viterbi_align(const Posteriorgram& post, std::span<const int> labels,
                                   std::size_t eps_dec);

/// Removes repeats, then blanks.
std::vector<int> ctc_collapse(std::span<const int> path);

/// Log-domain probabilities of a prefix ending in blank / in a label.
struct PrefixScores {
  double blank = kLogZero;
  double non_blank = kLogZero;

  double total() const { return log_add(blank, non_blank); }
  friend bool operator==(const PrefixScores&, const PrefixScores&) = default;
};

using PrefixMap = std::map<Labels, PrefixScores>;

/// Initial hypothesis set: the empty prefix with p_b = 1, p_nb = 0.
PrefixMap ctc_initial_prefixes();

inline constexpr double kDefaultLocalThreshold = 1e-4;

/// Extends every prefix by one frame of CTC posteriors. Labels whose frame
/// probability is below `local_threshold` (or exactly zero) are skipped.
PrefixMap ctc_prefix_step(std::span<const double> logp_row, const PrefixMap& hyps,
                          double local_threshold = kDefaultLocalThreshold);

}  // namespace tasr

#endif  // TASR_CTC_H_
