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

#ifndef TASR_ATTENTION_H_
#define TASR_ATTENTION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tasr/numcore.h"

namespace tasr {

/// Boolean n_q x n_k matrix; true means the query may attend to the key.
class AttentionMask {
 public:
  AttentionMask() = default;
  AttentionMask(std::size_t queries, std::size_t keys, bool fill = false)
      : queries_(queries), keys_(keys), allowed_(queries * keys, fill ? 1 : 0) {}

  static AttentionMask full(std::size_t queries, std::size_t keys) {
    return AttentionMask(queries, keys, true);
  }
  /// Query i sees keys j <= i.
  static AttentionMask causal(std::size_t n) { return look_ahead(n, 0); }
  /// Query i sees every past key and keys up to i + look_ahead.
  static AttentionMask look_ahead(std::size_t n, std::size_t look_ahead);
  /// Every query sees keys [0, limit).
  static AttentionMask key_prefix(std::size_t queries, std::size_t keys, std::size_t limit);

  std::size_t queries() const { return queries_; }
  std::size_t keys() const { return keys_; }

  bool allowed(std::size_t q, std::size_t k) const { return allowed_[q * keys_ + k] != 0; }
  void set(std::size_t q, std::size_t k, bool v) { allowed_[q * keys_ + k] = v ? 1 : 0; }

  std::span<const std::uint8_t> row(std::size_t q) const {
    return {allowed_.data() + q * keys_, keys_};
  }

 private:
  std::size_t queries_ = 0;
  std::size_t keys_ = 0;
  std::vector<std::uint8_t> allowed_;
};

/// Projections of one multi-head attention block. Head i uses columns
/// [i * d_k, (i + 1) * d_k) of w_q, w_k and w_v; no projection biases.
struct MhaParams {
  Matrix w_q;  // d_model x d_model
  Matrix w_k;
  Matrix w_v;
  Matrix w_h;  // (heads * d_v) x d_model
  std::size_t heads = 1;

  std::size_t d_model() const { return w_q.rows(); }
  std::size_t d_head() const { return w_q.cols() / heads; }
  /// Throws std::invalid_argument on inconsistent shapes.
  void validate() const;
};

/// Softmax(q k^T / sqrt(d_k)) v with disallowed logits set to -inf.
Matrix scaled_dot_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                            const AttentionMask& mask);

Matrix multi_head_attention(const Matrix& q_in, const Matrix& k_in, const Matrix& v_in,
                            const MhaParams& params, const AttentionMask& mask);

// Row-level building blocks. multi_head_attention() is composed from these, so
// a caller that projects rows one at a time and attends over the first
// `key_count` keys gets bit-identical results to the full-matrix route.

/// One head of one query row: attends keys [0, key_count) using columns
/// [col0, col0 + width) of q/k/v. `allowed` may be empty (all keys allowed).
void attend_row(std::span<const float> q, const Matrix& k, const Matrix& v, std::size_t col0,
                std::size_t width, std::size_t key_count, std::span<const std::uint8_t> allowed,
                std::span<float> out);

/// All heads of one already-projected query row, concatenated and projected
/// by w_h into `out` (d_model entries).
void mha_row(std::span<const float> q_proj, const Matrix& k_proj, const Matrix& v_proj,
             std::size_t key_count, std::span<const std::uint8_t> allowed, const MhaParams& params,
             std::span<float> out);

}  // namespace tasr

#endif  // TASR_ATTENTION_H_
