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

#include "tasr/attention.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tasr {

AttentionMask AttentionMask::look_ahead(std::size_t n, std::size_t look_ahead) {
  AttentionMask m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t last = look_ahead >= n ? n - 1 : std::min(n - 1, i + look_ahead);
    for (std::size_t j = 0; j <= last; ++j) m.set(i, j, true);
  }
  return m;
}

AttentionMask AttentionMask::key_prefix(std::size_t queries, std::size_t keys,
                                        std::size_t limit) {
  AttentionMask m(queries, keys);
  for (std::size_t i = 0; i < queries; ++i) {
    for (std::size_t j = 0; j < std::min(limit, keys); ++j) m.set(i, j, true);
  }
  return m;
}

void MhaParams::validate() const {
  const std::size_t d = w_q.rows();
  if (heads == 0 || d == 0 || d % heads != 0) {
    throw std::invalid_argument("attention: d_model " + std::to_string(d) +
                                " not divisible by head count " + std::to_string(heads));
  }
  auto square = [d](const Matrix& m) { return m.rows() == d && m.cols() == d; };
  if (!square(w_q) || !square(w_k) || !square(w_v) || !square(w_h)) {
    throw std::invalid_argument("attention: projections must be d_model x d_model");
  }
}

void attend_row(std::span<const float> q, const Matrix& k, const Matrix& v, std::size_t col0,
                std::size_t width, std::size_t key_count, std::span<const std::uint8_t> allowed,
                std::span<float> out) {
  if (key_count > k.rows() || key_count > v.rows() ||
      (!allowed.empty() && allowed.size() < key_count)) {
    throw std::invalid_argument("attention: key count exceeds available keys");
  }
  const float scale = std::sqrt(static_cast<float>(width));
  std::vector<float> logits(key_count);
  const auto qh = q.subspan(col0, width);
  for (std::size_t j = 0; j < key_count; ++j) {
    logits[j] = (allowed.empty() || allowed[j] != 0) ? dot(qh, k.row(j).subspan(col0, width)) / scale
                                                : kMaskValue;
  }
  std::vector<float> weights(key_count);
  softmax_row(logits, weights);
  std::fill(out.begin(), out.end(), 0.0f);
  for (std::size_t j = 0; j < key_count; ++j) {
    const float p = weights[j];
    auto vr = v.row(j).subspan(col0, width);
    for (std::size_t c = 0; c < width; ++c) out[c] += p * vr[c];
  }
}

void mha_row(std::span<const float> q_proj, const Matrix& k_proj, const Matrix& v_proj,
             std::size_t key_count, std::span<const std::uint8_t> allowed, const MhaParams& params,
             std::span<float> out) {
  const std::size_t dk = params.d_head();
  std::vector<float> concat(params.heads * dk);
  for (std::size_t h = 0; h < params.heads; ++h) {
    attend_row(q_proj, k_proj, v_proj, h * dk, dk, key_count, allowed,
               std::span<float>(concat).subspan(h * dk, dk));
  }
  matvec_row(concat, params.w_h, {}, out);
}

Matrix scaled_dot_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                            const AttentionMask& mask) {
  if (q.cols() != k.cols() || k.rows() != v.rows() || mask.queries() != q.rows() ||
      mask.keys() != k.rows()) {
    throw std::invalid_argument("scaled_dot_attention: dimension mismatch");
  }
  Matrix out(q.rows(), v.cols());
  for (std::size_t i = 0; i < q.rows(); ++i) {
    if (v.cols() == q.cols()) {
      attend_row(q.row(i), k, v, 0, q.cols(), k.rows(), mask.row(i), out.row(i));
      continue;
    }
    // d_v != d_k: score with q/k, mix v separately.
    std::vector<float> logits(k.rows());
    const float scale = std::sqrt(static_cast<float>(q.cols()));
    for (std::size_t j = 0; j < k.rows(); ++j) {
      logits[j] = mask.allowed(i, j) ? dot(q.row(i), k.row(j)) / scale : kMaskValue;
    }
    std::vector<float> weights(k.rows());
    softmax_row(logits, weights);
    auto o = out.row(i);
    for (std::size_t j = 0; j < k.rows(); ++j) {
      for (std::size_t c = 0; c < v.cols(); ++c) o[c] += weights[j] * v(j, c);
    }
  }
  return out;
}

Matrix multi_head_attention(const Matrix& q_in, const Matrix& k_in, const Matrix& v_in,
                            const MhaParams& params, const AttentionMask& mask) {
  params.validate();
  const std::size_t d = params.d_model();
  if (q_in.cols() != d || k_in.cols() != d || v_in.cols() != d || k_in.rows() != v_in.rows() ||
      mask.queries() != q_in.rows() || mask.keys() != k_in.rows()) {
    throw std::invalid_argument("multi_head_attention: dimension mismatch");
  }
  const Matrix q = matmul(q_in, params.w_q);
  const Matrix k = matmul(k_in, params.w_k);
  const Matrix v = matmul(v_in, params.w_v);
  Matrix out(q_in.rows(), d);
  for (std::size_t i = 0; i < q_in.rows(); ++i) {
    mha_row(q.row(i), k, v, k.rows(), mask.row(i), params, out.row(i));
  }
  return out;
}

}  // namespace tasr
