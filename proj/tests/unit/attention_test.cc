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

#include <gtest/gtest.h>

#include <cmath>

#include "support/test_support.h"

namespace tasr {
namespace {

using testing::Rng;

TEST(AttentionMask, LookAheadPattern) {
  const AttentionMask m = AttentionMask::look_ahead(5, 1);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(m.allowed(i, j), j <= i + 1) << i << "," << j;
  }
}

TEST(AttentionMask, ZeroLookAheadIsCausal) {
  const AttentionMask a = AttentionMask::look_ahead(4, 0);
  const AttentionMask b = AttentionMask::causal(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(a.allowed(i, j), b.allowed(i, j));
  }
}

TEST(AttentionMask, HugeLookAheadIsFull) {
  const AttentionMask m = AttentionMask::look_ahead(3, 1000);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_TRUE(m.allowed(i, j));
  }
}

TEST(AttentionMask, KeyPrefix) {
  const AttentionMask m = AttentionMask::key_prefix(2, 4, 3);
  EXPECT_TRUE(m.allowed(1, 2));
  EXPECT_FALSE(m.allowed(0, 3));
}

TEST(ScaledDotAttention, MatchesDoubleReference) {
  Rng rng(4);
  const Matrix q = testing::random_matrix(rng, 3, 4);
  const Matrix k = testing::random_matrix(rng, 5, 4);
  const Matrix v = testing::random_matrix(rng, 5, 4);
  const AttentionMask mask = AttentionMask::full(3, 5);
  const Matrix out = scaled_dot_attention(q, k, v, mask);
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> w(5);
    double z = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < 4; ++c) s += static_cast<double>(q(i, c)) * k(j, c);
      w[j] = std::exp(s / 2.0);
      z += w[j];
    }
    for (std::size_t c = 0; c < 4; ++c) {
      double o = 0.0;
      for (std::size_t j = 0; j < 5; ++j) o += w[j] / z * v(j, c);
      EXPECT_NEAR(out(i, c), o, 1e-5);
    }
  }
}

TEST(ScaledDotAttention, SingleKeyReturnsItsValue) {
  const Matrix q(1, 2, std::vector<float>{3.0f, -1.0f});
  const Matrix k(1, 2, std::vector<float>{0.5f, 0.5f});
  const Matrix v(1, 2, std::vector<float>{7.0f, -2.0f});
  const Matrix out = scaled_dot_attention(q, k, v, AttentionMask::full(1, 1));
  EXPECT_EQ(out.data(), v.data());
}

TEST(ScaledDotAttention, MaskedKeysHaveNoInfluence) {
  Rng rng(5);
  const Matrix q = testing::random_matrix(rng, 4, 4);
  Matrix k = testing::random_matrix(rng, 4, 4);
  Matrix v = testing::random_matrix(rng, 4, 4);
  const AttentionMask mask = AttentionMask::causal(4);
  const Matrix base = scaled_dot_attention(q, k, v, mask);
  for (std::size_t c = 0; c < 4; ++c) {
    k(3, c) = 100.0f;
    v(3, c) = -100.0f;
  }
  const Matrix moved = scaled_dot_attention(q, k, v, mask);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(base(i, c), moved(i, c));
  }
}

TEST(ScaledDotAttention, RejectsShapeMismatch) {
  EXPECT_THROW(scaled_dot_attention(Matrix(2, 3), Matrix(2, 4), Matrix(2, 4),
                                    AttentionMask::full(2, 2)),
               std::invalid_argument);
  EXPECT_THROW(scaled_dot_attention(Matrix(2, 4), Matrix(2, 4), Matrix(2, 4),
                                    AttentionMask::full(3, 2)),
               std::invalid_argument);
}

TEST(MultiHeadAttention, ValidateRejectsIndivisibleHeads) {
  MhaParams p;
  p.w_q = p.w_k = p.w_v = p.w_h = Matrix(6, 6);
  p.heads = 4;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.heads = 3;
  EXPECT_NO_THROW(p.validate());
  p.w_h = Matrix(6, 5);
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(MultiHeadAttention, KeyPrefixEqualsTruncatedKeys) {
  // Attending over the first m keys under a mask equals attending over a
  // matrix holding only those keys, bit for bit.
  Rng rng(6);
  MhaParams p;
  p.heads = 2;
  p.w_q = testing::random_matrix(rng, 8, 8);
  p.w_k = testing::random_matrix(rng, 8, 8);
  p.w_v = testing::random_matrix(rng, 8, 8);
  p.w_h = testing::random_matrix(rng, 8, 8);
  const Matrix q = testing::random_matrix(rng, 2, 8);
  const Matrix kv = testing::random_matrix(rng, 6, 8);
  const Matrix masked = multi_head_attention(q, kv, kv, p, AttentionMask::key_prefix(2, 6, 4));
  const Matrix cut = multi_head_attention(q, kv.head(4), kv.head(4), p, AttentionMask::full(2, 4));
  EXPECT_EQ(masked, cut);
}

}  // namespace
}  // namespace tasr
