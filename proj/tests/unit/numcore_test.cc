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

#include "tasr/numcore.h"

#include <gtest/gtest.h>

#include <cmath>

#include "support/test_support.h"

namespace tasr {
namespace {

using testing::Rng;

TEST(LogAdd, IdentityAndSymmetry) {
  EXPECT_EQ(log_add(kLogZero, -1.5), -1.5);
  EXPECT_EQ(log_add(-1.5, kLogZero), -1.5);
  EXPECT_EQ(log_add(kLogZero, kLogZero), kLogZero);
  EXPECT_NEAR(log_add(std::log(0.25), std::log(0.5)), std::log(0.75), 1e-15);
  EXPECT_EQ(log_add(-3.0, -7.0), log_add(-7.0, -3.0));
}

TEST(LogSumExp, EmptyAndLarge) {
  EXPECT_EQ(log_sum_exp({}), kLogZero);
  const std::vector<double> v = {1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(v), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> z = {kLogZero, kLogZero};
  EXPECT_EQ(log_sum_exp(z), kLogZero);
}

TEST(Matmul, MatchesNaiveTripleLoop) {
  Rng rng(1);
  const Matrix a = testing::random_matrix(rng, 5, 7);
  const Matrix b = testing::random_matrix(rng, 7, 3);
  const Matrix c = matmul(a, b);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 7; ++k) s += static_cast<double>(a(i, k)) * b(k, j);
      EXPECT_NEAR(c(i, j), s, 1e-5);
    }
  }
}

TEST(Matmul, RejectsMismatchedShapes) {
  EXPECT_THROW(matmul(Matrix(2, 3), Matrix(4, 2)), std::invalid_argument);
  std::vector<float> out(2);
  EXPECT_THROW(matvec_row(std::vector<float>(3), Matrix(3, 2), std::vector<float>(5), out),
               std::invalid_argument);
}

TEST(Affine, AddsBias) {
  Matrix a(1, 2, std::vector<float>{1.0f, 2.0f});
  Matrix w(2, 2, std::vector<float>{1.0f, 0.0f, 0.0f, 1.0f});
  const std::vector<float> bias = {0.5f, -0.5f};
  const Matrix out = affine(a, w, bias);
  EXPECT_EQ(out(0, 0), 1.5f);
  EXPECT_EQ(out(0, 1), 1.5f);
}

TEST(Relu, ClampsNegatives) {
  const Matrix m = relu(Matrix(1, 3, std::vector<float>{-1.0f, 0.0f, 2.0f}));
  EXPECT_EQ(m.data(), (std::vector<float>{0.0f, 0.0f, 2.0f}));
}

TEST(Softmax, SumsToOneAndMasksExactly) {
  const std::vector<float> in = {1.0f, kMaskValue, 3.0f, -2.0f};
  std::vector<float> out(4);
  softmax_row(in, out);
  EXPECT_EQ(out[1], 0.0f);
  EXPECT_NEAR(out[0] + out[2] + out[3], 1.0, 1e-6);
  EXPECT_GT(out[2], out[0]);
}

TEST(Softmax, AllMaskedRowThrows) {
  const std::vector<float> in = {kMaskValue, kMaskValue};
  std::vector<float> out(2);
  EXPECT_THROW(softmax_row(in, out), std::invalid_argument);
}

TEST(Softmax, ShiftInvariant) {
  const std::vector<float> a = {0.5f, 1.5f, -1.0f};
  const std::vector<float> b = {100.5f, 101.5f, 99.0f};
  std::vector<float> oa(3), ob(3);
  softmax_row(a, oa);
  softmax_row(b, ob);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(oa[i], ob[i], 1e-6);
}

TEST(LogSoftmax, SuppressedColumnsAreZeroProbability) {
  const std::vector<float> logits = {0.0f, 5.0f, 1.0f};
  const std::vector<std::uint8_t> sup = {0, 1, 0};
  const auto lp = log_softmax(logits, sup);
  EXPECT_EQ(lp[1], kLogZero);
  EXPECT_NEAR(std::exp(lp[0]) + std::exp(lp[2]), 1.0, 1e-15);
  EXPECT_THROW(log_softmax(logits, std::vector<std::uint8_t>{0, 1}), std::invalid_argument);
}

TEST(LayerNorm, ZeroMeanUnitVariance) {
  Rng rng(2);
  const Matrix m = testing::random_matrix(rng, 3, 16, 5.0);
  const std::vector<float> gain(16, 1.0f), bias(16, 0.0f);
  const Matrix n = layer_norm(m, gain, bias);
  for (std::size_t r = 0; r < 3; ++r) {
    double mean = 0, var = 0;
    for (float v : n.row(r)) mean += v;
    mean /= 16;
    for (float v : n.row(r)) var += (v - mean) * (v - mean);
    EXPECT_NEAR(mean, 0.0, 1e-6);
    EXPECT_NEAR(var / 16, 1.0, 1e-5);
  }
}

TEST(LayerNorm, ConstantRowMapsToBias) {
  const Matrix m(1, 4, 3.0f);
  const std::vector<float> gain(4, 2.0f), bias = {0.1f, 0.2f, 0.3f, 0.4f};
  const Matrix n = layer_norm(m, gain, bias);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(n(0, c), bias[c]);
}

TEST(ConvOutputLength, StrideTwoPadOne) {
  EXPECT_EQ(conv_output_length(1, 2, 1), 1u);
  EXPECT_EQ(conv_output_length(2, 2, 1), 1u);
  EXPECT_EQ(conv_output_length(3, 2, 1), 2u);
  EXPECT_EQ(conv_output_length(83, 2, 1), 42u);
  EXPECT_THROW(conv_output_length(0, 2, 0), std::invalid_argument);
}

TEST(Conv2d, MatchesDirectSum) {
  Rng rng(3);
  Volume in(2, 7, 5);
  for (float& v : in.data) v = static_cast<float>(testing::uniform(rng, -1, 1));
  ConvKernel k;
  k.out_channels = 3;
  k.in_channels = 2;
  k.weight.resize(3 * 2 * 9);
  k.bias = {0.1f, -0.2f, 0.3f};
  for (float& v : k.weight) v = static_cast<float>(testing::uniform(rng, -1, 1));
  const Volume out = conv2d(in, k, 2, 1);
  ASSERT_EQ(out.time, 4u);
  ASSERT_EQ(out.freq, 3u);
  for (std::size_t o = 0; o < 3; ++o) {
    for (std::size_t t = 0; t < 4; ++t) {
      for (std::size_t f = 0; f < 3; ++f) {
        double s = k.bias[o];
        for (std::size_t i = 0; i < 2; ++i) {
          for (int dt = 0; dt < 3; ++dt) {
            for (int df = 0; df < 3; ++df) {
              const long tt = static_cast<long>(2 * t) - 1 + dt;
              const long ff = static_cast<long>(2 * f) - 1 + df;
              if (tt < 0 || ff < 0 || tt >= 7 || ff >= 5) continue;
              s += static_cast<double>(k.w(o, i, dt, df)) * in.at(i, tt, ff);
            }
          }
        }
        EXPECT_NEAR(out.at(o, t, f), s, 1e-5);
      }
    }
  }
}

TEST(BasicMatrix, AppendAndHead) {
  Matrix m;
  m.append_row(std::vector<float>{1, 2});
  m.append_row(std::vector<float>{3, 4});
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_THROW(m.append_row(std::vector<float>{1}), std::invalid_argument);
  EXPECT_EQ(m.head(1).data(), (std::vector<float>{1, 2}));
  EXPECT_EQ(m.head(5).rows(), 2u);
  EXPECT_THROW(Matrix(2, 2, std::vector<float>{1}), std::invalid_argument);
}

}  // namespace
}  // namespace tasr
