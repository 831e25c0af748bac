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

namespace tasr {

double log_sum_exp(std::span<const double> values) {
  double m = kLogZero;
  for (double v : values) m = std::max(m, v);
  if (m == kLogZero) return kLogZero;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

float dot(std::span<const float> a, std::span<const float> b) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void matvec_row(std::span<const float> in, const Matrix& w, std::span<const float> bias,
                std::span<float> out) {
  if (in.size() != w.rows() || out.size() != w.cols()) {
    throw std::invalid_argument("matvec_row: dimension mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0f);
  // k-outer keeps each output element summed in k order.
  for (std::size_t k = 0; k < in.size(); ++k) {
    const float a = in[k];
    auto wr = w.row(k);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += a * wr[j];
  }
  if (!bias.empty()) {
    if (bias.size() != out.size()) throw std::invalid_argument("matvec_row: bias mismatch");
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += bias[j];
  }
}

Matrix affine(const Matrix& a, const Matrix& b, std::span<const float> bias) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) matvec_row(a.row(i), b, bias, out.row(i));
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) { return affine(a, b, {}); }

void relu_inplace(std::span<float> values) {
  for (float& v : values) v = v > 0.0f ? v : 0.0f;
}

Matrix relu(Matrix m) {
  relu_inplace(m.data());
  return m;
}

void softmax_row(std::span<const float> in, std::span<float> out) {
  float m = kMaskValue;
  for (float v : in) m = std::max(m, v);
  if (m == kMaskValue) throw std::invalid_argument("empty attention row");
  double sum = 0.0;
  for (std::size_t j = 0; j < in.size(); ++j) {
    out[j] = std::exp(in[j] - m);
    sum += out[j];
  }
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = static_cast<float>(out[j] / sum);
}

Matrix softmax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) softmax_row(m.row(i), out.row(i));
  return out;
}

std::vector<double> log_softmax(std::span<const float> logits, std::span<const std::uint8_t> suppressed) {
  if (!suppressed.empty() && suppressed.size() != logits.size()) {
    throw std::invalid_argument("log_softmax: suppression mask width mismatch");
  }
  auto live = [&](std::size_t j) { return suppressed.empty() || suppressed[j] == 0; };
  double m = kLogZero;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (live(j)) m = std::max(m, static_cast<double>(logits[j]));
  }
  if (m == kLogZero) throw std::invalid_argument("log_softmax: no live entries");
  double sum = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (live(j)) sum += std::exp(static_cast<double>(logits[j]) - m);
  }
  const double norm = m + std::log(sum);
  std::vector<double> out(logits.size(), kLogZero);
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (live(j)) out[j] = static_cast<double>(logits[j]) - norm;
  }
  return out;
}

void layer_norm_row(std::span<const float> in, std::span<const float> gain,
                    std::span<const float> bias, float eps, std::span<float> out) {
  const std::size_t n = in.size();
  if (gain.size() != n || bias.size() != n || out.size() != n) {
    throw std::invalid_argument("layer_norm: gain/bias length must equal row width");
  }
  double mean = 0.0;
  for (float v : in) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (float v : in) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double inv = 1.0 / std::sqrt(var + static_cast<double>(eps));
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = static_cast<float>((in[j] - mean) * inv) * gain[j] + bias[j];
  }
}

Matrix layer_norm(const Matrix& m, std::span<const float> gain, std::span<const float> bias,
                  float eps) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) layer_norm_row(m.row(i), gain, bias, eps, out.row(i));
  return out;
}

Volume conv2d(const Volume& input, const ConvKernel& kernel, std::size_t stride,
              std::size_t pad) {
  if (input.channels != kernel.in_channels) {
    throw std::invalid_argument("conv2d: input has " + std::to_string(input.channels) +
                                " channels, kernel expects " +
                                std::to_string(kernel.in_channels));
  }
  const std::size_t t_out = conv_output_length(input.time, stride, pad, kernel.kernel_t);
  const std::size_t f_out = conv_output_length(input.freq, stride, pad, kernel.kernel_f);
  auto at = [&](std::size_t c, long t, long f) -> float {
    if (t < 0 || f < 0 || t >= static_cast<long>(input.time) ||
        f >= static_cast<long>(input.freq)) {
      return 0.0f;
    }
    return input.at(c, static_cast<std::size_t>(t), static_cast<std::size_t>(f));
  };
  Volume out(kernel.out_channels, t_out, f_out);
  std::vector<float> row(kernel.out_channels * f_out);
  for (std::size_t t = 0; t < t_out; ++t) {
    conv2d_time_row(at, input.freq, kernel, stride, pad, t, row);
    for (std::size_t o = 0; o < kernel.out_channels; ++o) {
      for (std::size_t f = 0; f < f_out; ++f) out.at(o, t, f) = row[o * f_out + f];
    }
  }
  return out;
}

}  // namespace tasr
