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

// Dense numeric kernels shared by the encoder, decoder and CTC head.
//
// Every reduction runs in a fixed left-to-right order and every matrix row is
// computed independently of the other rows. The streaming code path relies on
// this: computing row i alone yields the same bits as computing it as part of
// a full matrix.

#ifndef TASR_NUMCORE_H_
#define TASR_NUMCORE_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tasr {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline constexpr float kMaskValue = -std::numeric_limits<float>::infinity();

/// Row-major dense matrix.
template <typename T>
class BasicMatrix {
 public:
  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  BasicMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("matrix data length " + std::to_string(data_.size()) +
                                  " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  T operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  /// Appends one row; the row length must equal cols() unless the matrix is
  /// still column-less and empty.
  void append_row(std::span<const T> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) throw std::invalid_argument("append_row: width mismatch");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  /// First `count` rows as a new matrix.
  BasicMatrix head(std::size_t count) const {
    count = std::min(count, rows_);
    return BasicMatrix(count, cols_,
                       std::vector<T>(data_.begin(), data_.begin() + count * cols_));
  }

  friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = BasicMatrix<float>;

/// 3-D array laid out [channels][time][freq].
struct Volume {
  std::size_t channels = 0;
  std::size_t time = 0;
  std::size_t freq = 0;
  std::vector<float> data;

  Volume() = default;
  Volume(std::size_t c, std::size_t t, std::size_t f)
      : channels(c), time(t), freq(f), data(c * t * f, 0.0f) {}

  float& at(std::size_t c, std::size_t t, std::size_t f) {
    return data[(c * time + t) * freq + f];
  }
  float at(std::size_t c, std::size_t t, std::size_t f) const {
    return data[(c * time + t) * freq + f];
  }
  friend bool operator==(const Volume&, const Volume&) = default;
};

/// Convolution weights laid out [out][in][kt][kf] plus one bias per output
/// channel (empty bias means zero).
struct ConvKernel {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t kernel_t = 3;
  std::size_t kernel_f = 3;
  std::vector<float> weight;
  std::vector<float> bias;

  float w(std::size_t o, std::size_t i, std::size_t kt, std::size_t kf) const {
    return weight[((o * in_channels + i) * kernel_t + kt) * kernel_f + kf];
  }
};

// ---------------------------------------------------------------------------
// Log-domain scalars.

/// log(e^a + e^b) without overflow; exact max(a, b) when either side is -inf.
inline double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

/// Log-sum-exp over a span, summed left to right after max subtraction.
double log_sum_exp(std::span<const double> values);

// ---------------------------------------------------------------------------
// Matrix kernels.

float dot(std::span<const float> a, std::span<const float> b);

/// out = in * w (+ bias). `out` must have w.cols() entries.
void matvec_row(std::span<const float> in, const Matrix& w, std::span<const float> bias,
                std::span<float> out);

Matrix matmul(const Matrix& a, const Matrix& b);
/// a * b with `bias` added to every row.
Matrix affine(const Matrix& a, const Matrix& b, std::span<const float> bias);

void relu_inplace(std::span<float> values);
Matrix relu(Matrix m);

/// Softmax of one row into `out`. Throws when every entry is -inf.
void softmax_row(std::span<const float> in, std::span<float> out);
Matrix softmax_rows(const Matrix& m);

/// Log-softmax in double precision of a float row, with optional per-column
/// suppression (suppressed columns get exactly -inf).
std::vector<double> log_softmax(std::span<const float> logits,
                                std::span<const std::uint8_t> suppressed = {});

void layer_norm_row(std::span<const float> in, std::span<const float> gain,
                    std::span<const float> bias, float eps, std::span<float> out);
Matrix layer_norm(const Matrix& m, std::span<const float> gain, std::span<const float> bias,
                  float eps = 1e-12f);

// ---------------------------------------------------------------------------
// Convolution.

/// Output length of a 3-tap strided axis with symmetric padding.
inline std::size_t conv_output_length(std::size_t length, std::size_t stride, std::size_t pad,
                                      std::size_t kernel = 3) {
  if (length + 2 * pad < kernel) throw std::invalid_argument("input too short");
  return (length + 2 * pad - kernel) / stride + 1;
}

/// Computes all channels and frequency bins of output time row `t` from an
/// accessor `input(c, t, f)` that returns 0 outside the valid range. Pure
/// cross-correlation; no activation. `out` is laid out [channel][freq].
template <typename Accessor>
void conv2d_time_row(const Accessor& input, std::size_t freq_in, const ConvKernel& k,
                     std::size_t stride, std::size_t pad, std::size_t t,
                     std::span<float> out) {
  const std::size_t freq_out = conv_output_length(freq_in, stride, pad, k.kernel_f);
  const long t0 = static_cast<long>(t * stride) - static_cast<long>(pad);
  for (std::size_t o = 0; o < k.out_channels; ++o) {
    for (std::size_t fo = 0; fo < freq_out; ++fo) {
      const long f0 = static_cast<long>(fo * stride) - static_cast<long>(pad);
      float acc = 0.0f;
      for (std::size_t i = 0; i < k.in_channels; ++i) {
        for (std::size_t kt = 0; kt < k.kernel_t; ++kt) {
          for (std::size_t kf = 0; kf < k.kernel_f; ++kf) {
            acc += k.w(o, i, kt, kf) *
                   input(i, t0 + static_cast<long>(kt), f0 + static_cast<long>(kf));
          }
        }
      }
      if (!k.bias.empty()) acc += k.bias[o];
      out[o * freq_out + fo] = acc;
    }
  }
}

Volume conv2d(const Volume& input, const ConvKernel& kernel, std::size_t stride,
              std::size_t pad);

}  // namespace tasr

#endif  // TASR_NUMCORE_H_
