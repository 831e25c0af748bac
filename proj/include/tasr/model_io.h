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

// Model archive, vocabulary and feature / posteriorgram file formats.
//
// Model archive layout:
//   "TAMODEL v1\n"
//   "<manifest byte length>\n"
//   JSON manifest: {"config": {...}, "tensors": [{"name", "shape", "offset"}]}
//   float32 little-endian tensor blobs, offsets relative to the first blob byte.

#ifndef TASR_MODEL_IO_H_
#define TASR_MODEL_IO_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tasr/ctc.h"
#include "tasr/decoder.h"
#include "tasr/encoder.h"

namespace tasr {

struct ModelConfig {
  std::size_t e_layers = 12;
  std::size_t d_layers = 6;
  std::size_t d_model = 256;
  std::size_t d_ff = 2048;
  std::size_t heads = 4;
  std::size_t vocab_size = 5000;  // includes <sos> and, when present, <eos>
  std::size_t feat_dim = 83;
  std::size_t cnn_channels1 = 64;
  std::size_t cnn_channels2 = 128;
  int sos_id = 4998;
  int eos_id = 4999;  // -1: none
  float dropout = 0.1f;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Tiny configuration for tests and demos; the last two ids are <sos>, <eos>.
ModelConfig tiny_config(std::size_t e_layers, std::size_t d_layers, std::size_t d_model,
                        std::size_t labels, std::size_t feat_dim);

struct ModelParams {
  ModelConfig config;
  EncoderParams encoder;
  DecoderParams decoder;
  CtcHead ctc;
};

/// Zero-filled parameters with every tensor shaped for `config`.
ModelParams allocate_model(const ModelConfig& config);

/// Uniform random weights from mt19937_64(seed); identical on every platform.
ModelParams random_model(const ModelConfig& config, std::uint64_t seed);

void save_model(const ModelParams& model, const std::string& path);
std::string serialize_model(const ModelParams& model);
ModelParams load_model(const std::string& path);
ModelParams parse_model(const std::string& bytes, const std::string& source = "<model>");

/// One token per line, line index = id. An optional first line
/// "#!vocab marker=<piece>" declares the word-boundary marker (default U+2581).
class Vocab {
 public:
  static Vocab parse(const std::string& text, const std::string& source = "<vocab>");
  static Vocab load(const std::string& path);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(int id) const;
  int sos_id() const { return sos_id_; }
  int eos_id() const { return eos_id_; }
  const std::string& marker() const { return marker_; }
  const std::unordered_map<std::string, int>& ids() const { return ids_; }

  /// Concatenates the pieces, turns each marker into a space and trims.
  std::string detokenize(const Labels& labels) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
  std::string marker_ = "▁";
  int sos_id_ = -1;
  int eos_id_ = -1;
};

/// "FEATS v1\n", "<T> <d_feat> <frame_shift_ms>\n", then T x d_feat float32 LE.
std::string serialize_features(const FeatureMatrix& feats);
void save_features(const FeatureMatrix& feats, const std::string& path);
FeatureMatrix load_features(const std::string& path);
FeatureMatrix parse_features(const std::string& bytes, const std::string& source = "<feats>");

/// "CTCPOST v1\n", "<N> <V+1>\n", then N x (V+1) float64 LE log-probabilities.
void save_posteriorgram(const Posteriorgram& post, const std::string& path);
Posteriorgram load_posteriorgram(const std::string& path);
Posteriorgram parse_posteriorgram(const std::string& bytes, const std::string& source = "<post>");

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace tasr

#endif  // TASR_MODEL_IO_H_
