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

#include "tasr/model_io.h"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tasr {

namespace {

using json = nlohmann::json;

constexpr const char* kModelMagic = "TAMODEL v1";
constexpr const char* kFeatsMagic = "FEATS v1";
constexpr const char* kPostMagic = "CTCPOST v1";

struct TensorRef {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float>* data;
  float scale;      // half-width of the random init range
  float center = 0;  // 1 for norm gains
};

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

float fan_in_scale(std::size_t fan_in) { return 1.0f / std::sqrt(static_cast<float>(fan_in)); }

void add_norm(std::vector<TensorRef>& t, const std::string& name, NormParams& n, std::size_t d) {
  t.push_back({name + ".gain", {d}, &n.gain, 0.1f, 1.0f});
  t.push_back({name + ".bias", {d}, &n.bias, 0.1f});
}

void add_mha(std::vector<TensorRef>& t, const std::string& name, MhaParams& m, std::size_t d) {
  const float s = fan_in_scale(d);
  t.push_back({name + ".w_q", {d, d}, &m.w_q.data(), s});
  t.push_back({name + ".w_k", {d, d}, &m.w_k.data(), s});
  t.push_back({name + ".w_v", {d, d}, &m.w_v.data(), s});
  t.push_back({name + ".w_h", {d, d}, &m.w_h.data(), s});
}

void add_ff(std::vector<TensorRef>& t, const std::string& name, FeedForwardParams& f,
            std::size_t d, std::size_t d_ff) {
  t.push_back({name + ".w1", {d, d_ff}, &f.w1.data(), fan_in_scale(d)});
  t.push_back({name + ".b1", {d_ff}, &f.b1, fan_in_scale(d)});
  t.push_back({name + ".w2", {d_ff, d}, &f.w2.data(), fan_in_scale(d_ff)});
  t.push_back({name + ".b2", {d}, &f.b2, fan_in_scale(d_ff)});
}

void add_conv(std::vector<TensorRef>& t, const std::string& name, ConvKernel& k) {
  const float s = fan_in_scale(k.in_channels * k.kernel_t * k.kernel_f);
  t.push_back({name + ".weight", {k.out_channels, k.in_channels, k.kernel_t, k.kernel_f},
               &k.weight, s});
  t.push_back({name + ".bias", {k.out_channels}, &k.bias, s});
}

// Every tensor of the model in archive order.
std::vector<TensorRef> tensor_table(ModelParams& m) {
  const ModelConfig& c = m.config;
  const std::size_t d = c.d_model;
  std::vector<TensorRef> t;
  add_conv(t, "cnn.conv1", m.encoder.conv1);
  add_conv(t, "cnn.conv2", m.encoder.conv2);
  t.push_back({"cnn.proj.weight", {m.encoder.proj_w.rows(), d}, &m.encoder.proj_w.data(),
               fan_in_scale(m.encoder.proj_w.rows())});
  t.push_back({"cnn.proj.bias", {d}, &m.encoder.proj_b, fan_in_scale(m.encoder.proj_w.rows())});
  for (std::size_t e = 0; e < c.e_layers; ++e) {
    auto& l = m.encoder.layers[e];
    const std::string p = "enc." + std::to_string(e);
    add_norm(t, p + ".norm_mha", l.norm_mha, d);
    add_mha(t, p + ".mha", l.mha, d);
    add_norm(t, p + ".norm_ff", l.norm_ff, d);
    add_ff(t, p + ".ff", l.ff, d, c.d_ff);
  }
  add_norm(t, "enc.final_norm", m.encoder.final_norm, d);
  t.push_back({"dec.embed", {c.vocab_size, d}, &m.decoder.embed.data(), 1.0f});
  for (std::size_t l = 0; l < c.d_layers; ++l) {
    auto& layer = m.decoder.layers[l];
    const std::string p = "dec." + std::to_string(l);
    add_norm(t, p + ".norm_self", layer.norm_self, d);
    add_mha(t, p + ".self_mha", layer.self_mha, d);
    add_norm(t, p + ".norm_src", layer.norm_src, d);
    add_mha(t, p + ".src_mha", layer.src_mha, d);
    add_norm(t, p + ".norm_ff", layer.norm_ff, d);
    add_ff(t, p + ".ff", layer.ff, d, c.d_ff);
  }
  add_norm(t, "dec.final_norm", m.decoder.final_norm, d);
  t.push_back({"dec.out.weight", {d, c.vocab_size}, &m.decoder.out_w.data(), fan_in_scale(d)});
  t.push_back({"dec.out.bias", {c.vocab_size}, &m.decoder.out_b, fan_in_scale(d)});
  t.push_back({"ctc.weight", {d, c.vocab_size + 1}, &m.ctc.w.data(), fan_in_scale(d)});
  t.push_back({"ctc.bias", {c.vocab_size + 1}, &m.ctc.b, fan_in_scale(d)});
  return t;
}

std::string block_of(const std::string& name) {
  std::size_t idx = 0;
  auto numbered = [&](const std::string& prefix) {
    if (name.rfind(prefix, 0) != 0) return false;
    const std::size_t end = name.find('.', prefix.size());
    const std::string num = name.substr(prefix.size(), end - prefix.size());
    if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos) return false;
    idx = std::stoul(num);
    return true;
  };
  if (numbered("enc.")) return "encoder layer " + std::to_string(idx);
  if (numbered("dec.")) return "decoder layer " + std::to_string(idx);
  return name.substr(0, name.find('.'));
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}
std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

// Splits off the next '\n'-terminated line starting at `pos`.
std::string next_line(const std::string& bytes, std::size_t& pos, const std::string& source) {
  const std::size_t nl = bytes.find('\n', pos);
  if (nl == std::string::npos) throw std::runtime_error(source + ": truncated header");
  std::string line = bytes.substr(pos, nl - pos);
  pos = nl + 1;
  return line;
}

void check_payload(std::size_t expected, std::size_t actual, const std::string& source) {
  if (expected != actual) {
    throw std::runtime_error(source + ": truncated payload: expected " + std::to_string(expected) +
                             " bytes, found " + std::to_string(actual));
  }
}

json config_to_json(const ModelConfig& c) {
  return json{{"e_layers", c.e_layers},     {"d_layers", c.d_layers},
              {"d_model", c.d_model},       {"d_ff", c.d_ff},
              {"heads", c.heads},           {"vocab_size", c.vocab_size},
              {"feat_dim", c.feat_dim},     {"cnn_channels1", c.cnn_channels1},
              {"cnn_channels2", c.cnn_channels2}, {"sos_id", c.sos_id},
              {"eos_id", c.eos_id},         {"dropout", c.dropout}};
}

template <typename T>
T config_field(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key)) throw std::runtime_error(source + ": manifest lacks config." + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error(source + ": bad value for config." + key);
  }
}

ModelConfig config_from_json(const json& j, const std::string& source) {
  ModelConfig c;
  c.e_layers = config_field<std::size_t>(j, "e_layers", source);
  c.d_layers = config_field<std::size_t>(j, "d_layers", source);
  c.d_model = config_field<std::size_t>(j, "d_model", source);
  c.d_ff = config_field<std::size_t>(j, "d_ff", source);
  c.heads = config_field<std::size_t>(j, "heads", source);
  c.vocab_size = config_field<std::size_t>(j, "vocab_size", source);
  c.feat_dim = config_field<std::size_t>(j, "feat_dim", source);
  c.cnn_channels1 = config_field<std::size_t>(j, "cnn_channels1", source);
  c.cnn_channels2 = config_field<std::size_t>(j, "cnn_channels2", source);
  c.sos_id = config_field<int>(j, "sos_id", source);
  c.eos_id = config_field<int>(j, "eos_id", source);
  c.dropout = config_field<float>(j, "dropout", source);
  return c;
}

ConvKernel conv_shape(std::size_t out, std::size_t in) {
  ConvKernel k;
  k.out_channels = out;
  k.in_channels = in;
  k.weight.assign(out * in * k.kernel_t * k.kernel_f, 0.0f);
  k.bias.assign(out, 0.0f);
  return k;
}

NormParams norm_shape(std::size_t d) { return {std::vector<float>(d, 1.0f), std::vector<float>(d, 0.0f)}; }

MhaParams mha_shape(std::size_t d, std::size_t heads) {
  MhaParams m;
  m.w_q = m.w_k = m.w_v = m.w_h = Matrix(d, d);
  m.heads = heads;
  return m;
}

FeedForwardParams ff_shape(std::size_t d, std::size_t d_ff) {
  return {Matrix(d, d_ff), std::vector<float>(d_ff), Matrix(d_ff, d), std::vector<float>(d)};
}

}  // namespace

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("model config: " + msg); };
  if (e_layers == 0) fail("E must be >= 1");
  if (d_layers == 0) fail("D must be >= 1");
  if (d_model == 0 || heads == 0 || d_model % heads != 0) fail("d_model must be divisible by d_h");
  if (d_ff == 0 || feat_dim == 0 || cnn_channels1 == 0 || cnn_channels2 == 0) {
    fail("dimensions must be positive");
  }
  if (vocab_size < 2) fail("vocabulary needs <sos> and at least one label");
  if (sos_id < 0 || static_cast<std::size_t>(sos_id) >= vocab_size) fail("sos_id out of range");
  if (eos_id < -1 || eos_id == sos_id ||
      (eos_id >= 0 && static_cast<std::size_t>(eos_id) >= vocab_size)) {
    fail("eos_id out of range");
  }
}

ModelConfig tiny_config(std::size_t e_layers, std::size_t d_layers, std::size_t d_model,
                        std::size_t labels, std::size_t feat_dim) {
  ModelConfig c;
  c.e_layers = e_layers;
  c.d_layers = d_layers;
  c.d_model = d_model;
  c.d_ff = 2 * d_model;
  c.heads = d_model % 2 == 0 ? 2 : 1;
  c.vocab_size = labels + 2;
  c.feat_dim = feat_dim;
  c.cnn_channels1 = std::max<std::size_t>(1, d_model / 4);
  c.cnn_channels2 = std::max<std::size_t>(1, d_model / 2);
  c.sos_id = static_cast<int>(labels);
  c.eos_id = static_cast<int>(labels) + 1;
  return c;
}

ModelParams allocate_model(const ModelConfig& config) {
  config.validate();
  const std::size_t d = config.d_model;
  ModelParams m;
  m.config = config;

  EncoderParams& enc = m.encoder;
  enc.feat_dim = config.feat_dim;
  enc.d_model = d;
  enc.d_ff = config.d_ff;
  enc.heads = config.heads;
  enc.dropout = config.dropout;
  enc.conv1 = conv_shape(config.cnn_channels1, 1);
  enc.conv2 = conv_shape(config.cnn_channels2, config.cnn_channels1);
  const std::size_t flat = config.cnn_channels2 * enc_cnn_output_freq(config.feat_dim);
  enc.proj_w = Matrix(flat, d);
  enc.proj_b.assign(d, 0.0f);
  for (std::size_t e = 0; e < config.e_layers; ++e) {
    enc.layers.push_back({norm_shape(d), mha_shape(d, config.heads), norm_shape(d),
                          ff_shape(d, config.d_ff)});
  }
  enc.final_norm = norm_shape(d);

  DecoderParams& dec = m.decoder;
  dec.vocab_size = config.vocab_size;
  dec.d_model = d;
  dec.sos_id = config.sos_id;
  dec.eos_id = config.eos_id;
  dec.embed = Matrix(config.vocab_size, d);
  for (std::size_t l = 0; l < config.d_layers; ++l) {
    dec.layers.push_back({norm_shape(d), mha_shape(d, config.heads), norm_shape(d),
                          mha_shape(d, config.heads), norm_shape(d), ff_shape(d, config.d_ff)});
  }
  dec.final_norm = norm_shape(d);
  dec.out_w = Matrix(d, config.vocab_size);
  dec.out_b.assign(config.vocab_size, 0.0f);

  m.ctc.w = Matrix(d, config.vocab_size + 1);
  m.ctc.b.assign(config.vocab_size + 1, 0.0f);
  m.ctc.suppressed.assign(config.vocab_size + 1, 0);
  m.ctc.suppressed[ctc_column(config.sos_id)] = 1;
  if (config.eos_id >= 0) m.ctc.suppressed[ctc_column(config.eos_id)] = 1;
  return m;
}

ModelParams random_model(const ModelConfig& config, std::uint64_t seed) {
  ModelParams m = allocate_model(config);
  std::mt19937_64 rng(seed);
  for (auto& t : tensor_table(m)) {
    for (float& v : *t.data) {
      // 53 random bits mapped to [-1, 1); std distributions are not portable.
      const double u = static_cast<double>(rng() >> 11) * 0x1p-53 * 2.0 - 1.0;
      v = t.center + t.scale * static_cast<float>(u);
    }
  }
  return m;
}

std::string serialize_model(const ModelParams& model) {
  // The table only hands out pointers; nothing below writes through them.
  auto table = tensor_table(const_cast<ModelParams&>(model));
  json manifest;
  manifest["config"] = config_to_json(model.config);
  manifest["tensors"] = json::array();
  std::string blob;
  for (const auto& t : table) {
    if (t.data->size() != element_count(t.shape)) {
      throw std::invalid_argument("tensor " + t.name + " does not match its shape " +
                                  shape_string(t.shape));
    }
    manifest["tensors"].push_back({{"name", t.name}, {"shape", t.shape}, {"offset", blob.size()}});
    for (float v : *t.data) put_u32(blob, std::bit_cast<std::uint32_t>(v));
  }
  const std::string text = manifest.dump();
  return std::string(kModelMagic) + "\n" + std::to_string(text.size()) + "\n" + text + blob;
}

void save_model(const ModelParams& model, const std::string& path) {
  write_file(path, serialize_model(model));
}

ModelParams parse_model(const std::string& bytes, const std::string& source) {
  std::size_t pos = 0;
  if (next_line(bytes, pos, source) != kModelMagic) {
    throw std::runtime_error(source + ": bad magic (expected \"" + kModelMagic + "\")");
  }
  const std::string len_line = next_line(bytes, pos, source);
  std::size_t len = 0;
  try {
    std::size_t used = 0;
    len = std::stoul(len_line, &used);
    if (used != len_line.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::runtime_error(source + ": bad manifest length '" + len_line + "'");
  }
  if (bytes.size() - pos < len) throw std::runtime_error(source + ": truncated manifest");
  json manifest;
  try {
    manifest = json::parse(bytes.substr(pos, len));
  } catch (const json::exception& e) {
    throw std::runtime_error(source + ": bad manifest: " + e.what());
  }
  pos += len;
  if (!manifest.contains("config") || !manifest.contains("tensors") ||
      !manifest["tensors"].is_array()) {
    throw std::runtime_error(source + ": manifest needs 'config' and 'tensors'");
  }
  const ModelConfig config = config_from_json(manifest["config"], source);
  ModelParams m;
  try {
    m = allocate_model(config);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(source + ": " + e.what());
  }

  struct Stored {
    std::vector<std::size_t> shape;
    std::size_t offset;
  };
  std::map<std::string, Stored> stored;
  for (const auto& t : manifest["tensors"]) {
    try {
      stored[t.at("name").get<std::string>()] = {t.at("shape").get<std::vector<std::size_t>>(),
                                                 t.at("offset").get<std::size_t>()};
    } catch (const json::exception&) {
      throw std::runtime_error(source + ": malformed tensor entry " + t.dump());
    }
  }
  const std::size_t blob_size = bytes.size() - pos;
  const char* blob = bytes.data() + pos;
  auto table = tensor_table(m);
  for (auto& t : table) {
    auto it = stored.find(t.name);
    if (it == stored.end()) {
      throw std::runtime_error(source + ": missing tensor " + t.name + " (" + block_of(t.name) +
                               ")");
    }
    if (it->second.shape != t.shape) {
      throw std::runtime_error(source + ": tensor " + t.name + " has shape " +
                               shape_string(it->second.shape) + ", expected " +
                               shape_string(t.shape));
    }
    const std::size_t n = element_count(t.shape);
    if (it->second.offset > blob_size || (blob_size - it->second.offset) / 4 < n) {
      throw std::runtime_error(source + ": tensor " + t.name + " runs past the end of the file");
    }
    const char* p = blob + it->second.offset;
    for (std::size_t i = 0; i < n; ++i) (*t.data)[i] = std::bit_cast<float>(get_u32(p + 4 * i));
    stored.erase(it);
  }
  if (!stored.empty()) {
    throw std::runtime_error(source + ": unexpected tensor " + stored.begin()->first);
  }
  return m;
}

ModelParams load_model(const std::string& path) { return parse_model(read_file(path), path); }

// ---------------------------------------------------------------------------
// Vocabulary

Vocab Vocab::parse(const std::string& text, const std::string& source) {
  Vocab v;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("#!vocab", 0) == 0) {
      std::istringstream opts(line.substr(7));
      std::string opt;
      while (opts >> opt) {
        if (opt.rfind("marker=", 0) == 0) {
          v.marker_ = opt.substr(7);
        } else {
          throw std::runtime_error(source + ":1: unknown vocab option '" + opt + "'");
        }
      }
      continue;
    }
    if (line.empty()) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) + ": empty token");
    }
    const int id = static_cast<int>(v.tokens_.size());
    if (!v.ids_.emplace(line, id).second) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) + ": duplicate token '" +
                               line + "'");
    }
    v.tokens_.push_back(line);
  }
  if (auto it = v.ids_.find("<sos>"); it != v.ids_.end()) {
    v.sos_id_ = it->second;
  } else {
    throw std::runtime_error(source + ": vocabulary lacks <sos>");
  }
  if (auto it = v.ids_.find("<eos>"); it != v.ids_.end()) v.eos_id_ = it->second;
  return v;
}

Vocab Vocab::load(const std::string& path) { return parse(read_file(path), path); }

const std::string& Vocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw std::out_of_range("token id " + std::to_string(id) + " outside the vocabulary");
  }
  return tokens_[id];
}

std::string Vocab::detokenize(const Labels& labels) const {
  std::string joined;
  for (int id : labels) joined += token(id);
  if (!marker_.empty()) {
    for (std::size_t p = joined.find(marker_); p != std::string::npos;
         p = joined.find(marker_, p + 1)) {
      joined.replace(p, marker_.size(), " ");
    }
  }
  const auto b = joined.find_first_not_of(' ');
  if (b == std::string::npos) return {};
  return joined.substr(b, joined.find_last_not_of(' ') - b + 1);
}

// ---------------------------------------------------------------------------
// Features and posteriorgrams

std::string serialize_features(const FeatureMatrix& feats) {
  char shift[64];
  std::snprintf(shift, sizeof(shift), "%.17g", feats.frame_shift_ms);
  std::string out = std::string(kFeatsMagic) + "\n" + std::to_string(feats.frames.rows()) + " " +
                    std::to_string(feats.frames.cols()) + " " + shift + "\n";
  for (float v : feats.frames.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

void save_features(const FeatureMatrix& feats, const std::string& path) {
  write_file(path, serialize_features(feats));
}

FeatureMatrix parse_features(const std::string& bytes, const std::string& source) {
  std::size_t pos = 0;
  if (next_line(bytes, pos, source) != kFeatsMagic) {
    throw std::runtime_error(source + ": bad magic (expected \"" + kFeatsMagic + "\")");
  }
  std::istringstream dims(next_line(bytes, pos, source));
  std::size_t t = 0, d = 0;
  double shift = 0;
  std::string rest;
  if (!(dims >> t >> d >> shift) || (dims >> rest)) {
    throw std::runtime_error(source + ": expected '<T> <d_feat> <frame_shift_ms>'");
  }
  if (t == 0) throw std::runtime_error(source + ": empty utterance");
  if (d == 0 || !(shift > 0)) throw std::runtime_error(source + ": bad feature dimensions");
  check_payload(t * d * 4, bytes.size() - pos, source);
  FeatureMatrix f;
  f.frame_shift_ms = shift;
  f.frames = Matrix(t, d);
  for (std::size_t i = 0; i < t * d; ++i) {
    f.frames.data()[i] = std::bit_cast<float>(get_u32(bytes.data() + pos + 4 * i));
  }
  return f;
}

FeatureMatrix load_features(const std::string& path) {
  return parse_features(read_file(path), path);
}

void save_posteriorgram(const Posteriorgram& post, const std::string& path) {
  std::string out = std::string(kPostMagic) + "\n" + std::to_string(post.frames()) + " " +
                    std::to_string(post.width()) + "\n";
  for (double v : post.matrix().data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  write_file(path, out);
}

Posteriorgram parse_posteriorgram(const std::string& bytes, const std::string& source) {
  std::size_t pos = 0;
  if (next_line(bytes, pos, source) != kPostMagic) {
    throw std::runtime_error(source + ": bad magic (expected \"" + kPostMagic + "\")");
  }
  std::istringstream dims(next_line(bytes, pos, source));
  std::size_t n = 0, w = 0;
  std::string rest;
  if (!(dims >> n >> w) || (dims >> rest)) {
    throw std::runtime_error(source + ": expected '<N> <V+1>'");
  }
  if (w < 2) throw std::runtime_error(source + ": posteriorgram needs a blank and a label column");
  check_payload(n * w * 8, bytes.size() - pos, source);
  std::vector<double> data(n * w);
  for (std::size_t i = 0; i < n * w; ++i) {
    data[i] = std::bit_cast<double>(get_u64(bytes.data() + pos + 8 * i));
  }
  return Posteriorgram(BasicMatrix<double>(n, w, std::move(data)));
}

Posteriorgram load_posteriorgram(const std::string& path) {
  return parse_posteriorgram(read_file(path), path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("short write to " + path);
}

}  // namespace tasr
