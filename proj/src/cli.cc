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

#include "tasr/cli.h"

#include <cstdio>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tasr/joint_decode.h"
#include "tasr/lm.h"
#include "tasr/model_io.h"
#include "tasr/streaming.h"

namespace tasr {

namespace {

struct SearchFlags {
  DecodeParams params;
  std::string lm_path;
  bool trace = false;
};

void add_search_flags(CLI::App& cmd, SearchFlags& f) {
  cmd.add_option("--lm", f.lm_path, "ARPA language model");
  cmd.add_option("--lambda", f.params.lambda, "CTC weight in the joint score")->capture_default_str();
  cmd.add_option("--alpha0", f.params.alpha0, "LM weight for CTC prefix scores")->capture_default_str();
  cmd.add_option("--alpha", f.params.alpha, "LM weight for joint scores")->capture_default_str();
  cmd.add_option("--beta", f.params.beta, "insertion bonus per label")->capture_default_str();
  cmd.add_option("--k", f.params.k_size, "first beam size")->capture_default_str();
  cmd.add_option("--p", f.params.p_size, "second beam size")->capture_default_str();
  cmd.add_option("--theta1", f.params.theta1, "first beam width")->capture_default_str();
  cmd.add_option("--theta2", f.params.theta2, "second beam width")->capture_default_str();
  cmd.add_flag("--trace", f.trace, "print the per-frame search trace");
}

std::unique_ptr<LanguageModel> make_lm(const std::string& path, const Vocab& vocab) {
  // A one-word uniform model scores every label log 1 = 0, i.e. no LM.
  if (path.empty()) return std::make_unique<UniformLm>(1);
  return std::make_unique<NgramLm>(NgramLm::load(path, vocab.ids()));
}

void check_vocab(const Vocab& vocab, const ModelConfig& config) {
  if (vocab.size() != config.vocab_size) {
    throw std::runtime_error("vocabulary has " + std::to_string(vocab.size()) +
                             " tokens, model expects " + std::to_string(config.vocab_size));
  }
  if (vocab.sos_id() != config.sos_id || vocab.eos_id() != config.eos_id) {
    throw std::runtime_error("vocabulary <sos>/<eos> ids do not match the model");
  }
}

void print_result(std::ostream& out, const DecodeResult& r, const Vocab& vocab, bool trace) {
  if (trace) {
    for (const auto& t : r.trace) out << format_trace(t) << "\n";
  }
  out << vocab.detokenize(r.labels) << "\n";
}

std::vector<Matrix> chunks_of(const Matrix& frames, std::size_t chunk) {
  std::vector<Matrix> out;
  for (std::size_t start = 0; start < frames.rows(); start += chunk) {
    Matrix m(0, frames.cols());
    for (std::size_t r = start; r < std::min(frames.rows(), start + chunk); ++r) {
      m.append_row(frames.row(r));
    }
    out.push_back(std::move(m));
  }
  return out;
}

EncoderStates encode_chunked(const FeatureMatrix& feats, const EncoderParams& params,
                             LookAhead la, std::size_t chunk) {
  IncrementalEncoder enc(params, la);
  for (const auto& m : chunks_of(feats.frames, chunk)) enc.push(m);
  enc.finish();
  return EncoderStates{enc.states()};
}

int cmd_decode(const std::vector<std::string>& feature_paths, const std::string& model_path,
               const std::string& vocab_path, const std::string& eps_enc_text,
               std::size_t streaming, bool ctc_only, SearchFlags flags, std::ostream& out) {
  const ModelParams model = load_model(model_path);
  const Vocab vocab = Vocab::load(vocab_path);
  check_vocab(vocab, model.config);
  const auto lm = make_lm(flags.lm_path, vocab);
  const LookAhead la = LookAhead::parse(eps_enc_text);
  flags.params.validate();

  for (const auto& path : feature_paths) {
    const FeatureMatrix feats = load_features(path);
    DecodeResult result;
    if (ctc_only) {
      const EncoderStates enc = streaming > 0 ? encode_chunked(feats, model.encoder, la, streaming)
                                              : encode(feats, model.encoder, la);
      result = ctc_beam_search(ctc_posteriorgram(enc.states, model.ctc), *lm, flags.params);
    } else if (streaming > 0) {
      StreamingSession session(model, *lm, StreamConfig{la, flags.params.eps_dec, feats.frame_shift_ms},
                               flags.params);
      for (const auto& m : chunks_of(feats.frames, streaming)) session.push(m);
      result = session.finalize();
    } else {
      const EncoderStates enc = encode(feats, model.encoder, la);
      result = decode(enc, ctc_posteriorgram(enc.states, model.ctc), *lm, model.decoder,
                      flags.params);
    }
    print_result(out, result, vocab, flags.trace);
  }
  return 0;
}

std::string format_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming transformer speech recognition with joint CTC / triggered-attention "
               "decoding",
               "tasr"};
  app.require_subcommand(1);

  // decode
  auto* dec = app.add_subcommand("decode", "decode feature files with a model archive");
  std::string model_path, vocab_path, eps_enc = "inf";
  std::vector<std::string> features;
  std::size_t streaming = 0;
  bool ctc_only = false;
  SearchFlags dec_flags;
  dec->add_option("--model", model_path, "model archive")->required();
  dec->add_option("--vocab", vocab_path, "vocabulary file")->required();
  dec->add_option("--features", features, "FEATS v1 file (repeatable)")->required();
  dec->add_option("--eps-enc", eps_enc, "encoder look-ahead per layer (frames or 'inf')")
      ->capture_default_str();
  dec->add_option("--eps-dec", dec_flags.params.eps_dec, "decoder look-ahead (frames)")
      ->capture_default_str();
  dec->add_option("--streaming", streaming, "push features in chunks of this many frames");
  dec->add_flag("--ctc-only", ctc_only, "CTC prefix beam search without the attention decoder");
  add_search_flags(*dec, dec_flags);

  // ctc-decode
  auto* ctc = app.add_subcommand("ctc-decode", "CTC prefix beam search over CTCPOST v1 files");
  std::vector<std::string> posteriors;
  std::string ctc_vocab;
  SearchFlags ctc_flags;
  ctc->add_option("--posteriors", posteriors, "CTCPOST v1 file (repeatable)")->required();
  ctc->add_option("--vocab", ctc_vocab, "vocabulary file")->required();
  ctc->add_option("--local-threshold", ctc_flags.params.local_threshold,
                  "skip symbols below this frame probability")
      ->capture_default_str();
  add_search_flags(*ctc, ctc_flags);

  // latency
  auto* lat = app.add_subcommand("latency", "theoretical latency of a look-ahead setting");
  std::size_t lat_layers = 12;
  std::string lat_eps_enc = "1";
  StreamConfig lat_cfg;
  lat->add_option("--e-layers", lat_layers, "encoder layers")->capture_default_str();
  lat->add_option("--eps-enc", lat_eps_enc, "encoder look-ahead per layer")->capture_default_str();
  lat->add_option("--eps-dec", lat_cfg.eps_dec, "decoder look-ahead")->capture_default_str();
  lat->add_option("--frame-shift", lat_cfg.frame_shift_ms, "feature frame shift (ms)")
      ->capture_default_str();

  // random-model
  auto* gen = app.add_subcommand("random-model", "write a random model archive and vocabulary");
  std::string gen_out, gen_vocab;
  std::uint64_t gen_seed = 1;
  std::size_t gen_e = 2, gen_d = 1, gen_dm = 8, gen_labels = 3, gen_feat = 16;
  gen->add_option("--out", gen_out, "model archive to write")->required();
  gen->add_option("--vocab-out", gen_vocab, "vocabulary file to write")->required();
  gen->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  gen->add_option("--e-layers", gen_e, "encoder layers")->capture_default_str();
  gen->add_option("--d-layers", gen_d, "decoder layers")->capture_default_str();
  gen->add_option("--d-model", gen_dm, "model width")->capture_default_str();
  gen->add_option("--labels", gen_labels, "regular labels (sos/eos are added)")
      ->capture_default_str();
  gen->add_option("--feat-dim", gen_feat, "feature dimension")->capture_default_str();

  // random-features
  auto* feat = app.add_subcommand("random-features", "write random FEATS v1 features");
  std::string feat_out;
  std::uint64_t feat_seed = 1;
  std::size_t feat_frames = 40, feat_dim = 16;
  feat->add_option("--out", feat_out, "file to write")->required();
  feat->add_option("--frames", feat_frames, "frame count")->capture_default_str();
  feat->add_option("--dim", feat_dim, "feature dimension")->capture_default_str();
  feat->add_option("--seed", feat_seed, "random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help("", CLI::AppFormatMode::All);
    return 1;
  }

  try {
    if (*dec) {
      return cmd_decode(features, model_path, vocab_path, eps_enc, streaming, ctc_only, dec_flags,
                        out);
    }
    if (*ctc) {
      const Vocab vocab = Vocab::load(ctc_vocab);
      const auto lm = make_lm(ctc_flags.lm_path, vocab);
      for (const auto& path : posteriors) {
        const Posteriorgram post = load_posteriorgram(path);
        if (post.width() != vocab.size() + 1) {
          throw std::runtime_error(path + ": width " + std::to_string(post.width()) +
                                   " does not match vocabulary size + 1");
        }
        post.validate();
        print_result(out, ctc_beam_search(post, *lm, ctc_flags.params), vocab, ctc_flags.trace);
      }
      return 0;
    }
    if (*lat) {
      lat_cfg.eps_enc = LookAhead::parse(lat_eps_enc);
      out << "cnn_ms=" << format_ms(3.0 * lat_cfg.frame_shift_ms)
          << " encoder_ms=" << format_ms(encoder_latency_ms(lat_cfg, lat_layers))
          << " decoder_ms=" << format_ms(decoder_latency_ms(lat_cfg))
          << " total_ms=" << format_ms(theoretical_latency_ms(lat_cfg, lat_layers)) << "\n";
      return 0;
    }
    if (*gen) {
      const ModelConfig config = tiny_config(gen_e, gen_d, gen_dm, gen_labels, gen_feat);
      save_model(random_model(config, gen_seed), gen_out);
      std::string vocab;
      for (std::size_t i = 0; i < gen_labels; ++i) vocab += "▁t" + std::to_string(i) + "\n";
      write_file(gen_vocab, vocab + "<sos>\n<eos>\n");
      return 0;
    }
    if (*feat) {
      std::mt19937_64 rng(feat_seed);
      FeatureMatrix f;
      f.frames = Matrix(feat_frames, feat_dim);
      for (float& v : f.frames.data()) {
        v = static_cast<float>(static_cast<double>(rng() >> 11) * 0x1p-53 * 2.0 - 1.0);
      }
      save_features(f, feat_out);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace tasr
