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

#include "test_support.h"

#include <cmath>
#include <cstdio>
#include <limits>

namespace tasr::testing {

double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
}

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
  Matrix m(rows, cols);
  for (float& v : m.data()) v = static_cast<float>(uniform(rng, -scale, scale));
  return m;
}

FeatureMatrix random_features(Rng& rng, std::size_t frames, std::size_t dim) {
  return FeatureMatrix{random_matrix(rng, frames, dim), 10.0};
}

Posteriorgram random_posteriorgram(Rng& rng, std::size_t frames, std::size_t width,
                                   const std::vector<std::uint8_t>& suppressed, double spread) {
  Posteriorgram post(0, width);
  for (std::size_t n = 0; n < frames; ++n) {
    std::vector<double> logits(width);
    double z = kLogZero;
    for (std::size_t c = 0; c < width; ++c) {
      logits[c] = (!suppressed.empty() && suppressed[c]) ? kLogZero : uniform(rng, -spread, spread);
      z = log_add(z, logits[c]);
    }
    for (auto& v : logits) v = v == kLogZero ? kLogZero : v - z;
    post.append_row(logits);
  }
  return post;
}

namespace {

// Calls fn(path, log prob) for every path with non-zero probability.
template <typename Fn>
void for_each_path(const Posteriorgram& post, Fn fn) {
  const std::size_t n = post.frames();
  const std::size_t w = post.width();
  std::vector<std::size_t> cols(n, 0);
  while (true) {
    double lp = 0.0;
    std::vector<int> path(n);
    for (std::size_t t = 0; t < n && lp != kLogZero; ++t) {
      const double v = post.row(t)[cols[t]];
      lp = v == kLogZero ? kLogZero : lp + v;
      path[t] = static_cast<int>(cols[t]) - 1;
    }
    if (lp != kLogZero) fn(path, lp);
    std::size_t t = 0;
    while (t < n && ++cols[t] == w) cols[t++] = 0;
    if (t == n) return;
  }
}

}  // namespace

std::map<Labels, double> brute_force_marginals(const Posteriorgram& post) {
  std::map<Labels, double> out;
  for_each_path(post, [&](const std::vector<int>& path, double lp) {
    auto [it, fresh] = out.emplace(ctc_collapse(path), lp);
    if (!fresh) it->second = log_add(it->second, lp);
  });
  return out;
}

double brute_force_best_path(const Posteriorgram& post, const Labels& labels) {
  double best = kLogZero;
  for_each_path(post, [&](const std::vector<int>& path, double lp) {
    if (lp > best && ctc_collapse(path) == labels) best = lp;
  });
  return best;
}

Matrix reference_unmasked_encoder(const Matrix& x0, const EncoderParams& params) {
  const std::size_t n = x0.rows();
  const std::size_t d = params.d_model;
  Matrix x = x0;
  for (const auto& layer : params.layers) {
    Matrix h(n, d), q(n, d), k(n, d), v(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      layer_norm_row(x.row(i), layer.norm_mha.gain, layer.norm_mha.bias, kLayerNormEps, h.row(i));
      matvec_row(h.row(i), layer.mha.w_q, {}, q.row(i));
      matvec_row(h.row(i), layer.mha.w_k, {}, k.row(i));
      matvec_row(h.row(i), layer.mha.w_v, {}, v.row(i));
    }
    const std::size_t dk = d / layer.mha.heads;
    const float scale = std::sqrt(static_cast<float>(dk));
    Matrix att(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<float> concat(d, 0.0f);
      for (std::size_t hd = 0; hd < layer.mha.heads; ++hd) {
        std::vector<float> logits(n), weights(n);
        for (std::size_t j = 0; j < n; ++j) {
          float s = 0.0f;
          for (std::size_t c = 0; c < dk; ++c) s += q(i, hd * dk + c) * k(j, hd * dk + c);
          logits[j] = s / scale;
        }
        softmax_row(logits, weights);
        for (std::size_t j = 0; j < n; ++j) {
          for (std::size_t c = 0; c < dk; ++c) concat[hd * dk + c] += weights[j] * v(j, hd * dk + c);
        }
      }
      matvec_row(concat, layer.mha.w_h, {}, att.row(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto row = x.row(i);
      for (std::size_t c = 0; c < d; ++c) row[c] += att(i, c);
      std::vector<float> hn(d), inner(params.d_ff), outer(d);
      layer_norm_row(row, layer.norm_ff.gain, layer.norm_ff.bias, kLayerNormEps, hn);
      matvec_row(hn, layer.ff.w1, layer.ff.b1, inner);
      for (float& z : inner) z = z > 0.0f ? z : 0.0f;
      matvec_row(inner, layer.ff.w2, layer.ff.b2, outer);
      for (std::size_t c = 0; c < d; ++c) row[c] += outer[c];
    }
  }
  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    layer_norm_row(x.row(i), params.final_norm.gain, params.final_norm.bias, kLayerNormEps,
                   out.row(i));
  }
  return out;
}

std::string random_bigram_arpa(Rng& rng, std::size_t labels) {
  // Words: <s>, </s> and ids 0..labels-1. <s> is context only.
  const std::size_t words = labels + 1;  // predictable words: ids then </s>
  auto name = [labels](std::size_t w) {
    return w == labels ? std::string("</s>") : std::to_string(w);
  };
  std::vector<double> uni(words);
  double z = 0.0;
  for (auto& p : uni) z += (p = uniform(rng, 0.1, 1.0));
  for (auto& p : uni) p /= z;

  struct Bigram {
    std::size_t ctx;  // labels + 1 stands for <s>
    std::size_t word;
    double p;
  };
  std::vector<Bigram> bigrams;
  std::vector<double> backoff(labels + 2, 1.0);
  for (std::size_t ctx = 0; ctx <= labels + 1; ++ctx) {
    if (ctx == labels) continue;  // </s> is never a context
    double explicit_mass = 0.0, unigram_mass = 0.0;
    std::vector<Bigram> local;
    for (std::size_t w = 0; w < words; ++w) {
      if (rng() % 2 == 0) continue;
      local.push_back({ctx, w, uniform(rng, 0.05, 0.4)});
      explicit_mass += local.back().p;
      unigram_mass += uni[w];
    }
    if (explicit_mass >= 0.95) {
      for (auto& b : local) b.p *= 0.9 / explicit_mass;
      explicit_mass = 0.9;
    }
    if (unigram_mass >= 1.0 - 1e-9) {
      // Every word is explicit: renormalize to exactly one, no backoff mass.
      for (auto& b : local) b.p /= explicit_mass;
      backoff[ctx] = 1.0;
    } else {
      backoff[ctx] = (1.0 - explicit_mass) / (1.0 - unigram_mass);
    }
    bigrams.insert(bigrams.end(), local.begin(), local.end());
  }

  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::string text = "\\data\\\nngram 1=" + std::to_string(words + 1) +
                     "\nngram 2=" + std::to_string(bigrams.size()) + "\n\n\\1-grams:\n";
  text += "-99\t<s>\t" + fmt(std::log10(backoff[labels + 1])) + "\n";
  for (std::size_t w = 0; w < words; ++w) {
    text += fmt(std::log10(uni[w])) + "\t" + name(w);
    if (w < labels) text += "\t" + fmt(std::log10(backoff[w]));
    text += "\n";
  }
  text += "\n\\2-grams:\n";
  for (const auto& b : bigrams) {
    const std::string ctx = b.ctx == labels + 1 ? "<s>" : name(b.ctx);
    text += fmt(std::log10(b.p)) + "\t" + ctx + " " + name(b.word) + "\n";
  }
  return text + "\n\\end\\\n";
}

OracleResult exhaustive_joint_search(const Posteriorgram& post, const EncoderStates& enc,
                                     const DecoderParams& dec, const LanguageModel& lm,
                                     const DecodeParams& params) {
  const std::size_t n_rows = enc.frames();
  OracleResult best;
  bool have = false;
  for (const auto& [labels, log_p_ctc] : brute_force_marginals(post)) {
    // A prefix first exists at the earliest frame that can emit it: one frame
    // per label plus a blank between repeated labels.
    double ta = 0.0;
    std::size_t frame = 0;
    Labels history;
    for (std::size_t l = 0; l < labels.size(); ++l) {
      frame += (l > 0 && labels[l] == labels[l - 1]) ? 2 : 1;
      const std::size_t nu = std::min(frame + params.eps_dec, n_rows);
      ta += decoder_log_posterior(enc, nu, history, dec)[labels[l]];
      history.push_back(labels[l]);
    }
    if (params.add_eos && dec.has_eos() && params.lambda != 1.0) {
      ta += decoder_log_posterior(enc, n_rows, labels, dec)[dec.eos_id];
    }
    double lm_logp = 0.0;
    LmState state = lm.start();
    for (int y : labels) {
      LmStep step = lm.extend(state, y);
      lm_logp += step.logp;
      state = step.state;
    }
    const double score = params.lambda * log_p_ctc + (1.0 - params.lambda) * ta +
                         params.alpha * lm_logp + params.beta * static_cast<double>(labels.size());
    const bool better = !have || score > best.score ||
                        (score == best.score && (labels.size() < best.labels.size() ||
                                                 (labels.size() == best.labels.size() &&
                                                  labels < best.labels)));
    if (better) {
      best = {labels, score};
      have = true;
    }
  }
  return best;
}

ModelParams tiny_model(std::uint64_t seed, std::size_t e_layers, std::size_t d_layers,
                       std::size_t d_model, std::size_t labels, std::size_t feat_dim) {
  return random_model(tiny_config(e_layers, d_layers, d_model, labels, feat_dim), seed);
}

DecodeParams saturated_params() {
  DecodeParams p;
  p.k_size = 1'000'000;
  p.p_size = 1'000'000;
  p.theta1 = 1e300;
  p.theta2 = 1e300;
  p.local_threshold = 0.0;
  return p;
}

}  // namespace tasr::testing
