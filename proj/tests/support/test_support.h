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

// Random instance generators and brute-force oracles shared by the tests.

#ifndef TASR_TESTS_TEST_SUPPORT_H_
#define TASR_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tasr/ctc.h"
#include "tasr/decoder.h"
#include "tasr/encoder.h"
#include "tasr/joint_decode.h"
#include "tasr/lm.h"
#include "tasr/model_io.h"

namespace tasr::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi);  // inclusive
Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0);
FeatureMatrix random_features(Rng& rng, std::size_t frames, std::size_t dim);

/// Rows are log-softmax of random logits; columns flagged in `suppressed`
/// get -inf.
Posteriorgram random_posteriorgram(Rng& rng, std::size_t frames, std::size_t width,
                                   const std::vector<std::uint8_t>& suppressed = {},
                                   double spread = 3.0);

/// Sum over all (width)^frames paths, grouped by collapsed label sequence.
std::map<Labels, double> brute_force_marginals(const Posteriorgram& post);

/// Best single path collapsing to `labels`; -inf when none does.
double brute_force_best_path(const Posteriorgram& post, const Labels& labels);

/// Plain unmasked encoder stack written directly from the layer definition.
Matrix reference_unmasked_encoder(const Matrix& x0, const EncoderParams& params);

/// Properly normalized bigram ARPA text over ids 0..labels-1 with backoff.
std::string random_bigram_arpa(Rng& rng, std::size_t labels);

struct OracleResult {
  Labels labels;
  double score = 0.0;
};

/// Exhaustive joint search: scores every label sequence with non-zero CTC
/// probability using earliest-emission triggers and returns the best.
OracleResult exhaustive_joint_search(const Posteriorgram& post, const EncoderStates& enc,
                                     const DecoderParams& dec, const LanguageModel& lm,
                                     const DecodeParams& params);

/// A tiny random model with `labels` regular labels plus <sos>/<eos>.
ModelParams tiny_model(std::uint64_t seed, std::size_t e_layers = 2, std::size_t d_layers = 1,
                       std::size_t d_model = 8, std::size_t labels = 3, std::size_t feat_dim = 8);

/// Saturated beams and no local threshold.
DecodeParams saturated_params();

}  // namespace tasr::testing

#endif  // TASR_TESTS_TEST_SUPPORT_H_
