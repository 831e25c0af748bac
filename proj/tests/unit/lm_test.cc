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

#include "tasr/lm.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support/test_support.h"

namespace tasr {
namespace {

constexpr char kArpa[] = R"(
\data\
ngram 1=4
ngram 2=3

\1-grams:
-1.0 <s> -0.5
-0.3 a -0.2
-0.6 b
-1.2 </s>

\2-grams:
-0.1 <s> a
-0.4 a b
-0.7 b </s>

\end\
)";

const std::unordered_map<std::string, int> kSymbols = {{"a", 0}, {"b", 1}};

TEST(NgramLm, ExplicitBigram) {
  const NgramLm lm = NgramLm::parse(kArpa, kSymbols);
  EXPECT_EQ(lm.order(), 2u);
  EXPECT_DOUBLE_EQ(lm.log10_prob({NgramLm::kBos}, 0), -0.1);
  EXPECT_DOUBLE_EQ(lm.log10_prob({0}, 1), -0.4);
}

TEST(NgramLm, BacksOffThroughHistoryWeight) {
  const NgramLm lm = NgramLm::parse(kArpa, kSymbols);
  EXPECT_DOUBLE_EQ(lm.log10_prob({0}, 0), -0.2 + -0.3);        // a a -> bo(a) + p(a)
  EXPECT_DOUBLE_EQ(lm.log10_prob({NgramLm::kBos}, 1), -0.5 + -0.6);
  EXPECT_DOUBLE_EQ(lm.log10_prob({1}, 0), -0.3);                // b has no backoff weight
}

TEST(NgramLm, UnknownWordFallsToFloor) {
  const NgramLm lm = NgramLm::parse(kArpa, kSymbols);
  EXPECT_DOUBLE_EQ(lm.log10_prob({}, 7), NgramLm::kLog10Floor);
  const NgramLm with_unk = NgramLm::parse(R"(\data\
ngram 1=2
\1-grams:
-0.5 a
-2.0 <unk>
\end\
)", kSymbols);
  EXPECT_DOUBLE_EQ(with_unk.log10_prob({}, 7), -2.0);
}

TEST(NgramLm, StartsAfterSentenceStartAndConvertsToNaturalLog) {
  const NgramLm lm = NgramLm::parse(kArpa, kSymbols);
  const LmState s = lm.start();
  EXPECT_EQ(s.context, (std::vector<int>{NgramLm::kBos}));
  const LmStep step = lm.extend(s, 0);
  EXPECT_NEAR(step.logp, -0.1 * std::numbers::ln10, 1e-15);
  EXPECT_EQ(step.state.context, (std::vector<int>{0}));
  const LmStep end = lm.extend(lm.extend(step.state, 1).state, NgramLm::kEos);
  EXPECT_NEAR(end.logp, -0.7 * std::numbers::ln10, 1e-15);
}

TEST(NgramLm, NumericTokensNeedNoSymbolTable) {
  const NgramLm lm = NgramLm::parse("\\data\\\nngram 1=1\n\\1-grams:\n-0.25 3\n\\end\\\n");
  EXPECT_DOUBLE_EQ(lm.log10_prob({}, 3), -0.25);
  EXPECT_TRUE(lm.start().context.empty());
}

TEST(NgramLm, ErrorsNameSourceAndLine) {
  auto message = [](const std::string& text) {
    try {
      NgramLm::parse(text, kSymbols, "x.arpa");
    } catch (const std::runtime_error& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message("\\data\\\nngram 1=1\n\\1-grams:\nfoo a\n\\end\\\n"),
            "x.arpa:4: bad probability 'foo'");
  EXPECT_EQ(message("\\data\\\nngram 1=1\n\\1-grams:\n-0.1 zz\n\\end\\\n"),
            "x.arpa:4: unknown token 'zz'");
  EXPECT_EQ(message("\\data\\\nngram 1=2\n\\1-grams:\n-0.1 a\n\\end\\\n"),
            "x.arpa:5: 1-gram count 1 does not match declared 2");
  EXPECT_EQ(message("\\data\\\nngram 1=1\n\\1-grams:\n-0.1 a\n"), "x.arpa:4: missing \\end\\");
  EXPECT_EQ(message("-0.1 a\n"), "x.arpa:1: missing \\data\\ header");
  EXPECT_EQ(message("\\data\\\nngram 1=1\n\\2-grams:\n"),
            "x.arpa:3: section for undeclared order");
  EXPECT_THROW(NgramLm::load("/nonexistent/lm.arpa"), std::runtime_error);
}

TEST(NgramLm, RandomBigramIsNormalized) {
  testing::Rng rng(41);
  const NgramLm lm = NgramLm::parse(testing::random_bigram_arpa(rng, 4));
  for (const std::vector<int>& h : {std::vector<int>{NgramLm::kBos}, std::vector<int>{0},
                                    std::vector<int>{3}}) {
    double s = std::pow(10.0, lm.log10_prob(h, NgramLm::kEos));
    for (int w = 0; w < 4; ++w) s += std::pow(10.0, lm.log10_prob(h, w));
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(UniformLm, ScoresEveryLabelEqually) {
  const UniformLm lm(4);
  EXPECT_NEAR(lm.extend(lm.start(), 2).logp, -std::log(4.0), 1e-15);
  EXPECT_EQ(UniformLm(1).extend({}, 0).logp, 0.0);
  EXPECT_THROW(UniformLm(0), std::invalid_argument);
}

}  // namespace
}  // namespace tasr
