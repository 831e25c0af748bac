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

// Language models for shallow fusion during decoding.

#ifndef TASR_LM_H_
#define TASR_LM_H_

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tasr {

/// Continuation state of a language model. Two equal states advanced by the
/// same label give equal states and equal scores.
struct LmState {
  std::vector<int> context;
  friend auto operator<=>(const LmState&, const LmState&) = default;
};

struct LmStep {
  LmState state;
  double logp = 0.0;  // natural log p(label | history)
};

class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual LmState start() const = 0;
  virtual LmStep extend(const LmState& state, int label) const = 0;
};

/// Every label gets probability 1 / size.
class UniformLm final : public LanguageModel {
 public:
  explicit UniformLm(std::size_t size);
  LmState start() const override { return {}; }
  LmStep extend(const LmState& state, int label) const override;

 private:
  double logp_;
};

/// Backoff n-gram model read from ARPA text.
///
/// Tokens are resolved through the symbol table given at load time; a token
/// missing from the table that parses as a non-negative integer is taken as
/// a vocabulary id. Labels without a unigram score as <unk> when the file
/// has one, otherwise get the floor of 10^-99.
class NgramLm final : public LanguageModel {
 public:
  static constexpr int kBos = -1;
  static constexpr int kEos = -2;
  static constexpr int kUnk = -3;
  static constexpr double kLog10Floor = -99.0;

  /// Throws std::runtime_error("<source>:<line>: ...") on malformed input.
  static NgramLm parse(const std::string& text,
                       const std::unordered_map<std::string, int>& symbols = {},
                       const std::string& source = "<arpa>");
  static NgramLm load(const std::string& path,
                      const std::unordered_map<std::string, int>& symbols = {});

  std::size_t order() const { return order_; }
  LmState start() const override;
  LmStep extend(const LmState& state, int label) const override;

  /// log10 p(word | history) with backoff, as stored in the file.
  double log10_prob(const std::vector<int>& history, int word) const;

 private:
  struct Entry {
    double log10_prob = 0.0;
    double log10_backoff = 0.0;
  };
  std::size_t order_ = 1;
  std::map<std::vector<int>, Entry> grams_;
};

}  // namespace tasr

#endif  // TASR_LM_H_
