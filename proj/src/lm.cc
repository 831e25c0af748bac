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

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace tasr {

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& msg) {
  throw std::runtime_error(source + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  // strtod accepts forms like "-inf" and "-99" that ARPA writers emit.
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

UniformLm::UniformLm(std::size_t size) {
  if (size == 0) throw std::invalid_argument("uniform LM needs a non-empty vocabulary");
  logp_ = -std::log(static_cast<double>(size));
}

LmStep UniformLm::extend(const LmState& state, int) const { return {state, logp_}; }

NgramLm NgramLm::parse(const std::string& text,
                       const std::unordered_map<std::string, int>& symbols,
                       const std::string& source) {
  auto resolve = [&](const std::string& tok, std::size_t line) -> int {
    if (tok == "<s>") return kBos;
    if (tok == "</s>") return kEos;
    if (tok == "<unk>") return kUnk;
    if (auto it = symbols.find(tok); it != symbols.end()) return it->second;
    int id = -1;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
    if (ec == std::errc() && p == tok.data() + tok.size() && id >= 0) return id;
    parse_error(source, line, "unknown token '" + tok + "'");
  };

  NgramLm lm;
  std::map<std::size_t, std::size_t> declared;
  std::map<std::size_t, std::size_t> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  enum class Section { kPreamble, kData, kGrams, kEnd } section = Section::kPreamble;
  std::size_t current = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (section == Section::kEnd) parse_error(source, line_no, "content after \\end\\");
    if (line == "\\data\\") {
      if (section != Section::kPreamble) parse_error(source, line_no, "duplicate \\data\\");
      section = Section::kData;
      continue;
    }
    if (section == Section::kPreamble) continue;
    if (line == "\\end\\") {
      section = Section::kEnd;
      continue;
    }
    if (line.front() == '\\') {
      std::size_t n = 0;
      auto [p, ec] = std::from_chars(line.data() + 1, line.data() + line.size(), n);
      if (ec != std::errc() || n == 0 || std::string(p) != "-grams:") {
        parse_error(source, line_no, "bad section header '" + line + "'");
      }
      if (!declared.contains(n)) parse_error(source, line_no, "section for undeclared order");
      section = Section::kGrams;
      current = n;
      continue;
    }
    if (section == Section::kData) {
      std::size_t n = 0, count = 0;
      if (std::sscanf(line.c_str(), "ngram %zu=%zu", &n, &count) != 2 || n == 0) {
        parse_error(source, line_no, "expected 'ngram N=COUNT'");
      }
      declared[n] = count;
      lm.order_ = std::max(lm.order_, n);
      continue;
    }
    const auto fields = split_ws(line);
    if (fields.size() != current + 1 && fields.size() != current + 2) {
      parse_error(source, line_no, "expected " + std::to_string(current) + " tokens");
    }
    Entry entry;
    if (!parse_double(fields[0], entry.log10_prob)) {
      parse_error(source, line_no, "bad probability '" + fields[0] + "'");
    }
    if (fields.size() == current + 2 && !parse_double(fields.back(), entry.log10_backoff)) {
      parse_error(source, line_no, "bad backoff weight '" + fields.back() + "'");
    }
    std::vector<int> gram;
    for (std::size_t i = 1; i <= current; ++i) gram.push_back(resolve(fields[i], line_no));
    lm.grams_[gram] = entry;
    ++seen[current];
  }
  if (section == Section::kPreamble) parse_error(source, line_no, "missing \\data\\ header");
  if (section != Section::kEnd) parse_error(source, line_no, "missing \\end\\");
  for (const auto& [n, count] : declared) {
    if (seen[n] != count) {
      parse_error(source, line_no,
                  std::to_string(n) + "-gram count " + std::to_string(seen[n]) +
                      " does not match declared " + std::to_string(count));
    }
  }
  return lm;
}

NgramLm NgramLm::load(const std::string& path,
                      const std::unordered_map<std::string, int>& symbols) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open LM file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), symbols, path);
}

double NgramLm::log10_prob(const std::vector<int>& history, int word) const {
  std::vector<int> ctx = history;
  if (ctx.size() + 1 > order_) ctx.erase(ctx.begin(), ctx.end() - (order_ - 1));
  double backoff = 0.0;
  while (true) {
    std::vector<int> gram = ctx;
    gram.push_back(word);
    if (auto it = grams_.find(gram); it != grams_.end()) return backoff + it->second.log10_prob;
    if (ctx.empty()) break;
    if (auto it = grams_.find(ctx); it != grams_.end()) backoff += it->second.log10_backoff;
    ctx.erase(ctx.begin());
  }
  if (auto it = grams_.find({kUnk}); it != grams_.end()) return backoff + it->second.log10_prob;
  return backoff + kLog10Floor;
}

LmState NgramLm::start() const {
  if (order_ > 1 && grams_.contains({kBos})) return LmState{{kBos}};
  return {};
}

LmStep NgramLm::extend(const LmState& state, int label) const {
  LmStep step;
  step.logp = log10_prob(state.context, label) * std::numbers::ln10;
  step.state.context = state.context;
  step.state.context.push_back(label);
  const std::size_t keep = order_ - 1;
  if (step.state.context.size() > keep) {
    step.state.context.erase(step.state.context.begin(),
                             step.state.context.end() - static_cast<long>(keep));
  }
  return step;
}

}  // namespace tasr
