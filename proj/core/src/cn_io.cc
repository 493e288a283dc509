// Copyright 2026 The c2v Authors.
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

#include "c2v/cn_io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "c2v/error.h"

namespace c2v {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
         c == '\f';
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (is_space(c)) continue;
    return c == '#';
  }
  return true;
}

Alternative parse_alternative(std::string_view token, std::size_t line_no) {
  auto colon = token.rfind(':');
  if (colon == std::string_view::npos) {
    throw FormatError("alternative '" + std::string(token) +
                          "' is not of the form word:posterior",
                      line_no);
  }
  std::string_view word = token.substr(0, colon);
  std::string_view prob = token.substr(colon + 1);
  if (word.empty()) {
    throw FormatError("empty word in '" + std::string(token) + "'", line_no);
  }
  if (word.find(':') != std::string_view::npos) {
    throw FormatError("word may not contain ':' in '" + std::string(token) +
                          "'",
                      line_no);
  }
  double p = 0.0;
  auto [end, ec] = std::from_chars(prob.data(), prob.data() + prob.size(), p);
  if (ec != std::errc() || end != prob.data() + prob.size() || prob.empty()) {
    throw FormatError("bad posterior in '" + std::string(token) + "'",
                      line_no);
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw FormatError("posterior outside [0,1] in '" + std::string(token) + "'",
                      line_no);
  }
  return {fold_case(word), p};
}

void validate_slot(const Slot& slot, std::size_t line_no) {
  double sum = 0.0;
  std::unordered_set<std::string_view> seen;
  for (const auto& alt : slot.alternatives) {
    if (!seen.insert(alt.word).second) {
      throw FormatError("duplicate word '" + alt.word + "' within a slot",
                        line_no);
    }
    sum += alt.posterior;
  }
  if (std::fabs(sum - 1.0) > kPosteriorSumTolerance) {
    throw FormatError("slot posteriors sum to " + std::to_string(sum) +
                          ", expected 1",
                      line_no);
  }
}

}  // namespace

std::optional<std::size_t> Slot::top1_index() const {
  std::optional<std::size_t> best;
  double best_p = -1.0;
  for (std::size_t i = 0; i < alternatives.size(); ++i) {
    if (alternatives[i].posterior > best_p) {
      best_p = alternatives[i].posterior;
      best = i;
    }
  }
  if (best && alternatives[*best].is_epsilon()) return std::nullopt;
  return best;
}

std::string fold_case(std::string_view word) {
  std::string out(word);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

ConfusionNetwork parse_cn_line(std::string_view line, std::size_t line_no) {
  auto tokens = split_whitespace(line);
  if (tokens.empty()) throw FormatError("empty line", line_no);
  ConfusionNetwork cn;
  cn.utterance_id = std::string(tokens[0]);
  if (tokens.size() < 2) {
    throw FormatError("utterance '" + cn.utterance_id + "' has no slots",
                      line_no);
  }
  Slot current;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i] == "|") {
      if (current.alternatives.empty()) throw FormatError("empty slot", line_no);
      validate_slot(current, line_no);
      cn.slots.push_back(std::move(current));
      current = Slot{};
      continue;
    }
    if (tokens[i].find('|') != std::string_view::npos) {
      throw FormatError("'|' must be surrounded by spaces", line_no);
    }
    current.alternatives.push_back(parse_alternative(tokens[i], line_no));
  }
  if (current.alternatives.empty()) throw FormatError("empty slot", line_no);
  validate_slot(current, line_no);
  cn.slots.push_back(std::move(current));
  return cn;
}

std::optional<ConfusionNetwork> CnReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (blank_or_comment(line)) continue;
    return parse_cn_line(line, line_no_);
  }
  if (in_.bad()) throw IoError("read error in confusion network stream");
  return std::nullopt;
}

ConfusionNetwork make_plain_network(std::string utterance_id,
                                    std::span<const std::string> tokens) {
  ConfusionNetwork cn;
  cn.utterance_id = std::move(utterance_id);
  cn.slots.reserve(tokens.size());
  for (const auto& t : tokens) {
    cn.slots.push_back(Slot{{Alternative{t, 1.0}}});
  }
  return cn;
}

std::optional<ConfusionNetwork> PlainCorpusReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    auto views = split_whitespace(line);
    if (views.empty()) continue;
    std::vector<std::string> tokens;
    tokens.reserve(views.size());
    for (auto v : views) tokens.push_back(fold_case(v));
    return make_plain_network("u" + std::to_string(++count_), tokens);
  }
  if (in_.bad()) throw IoError("read error in corpus stream");
  return std::nullopt;
}

std::vector<ConfusionNetwork> read_all(NetworkSource& source) {
  std::vector<ConfusionNetwork> out;
  while (auto cn = source.next()) out.push_back(std::move(*cn));
  return out;
}

std::vector<ConfusionNetwork> parse_cn_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  CnReader reader(in);
  return read_all(reader);
}

std::vector<ConfusionNetwork> parse_plain_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  PlainCorpusReader reader(in);
  return read_all(reader);
}

std::vector<std::string> top1_path(const ConfusionNetwork& cn) {
  std::vector<std::string> out;
  out.reserve(cn.slots.size());
  for (const auto& slot : cn.slots) {
    if (auto i = slot.top1_index()) out.push_back(slot.alternatives[*i].word);
  }
  return out;
}

std::string format_posterior(double p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", p);
  std::string s(buf);
  auto dot = s.find('.');
  std::size_t keep = s.size();
  while (keep > dot + 2 && s[keep - 1] == '0') --keep;
  s.resize(keep);
  return s;
}

std::string format_cn_line(const ConfusionNetwork& cn) {
  std::string out = cn.utterance_id;
  for (std::size_t s = 0; s < cn.slots.size(); ++s) {
    out += s == 0 ? " " : " | ";
    const auto& alts = cn.slots[s].alternatives;
    for (std::size_t a = 0; a < alts.size(); ++a) {
      if (a > 0) out += ' ';
      out += alts[a].word;
      out += ':';
      out += format_posterior(alts[a].posterior);
    }
  }
  return out;
}

void write_cn(std::ostream& out, std::span<const ConfusionNetwork> networks) {
  for (const auto& cn : networks) out << format_cn_line(cn) << '\n';
}

std::string write_cn_text(std::span<const ConfusionNetwork> networks) {
  std::ostringstream out;
  write_cn(out, networks);
  return out.str();
}

double mean_alternatives(std::span<const ConfusionNetwork> networks) {
  std::size_t slots = 0;
  std::size_t alts = 0;
  for (const auto& cn : networks) {
    slots += cn.slots.size();
    for (const auto& s : cn.slots) alts += s.alternatives.size();
  }
  return slots == 0 ? 0.0 : double(alts) / double(slots);
}

}  // namespace c2v
