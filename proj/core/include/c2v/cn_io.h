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

// Confusion networks ("sausages") and their line-oriented text format:
//
//   utt_id word:posterior word:posterior | word:posterior ... | ...
//
// Slots are separated by " | ", alternatives within a slot by single spaces.
// Lines starting with '#' are comments. Words are case-folded on input and
// may not contain a space, '|' or ':'. The deletion arc is spelled "<eps>".

#ifndef C2V_CN_IO_H_
#define C2V_CN_IO_H_

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace c2v {

inline constexpr std::string_view kEpsilon = "<eps>";

// Maximum |sum(posteriors) - 1| accepted by the parser.
inline constexpr double kPosteriorSumTolerance = 1e-3;

struct Alternative {
  std::string word;
  double posterior = 0.0;

  bool is_epsilon() const { return word == kEpsilon; }
  bool operator==(const Alternative&) const = default;
};

struct Slot {
  std::vector<Alternative> alternatives;

  // Index of the best non-epsilon alternative; ties go to the earlier one.
  // Empty when the epsilon arc carries the maximum posterior.
  std::optional<std::size_t> top1_index() const;

  bool operator==(const Slot&) const = default;
};

struct ConfusionNetwork {
  std::string utterance_id;
  std::vector<Slot> slots;  // time order

  bool operator==(const ConfusionNetwork&) const = default;
};

// Lazy sequence of networks. next() returns nullopt once exhausted.
class NetworkSource {
 public:
  virtual ~NetworkSource() = default;
  virtual std::optional<ConfusionNetwork> next() = 0;
};

// Streams networks from the CN text format. Throws FormatError (with the
// 1-based line number) on malformed lines, posteriors outside [0,1],
// posterior sums off by more than kPosteriorSumTolerance and duplicate words
// within a slot.
class CnReader : public NetworkSource {
 public:
  explicit CnReader(std::istream& in) : in_(in) {}
  std::optional<ConfusionNetwork> next() override;

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

// Streams whitespace-tokenized sentences (one per line) as networks with a
// single alternative of posterior 1 per slot. Empty lines are skipped.
// Utterance ids are "u1", "u2", ... in yield order.
class PlainCorpusReader : public NetworkSource {
 public:
  explicit PlainCorpusReader(std::istream& in) : in_(in) {}
  std::optional<ConfusionNetwork> next() override;

 private:
  std::istream& in_;
  std::size_t count_ = 0;
};

// Parses one CN line. `line_no` is only used for error messages.
ConfusionNetwork parse_cn_line(std::string_view line, std::size_t line_no = 0);

std::vector<ConfusionNetwork> read_all(NetworkSource& source);
std::vector<ConfusionNetwork> parse_cn_text(std::string_view text);
std::vector<ConfusionNetwork> parse_plain_text(std::string_view text);

// Lowercases ASCII letters; other bytes (including UTF-8) pass through.
std::string fold_case(std::string_view word);

// Network for a tokenized sentence: one posterior-1 alternative per token.
ConfusionNetwork make_plain_network(std::string utterance_id,
                                    std::span<const std::string> tokens);

// Most probable non-epsilon word per slot.
std::vector<std::string> top1_path(const ConfusionNetwork& cn);

// Shortest decimal rendering with at most six fractional digits and at least
// one ("0.7", "0.333333", "1.0").
std::string format_posterior(double p);

std::string format_cn_line(const ConfusionNetwork& cn);
void write_cn(std::ostream& out, std::span<const ConfusionNetwork> networks);
std::string write_cn_text(std::span<const ConfusionNetwork> networks);

// Mean number of alternatives per slot (epsilon arcs included).
double mean_alternatives(std::span<const ConfusionNetwork> networks);

}  // namespace c2v

#endif  // C2V_CN_IO_H_
