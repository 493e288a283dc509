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

#ifndef C2V_ACOUSTICS_H_
#define C2V_ACOUSTICS_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "c2v/cn_io.h"

namespace c2v {

using Pronunciation = std::vector<std::string>;

// Levenshtein distance with unit insert/delete/substitute costs.
template <typename T>
int edit_distance(std::span<const T> p, std::span<const T> q) {
  std::vector<int> prev(q.size() + 1), cur(q.size() + 1);
  for (std::size_t j = 0; j <= q.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= p.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= q.size(); ++j) {
      int sub = prev[j - 1] + (p[i - 1] == q[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[q.size()];
}

int phone_edit_distance(const Pronunciation& p, const Pronunciation& q);

// 1 - distance / max(len(p), len(q)).
double pronunciation_similarity(const Pronunciation& p, const Pronunciation& q);

// Pronouncing dictionary. Immutable once built; safe for concurrent reads.
class Lexicon {
 public:
  // Adds a pronunciation (stress digits are stripped, the word is
  // case-folded). Duplicate pronunciations of a word are ignored.
  void add(std::string_view word, const Pronunciation& pron);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

  // Words in insertion order.
  const std::vector<std::string>& words() const { return words_; }

  // Throws MissingWordError when absent.
  std::vector<Pronunciation> pronunciations(std::string_view word) const;

  // Number of input lines dropped by parse_lexicon.
  std::size_t rejected_lines() const { return rejected_lines_; }
  void set_rejected_lines(std::size_t n) { rejected_lines_ = n; }

  // Internal phone-id view used by the similarity kernels.
  using PhoneIds = std::vector<std::uint16_t>;
  const std::vector<PhoneIds>& phone_ids(std::size_t word_index) const {
    return prons_[word_index];
  }
  std::optional<std::size_t> index_of(std::string_view word) const;

 private:
  std::uint16_t intern(const std::string& phone);

  std::vector<std::string> words_;
  std::vector<std::vector<PhoneIds>> prons_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> phones_;
  std::unordered_map<std::string, std::uint16_t> phone_index_;
  std::size_t rejected_lines_ = 0;
};

// Strips CMUdict stress markers ("IY1" -> "IY").
std::string strip_stress(std::string_view phone);

// Reads CMUdict-style lines "WORD  PH1 PH2 ...", with variants spelled
// "WORD(2)". Lines starting with ";;;" or '#' are comments. Lines without
// phones are rejected and counted in Lexicon::rejected_lines().
Lexicon parse_lexicon(std::istream& in);
Lexicon parse_lexicon_text(std::string_view text);

// Max over pronunciation pairs of pronunciation_similarity. Throws
// MissingWordError when either word is absent.
double acoustic_similarity(std::string_view w1, std::string_view w2,
                           const Lexicon& lex);

struct Confusable {
  std::string word;
  double similarity = 0.0;
  bool operator==(const Confusable&) const = default;
};

// All lexicon words other than `word` whose similarity is at least
// `threshold`, best first (ties lexicographic). threshold must lie in (0,1].
std::vector<Confusable> confusable_set(std::string_view word,
                                       const Lexicon& lex, double threshold);

// Memoizes confusable_set for one lexicon and threshold. Not thread-safe.
class ConfusableCache {
 public:
  ConfusableCache(const Lexicon& lex, double threshold)
      : lex_(lex), threshold_(threshold) {}
  const std::vector<Confusable>& get(const std::string& word);

 private:
  const Lexicon& lex_;
  double threshold_;
  std::unordered_map<std::string, std::vector<Confusable>> cache_;
};

struct SynthesisConfig {
  double confusion_prob = 0.75;
  int max_alternatives = 6;
  double similarity_threshold = 0.6;
  double temperature = 0.2;
  std::uint64_t seed = 1;

  void validate() const;
};

// Turns clean sentences into confusion networks. Each token found in the
// lexicon receives, with probability confusion_prob, up to
// max_alternatives - 1 confusables drawn without replacement with weight
// proportional to similarity. Posteriors are softmax(similarity/temperature)
// with the spoken word at similarity 1, rounded to six decimals; the spoken
// word is listed first and the rest follow by descending posterior.
// Utterance n (0-based) uses its own stream derived from (seed, n).
ConfusionNetwork synthesize_network(std::span<const std::string> tokens,
                                    std::string utterance_id,
                                    std::size_t utterance_index,
                                    ConfusableCache& confusables,
                                    const SynthesisConfig& cfg);

std::vector<ConfusionNetwork> synthesize_cn_corpus(
    std::span<const ConfusionNetwork> sentences, const Lexicon& lex,
    const SynthesisConfig& cfg);
std::vector<ConfusionNetwork> synthesize_cn_corpus(std::istream& corpus,
                                                   const Lexicon& lex,
                                                   const SynthesisConfig& cfg);

// Expected alternatives per slot for the given sentences under cfg.
double expected_mean_alternatives(std::span<const ConfusionNetwork> sentences,
                                  const Lexicon& lex,
                                  const SynthesisConfig& cfg);

struct Calibration {
  double confusion_prob = 0.0;
  double expected_mean = 0.0;
  bool reachable = false;  // false when even confusion_prob = 1 falls short
};

// Solves for the confusion_prob whose expected mean alternatives equals
// `target`. The expectation is linear in confusion_prob.
Calibration calibrate_confusion_prob(
    std::span<const ConfusionNetwork> sentences, const Lexicon& lex,
    const SynthesisConfig& cfg, double target);

struct AcousticAnalogy {
  std::string w1, w2, w3, w4;
};

struct AcousticPair {
  std::string w1, w2;
  double score = 0.0;
};

struct AcousticTaskConfig {
  double homophone_threshold = 1.0;
  std::size_t analogy_count = 1000;
  std::size_t similarity_pair_count = 1000;
  int similarity_bins = 10;
  std::uint64_t seed = 1;
};

struct AcousticTasks {
  std::vector<AcousticAnalogy> analogies;
  std::vector<AcousticPair> similarity_pairs;
};

// Builds homophone analogy quadruples and acoustic-similarity pairs stratified
// across [0,1]. `restrict_to`, when non-empty, limits both tasks to those
// words. Throws Error when no homophone pair exists.
AcousticTasks generate_acoustic_tasks(
    const Lexicon& lex, const AcousticTaskConfig& cfg,
    std::span<const std::string> restrict_to = {});

// questions-words format under one ": section" header.
void write_analogies(std::ostream& out, std::string_view section,
                     std::span<const AcousticAnalogy> analogies);
// word1<TAB>word2<TAB>score
void write_similarity_pairs(std::ostream& out,
                            std::span<const AcousticPair> pairs);

}  // namespace c2v

#endif  // C2V_ACOUSTICS_H_
