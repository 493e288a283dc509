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

#ifndef C2V_VOCAB_H_
#define C2V_VOCAB_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "c2v/cn_io.h"
#include "c2v/random.h"

namespace c2v {

using WordId = std::int32_t;

// Word <-> id mapping with occurrence counts. Ids are dense, ordered by
// descending count with ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;
  // `words` and `counts` must already satisfy the id-order invariant.
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts);

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& word(WordId id) const { return words_[static_cast<std::size_t>(id)]; }
  std::uint64_t count(WordId id) const { return counts_[static_cast<std::size_t>(id)]; }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::optional<WordId> id(std::string_view word) const;

  // Sum of retained counts.
  std::uint64_t total_tokens() const { return total_; }

  // Fills keep_prob() from keep_probability(count, total, t).
  void set_subsampling(double t);
  double keep_prob(WordId id) const { return keep_[static_cast<std::size_t>(id)]; }

  // TSV "word<TAB>count", descending count.
  void dump(std::ostream& out) const;

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> keep_;
  std::unordered_map<std::string, WordId> index_;
  std::uint64_t total_ = 0;
};

// Counts every non-epsilon arc once (posterior-unweighted) and prunes words
// below min_count. Throws Error on an empty corpus or empty result.
Vocabulary build_vocabulary(std::span<const ConfusionNetwork> networks,
                            std::uint64_t min_count);
Vocabulary build_vocabulary(NetworkSource& source, std::uint64_t min_count);

// Frequent-word keep probability: with f = count / total,
// min(1, (sqrt(f / t) + 1) * t / f).
double keep_probability(std::uint64_t count, std::uint64_t total, double t);

// Unigram^power sampling table. Word i owns a number of slots proportional
// to count(i)^power (largest-remainder apportionment, at least one slot).
class NegativeTable {
 public:
  static constexpr std::size_t kDefaultSize = 10'000'000;

  NegativeTable() = default;
  NegativeTable(const Vocabulary& vocab, double power = 0.75,
                std::size_t table_size = kDefaultSize);

  WordId draw(Rng& rng) const {
    return table_[uniform_below(rng, table_.size())];
  }
  std::size_t size() const { return table_.size(); }
  // Exact probability of drawing `id` from this table.
  double probability(WordId id) const;

 private:
  std::vector<WordId> table_;
  std::vector<std::size_t> slots_;
};

struct SubwordList {
  std::vector<std::string> ngrams;  // n ascending, then left to right
  std::string word;                 // the full-word token
};

// Character n-grams of "<" + word + ">" for n in [minn, maxn]. Characters are
// UTF-8 code points. maxn == 0 disables n-grams.
SubwordList extract_subwords(std::string_view word, int minn = 3, int maxn = 6);

// FNV-1a (32-bit) over the UTF-8 bytes, modulo bucket_count.
std::uint32_t fnv1a32(std::string_view bytes);
std::uint32_t hash_subword(std::string_view ngram, std::uint32_t bucket_count);

struct SubwordParams {
  int minn = 3;
  int maxn = 6;
  std::uint32_t bucket_count = 2'000'000;

  bool enabled() const { return maxn > 0 && bucket_count > 0; }
  bool operator==(const SubwordParams&) const = default;
};

// Input-matrix row lists. Row w (< V) is the word's own row; n-gram g maps to
// row V + hash(g). Rows of in-vocabulary words are precomputed.
class SubwordIndex {
 public:
  SubwordIndex() = default;
  SubwordIndex(const Vocabulary& vocab, SubwordParams params);

  const SubwordParams& params() const { return params_; }
  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t input_rows() const { return vocab_size_ + (params_.enabled() ? params_.bucket_count : 0); }

  std::span<const std::int32_t> rows(WordId id) const {
    auto b = offsets_[static_cast<std::size_t>(id)];
    auto e = offsets_[static_cast<std::size_t>(id) + 1];
    return {flat_.data() + b, e - b};
  }

  // Rows for an arbitrary word: in-vocabulary words get their precomputed
  // list; out-of-vocabulary words get hashed n-gram rows only.
  std::vector<std::int32_t> rows_for(std::string_view word,
                                     std::optional<WordId> id) const;

 private:
  SubwordParams params_;
  std::size_t vocab_size_ = 0;
  std::vector<std::int32_t> flat_;
  std::vector<std::size_t> offsets_{0};
};

}  // namespace c2v

#endif  // C2V_VOCAB_H_
