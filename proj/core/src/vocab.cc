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

#include "c2v/vocab.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "c2v/error.h"

namespace c2v {

Vocabulary::Vocabulary(std::vector<std::string> words,
                       std::vector<std::uint64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  if (words_.size() != counts_.size()) {
    throw std::invalid_argument("vocabulary words/counts size mismatch");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
      throw FormatError("duplicate vocabulary word '" + words_[i] + "'");
    }
    total_ += counts_[i];
  }
  keep_.assign(words_.size(), 1.0);
}

std::optional<WordId> Vocabulary::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::set_subsampling(double t) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    keep_[i] = keep_probability(counts_[i], total_, t);
  }
}

void Vocabulary::dump(std::ostream& out) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i] << '\t' << counts_[i] << '\n';
  }
}

namespace {

Vocabulary finish_vocabulary(std::unordered_map<std::string, std::uint64_t>& counts,
                             std::uint64_t arcs, std::uint64_t min_count) {
  if (arcs == 0) throw Error("cannot build a vocabulary from an empty corpus");
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  if (kept.empty()) {
    throw Error("no word reaches min_count " + std::to_string(min_count));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> words;
  std::vector<std::uint64_t> cs;
  words.reserve(kept.size());
  cs.reserve(kept.size());
  for (auto& [w, c] : kept) {
    words.push_back(std::move(w));
    cs.push_back(c);
  }
  return Vocabulary(std::move(words), std::move(cs));
}

void count_network(const ConfusionNetwork& cn,
                   std::unordered_map<std::string, std::uint64_t>& counts,
                   std::uint64_t& arcs) {
  for (const auto& slot : cn.slots) {
    for (const auto& alt : slot.alternatives) {
      if (alt.is_epsilon()) continue;
      ++counts[alt.word];
      ++arcs;
    }
  }
}

}  // namespace

Vocabulary build_vocabulary(std::span<const ConfusionNetwork> networks,
                            std::uint64_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t arcs = 0;
  for (const auto& cn : networks) count_network(cn, counts, arcs);
  return finish_vocabulary(counts, arcs, min_count);
}

Vocabulary build_vocabulary(NetworkSource& source, std::uint64_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t arcs = 0;
  while (auto cn = source.next()) count_network(*cn, counts, arcs);
  return finish_vocabulary(counts, arcs, min_count);
}

double keep_probability(std::uint64_t count, std::uint64_t total, double t) {
  if (count == 0 || total == 0 || !(t > 0.0)) {
    throw std::invalid_argument("keep_probability needs count, total, t > 0");
  }
  double f = double(count) / double(total);
  return std::min(1.0, (std::sqrt(f / t) + 1.0) * (t / f));
}

NegativeTable::NegativeTable(const Vocabulary& vocab, double power,
                             std::size_t table_size) {
  const std::size_t v = vocab.size();
  if (v == 0) throw Error("negative table needs a non-empty vocabulary");
  if (table_size < v) {
    throw std::invalid_argument("negative table size must be >= vocabulary size");
  }
  std::vector<double> weight(v);
  for (std::size_t i = 0; i < v; ++i) {
    weight[i] = std::pow(double(vocab.count(static_cast<WordId>(i))), power);
  }
  double z = std::accumulate(weight.begin(), weight.end(), 0.0);

  // Every word gets one slot; the remaining slots are apportioned by largest
  // remainder of the ideal share.
  slots_.assign(v, 1);
  std::size_t spare = table_size - v;
  std::vector<double> remainder(v);
  std::size_t given = 0;
  for (std::size_t i = 0; i < v; ++i) {
    double ideal = weight[i] / z * double(table_size) - 1.0;
    if (ideal < 0.0) ideal = 0.0;
    auto whole = static_cast<std::size_t>(std::floor(ideal));
    whole = std::min(whole, spare - given);
    slots_[i] += whole;
    given += whole;
    remainder[i] = ideal - double(whole);
  }
  std::vector<std::size_t> order(v);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; given < spare; k = (k + 1) % v, ++given) {
    ++slots_[order[k]];
  }

  table_.reserve(table_size);
  for (std::size_t i = 0; i < v; ++i) {
    table_.insert(table_.end(), slots_[i], static_cast<WordId>(i));
  }
}

double NegativeTable::probability(WordId id) const {
  return double(slots_[static_cast<std::size_t>(id)]) / double(table_.size());
}

namespace {

// Byte offsets of UTF-8 code point starts, plus the end offset.
std::vector<std::size_t> char_starts(std::string_view s) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) starts.push_back(i);
  }
  starts.push_back(s.size());
  return starts;
}

}  // namespace

SubwordList extract_subwords(std::string_view word, int minn, int maxn) {
  SubwordList out;
  out.word = std::string(word);
  if (maxn <= 0) return out;
  if (minn < 1 || minn > maxn) {
    throw std::invalid_argument("n-gram bounds need 1 <= minn <= maxn");
  }
  std::string bracketed = "<" + std::string(word) + ">";
  auto starts = char_starts(bracketed);
  const std::size_t chars = starts.size() - 1;
  for (int n = minn; n <= maxn; ++n) {
    auto un = static_cast<std::size_t>(n);
    if (un > chars) break;
    for (std::size_t i = 0; i + un <= chars; ++i) {
      out.ngrams.push_back(bracketed.substr(starts[i], starts[i + un] - starts[i]));
    }
  }
  return out;
}

std::uint32_t fnv1a32(std::string_view bytes) {
  std::uint32_t h = 2166136261u;
  for (char c : bytes) {
    h ^= static_cast<std::uint32_t>(static_cast<unsigned char>(c));
    h *= 16777619u;
  }
  return h;
}

std::uint32_t hash_subword(std::string_view ngram, std::uint32_t bucket_count) {
  if (bucket_count == 0) throw std::invalid_argument("bucket_count must be >= 1");
  return fnv1a32(ngram) % bucket_count;
}

SubwordIndex::SubwordIndex(const Vocabulary& vocab, SubwordParams params)
    : params_(params), vocab_size_(vocab.size()) {
  offsets_.clear();
  offsets_.reserve(vocab.size() + 1);
  offsets_.push_back(0);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    auto rows = rows_for(vocab.word(static_cast<WordId>(i)), static_cast<WordId>(i));
    flat_.insert(flat_.end(), rows.begin(), rows.end());
    offsets_.push_back(flat_.size());
  }
}

std::vector<std::int32_t> SubwordIndex::rows_for(std::string_view word,
                                                 std::optional<WordId> id) const {
  std::vector<std::int32_t> rows;
  if (id) rows.push_back(*id);
  if (params_.enabled()) {
    auto sub = extract_subwords(word, params_.minn, params_.maxn);
    for (const auto& g : sub.ngrams) {
      rows.push_back(static_cast<std::int32_t>(
          vocab_size_ + hash_subword(g, params_.bucket_count)));
    }
  }
  return rows;
}

}  // namespace c2v
