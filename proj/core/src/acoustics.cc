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

#include "c2v/acoustics.h"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "c2v/error.h"
#include "c2v/random.h"

namespace c2v {
namespace {

// Similarities are ratios of small integers; compare with a little slack so
// that 1 - 2/5 >= 0.6 holds regardless of rounding.
constexpr double kSimilarityEps = 1e-12;

double ratio_similarity(int dist, std::size_t lp, std::size_t lq) {
  std::size_t longest = std::max(lp, lq);
  if (longest == 0) return 1.0;
  return 1.0 - double(dist) / double(longest);
}

// Upper bound on similarity from lengths alone (distance >= |lp - lq|).
double length_bound(std::size_t lp, std::size_t lq) {
  std::size_t longest = std::max(lp, lq);
  std::size_t diff = lp > lq ? lp - lq : lq - lp;
  return 1.0 - double(diff) / double(longest);
}

double indexed_similarity(const Lexicon& lex, std::size_t a, std::size_t b,
                          double floor = -1.0) {
  double best = 0.0;
  for (const auto& p : lex.phone_ids(a)) {
    for (const auto& q : lex.phone_ids(b)) {
      if (length_bound(p.size(), q.size()) + kSimilarityEps < std::max(best, floor)) {
        continue;
      }
      int d = edit_distance(std::span<const std::uint16_t>(p),
                            std::span<const std::uint16_t>(q));
      best = std::max(best, ratio_similarity(d, p.size(), q.size()));
      if (best >= 1.0) return 1.0;
    }
  }
  return best;
}

std::size_t require_index(const Lexicon& lex, std::string_view word) {
  auto idx = lex.index_of(word);
  if (!idx) throw MissingWordError(std::string(word));
  return *idx;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double round6(double x) { return std::round(x * 1e6) / 1e6; }

}  // namespace

int phone_edit_distance(const Pronunciation& p, const Pronunciation& q) {
  return edit_distance(std::span<const std::string>(p),
                       std::span<const std::string>(q));
}

double pronunciation_similarity(const Pronunciation& p,
                                const Pronunciation& q) {
  return ratio_similarity(phone_edit_distance(p, q), p.size(), q.size());
}

std::string strip_stress(std::string_view phone) {
  std::size_t n = phone.size();
  while (n > 0 && phone[n - 1] >= '0' && phone[n - 1] <= '9') --n;
  return std::string(phone.substr(0, n));
}

std::uint16_t Lexicon::intern(const std::string& phone) {
  auto [it, inserted] = phone_index_.try_emplace(
      phone, static_cast<std::uint16_t>(phones_.size()));
  if (inserted) phones_.push_back(phone);
  return it->second;
}

void Lexicon::add(std::string_view word, const Pronunciation& pron) {
  if (pron.empty()) throw FormatError("empty pronunciation for '" + std::string(word) + "'");
  std::string key = fold_case(word);
  PhoneIds ids;
  ids.reserve(pron.size());
  for (const auto& ph : pron) {
    std::string stripped = strip_stress(ph);
    if (stripped.empty()) {
      throw FormatError("empty phone symbol for '" + key + "'");
    }
    ids.push_back(intern(stripped));
  }
  auto [it, inserted] = index_.try_emplace(key, words_.size());
  if (inserted) {
    words_.push_back(key);
    prons_.emplace_back();
  }
  auto& list = prons_[it->second];
  if (std::find(list.begin(), list.end(), ids) == list.end()) {
    list.push_back(std::move(ids));
  }
}

bool Lexicon::contains(std::string_view word) const {
  return index_.find(std::string(word)) != index_.end();
}

std::optional<std::size_t> Lexicon::index_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Pronunciation> Lexicon::pronunciations(
    std::string_view word) const {
  std::size_t idx = require_index(*this, word);
  std::vector<Pronunciation> out;
  for (const auto& ids : prons_[idx]) {
    Pronunciation p;
    for (auto id : ids) p.push_back(phones_[id]);
    out.push_back(std::move(p));
  }
  return out;
}

Lexicon parse_lexicon(std::istream& in) {
  Lexicon lex;
  std::size_t rejected = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(";;;", 0) == 0 || line.rfind("#", 0) == 0) continue;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      ++rejected;
      continue;
    }
    std::string_view word = fields[0];
    // "READ(2)" is the second pronunciation of "READ".
    if (word.size() > 3 && word.back() == ')') {
      auto open = word.rfind('(');
      if (open != std::string_view::npos && open > 0) {
        std::string_view inner = word.substr(open + 1, word.size() - open - 2);
        bool digits = !inner.empty() &&
                      std::all_of(inner.begin(), inner.end(),
                                  [](char c) { return c >= '0' && c <= '9'; });
        if (digits) word = word.substr(0, open);
      }
    }
    Pronunciation pron;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      pron.emplace_back(fields[i]);
    }
    lex.add(word, pron);
  }
  if (in.bad()) throw IoError("read error in lexicon stream");
  lex.set_rejected_lines(rejected);
  return lex;
}

Lexicon parse_lexicon_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_lexicon(in);
}

double acoustic_similarity(std::string_view w1, std::string_view w2,
                           const Lexicon& lex) {
  std::size_t a = require_index(lex, w1);
  std::size_t b = require_index(lex, w2);
  return indexed_similarity(lex, a, b);
}

std::vector<Confusable> confusable_set(std::string_view word,
                                       const Lexicon& lex, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("similarity threshold must lie in (0, 1]");
  }
  std::size_t self = require_index(lex, word);
  std::vector<Confusable> out;
  for (std::size_t j = 0; j < lex.size(); ++j) {
    if (j == self) continue;
    double sim = indexed_similarity(lex, self, j, threshold);
    if (sim + kSimilarityEps >= threshold) {
      out.push_back({lex.words()[j], sim});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.word < b.word;
  });
  return out;
}

const std::vector<Confusable>& ConfusableCache::get(const std::string& word) {
  auto it = cache_.find(word);
  if (it != cache_.end()) return it->second;
  std::vector<Confusable> result;
  if (lex_.contains(word)) result = confusable_set(word, lex_, threshold_);
  return cache_.emplace(word, std::move(result)).first->second;
}

void SynthesisConfig::validate() const {
  if (!(confusion_prob >= 0.0 && confusion_prob <= 1.0)) {
    throw std::invalid_argument("confusion_prob must lie in [0, 1]");
  }
  if (max_alternatives < 1) {
    throw std::invalid_argument("max_alternatives must be at least 1");
  }
  if (!(similarity_threshold > 0.0 && similarity_threshold <= 1.0)) {
    throw std::invalid_argument("similarity_threshold must lie in (0, 1]");
  }
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("temperature must be positive");
  }
}

ConfusionNetwork synthesize_network(std::span<const std::string> tokens,
                                    std::string utterance_id,
                                    std::size_t utterance_index,
                                    ConfusableCache& confusables,
                                    const SynthesisConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, utterance_index));
  ConfusionNetwork cn;
  cn.utterance_id = std::move(utterance_id);
  cn.slots.reserve(tokens.size());
  for (const auto& token : tokens) {
    // One draw per token keeps the stream aligned across configurations.
    bool confuse = uniform01(rng) < cfg.confusion_prob;
    const auto& cands = confusables.get(token);
    std::size_t want = std::min<std::size_t>(
        static_cast<std::size_t>(cfg.max_alternatives - 1), cands.size());
    if (!confuse || want == 0) {
      cn.slots.push_back(Slot{{Alternative{token, 1.0}}});
      continue;
    }
    std::vector<std::size_t> pool(cands.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    std::vector<std::size_t> picked;
    for (std::size_t k = 0; k < want; ++k) {
      double total = 0.0;
      for (auto i : pool) total += cands[i].similarity;
      double u = uniform01(rng) * total;
      std::size_t chosen = pool.size() - 1;
      for (std::size_t p = 0; p < pool.size(); ++p) {
        u -= cands[pool[p]].similarity;
        if (u < 0.0) {
          chosen = p;
          break;
        }
      }
      picked.push_back(pool[chosen]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(chosen));
    }
    std::sort(picked.begin(), picked.end());  // best similarity first

    std::vector<double> logits;
    logits.push_back(1.0 / cfg.temperature);
    for (auto i : picked) logits.push_back(cands[i].similarity / cfg.temperature);
    double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (auto& l : logits) {
      l = std::exp(l - mx);
      z += l;
    }
    Slot slot;
    slot.alternatives.push_back({token, round6(logits[0] / z)});
    for (std::size_t k = 0; k < picked.size(); ++k) {
      slot.alternatives.push_back(
          {cands[picked[k]].word, round6(logits[k + 1] / z)});
    }
    cn.slots.push_back(std::move(slot));
  }
  return cn;
}

std::vector<ConfusionNetwork> synthesize_cn_corpus(
    std::span<const ConfusionNetwork> sentences, const Lexicon& lex,
    const SynthesisConfig& cfg) {
  cfg.validate();
  ConfusableCache cache(lex, cfg.similarity_threshold);
  std::vector<ConfusionNetwork> out;
  out.reserve(sentences.size());
  for (std::size_t n = 0; n < sentences.size(); ++n) {
    auto tokens = top1_path(sentences[n]);
    out.push_back(synthesize_network(tokens, sentences[n].utterance_id, n,
                                     cache, cfg));
  }
  return out;
}

std::vector<ConfusionNetwork> synthesize_cn_corpus(std::istream& corpus,
                                                   const Lexicon& lex,
                                                   const SynthesisConfig& cfg) {
  PlainCorpusReader reader(corpus);
  auto sentences = read_all(reader);
  return synthesize_cn_corpus(sentences, lex, cfg);
}

namespace {

// Mean over tokens of min(max_alternatives - 1, |confusables|).
double mean_extra_alternatives(std::span<const ConfusionNetwork> sentences,
                               const Lexicon& lex, const SynthesisConfig& cfg) {
  ConfusableCache cache(lex, cfg.similarity_threshold);
  std::size_t tokens = 0;
  double extra = 0.0;
  for (const auto& cn : sentences) {
    for (const auto& w : top1_path(cn)) {
      ++tokens;
      extra += double(std::min<std::size_t>(
          static_cast<std::size_t>(cfg.max_alternatives - 1), cache.get(w).size()));
    }
  }
  return tokens == 0 ? 0.0 : extra / double(tokens);
}

}  // namespace

double expected_mean_alternatives(std::span<const ConfusionNetwork> sentences,
                                  const Lexicon& lex,
                                  const SynthesisConfig& cfg) {
  cfg.validate();
  return 1.0 + cfg.confusion_prob * mean_extra_alternatives(sentences, lex, cfg);
}

Calibration calibrate_confusion_prob(
    std::span<const ConfusionNetwork> sentences, const Lexicon& lex,
    const SynthesisConfig& cfg, double target) {
  cfg.validate();
  double extra = mean_extra_alternatives(sentences, lex, cfg);
  Calibration c;
  if (extra <= 0.0) {
    c.confusion_prob = 0.0;
    c.expected_mean = 1.0;
    c.reachable = target <= 1.0;
    return c;
  }
  double p = (target - 1.0) / extra;
  c.reachable = p >= 0.0 && p <= 1.0;
  c.confusion_prob = std::clamp(p, 0.0, 1.0);
  c.expected_mean = 1.0 + c.confusion_prob * extra;
  return c;
}

AcousticTasks generate_acoustic_tasks(const Lexicon& lex,
                                      const AcousticTaskConfig& cfg,
                                      std::span<const std::string> restrict_to) {
  if (!(cfg.homophone_threshold > 0.0 && cfg.homophone_threshold <= 1.0)) {
    throw std::invalid_argument("homophone threshold must lie in (0, 1]");
  }
  if (cfg.similarity_bins < 1) {
    throw std::invalid_argument("similarity_bins must be positive");
  }
  std::vector<std::size_t> pool;
  if (restrict_to.empty()) {
    for (std::size_t i = 0; i < lex.size(); ++i) pool.push_back(i);
  } else {
    std::set<std::size_t> uniq;
    for (const auto& w : restrict_to) {
      if (auto idx = lex.index_of(w)) uniq.insert(*idx);
    }
    pool.assign(uniq.begin(), uniq.end());
  }
  std::sort(pool.begin(), pool.end(), [&](auto a, auto b) {
    return lex.words()[a] < lex.words()[b];
  });

  // Homophone pairs (a < b in pool order).
  std::vector<std::pair<std::size_t, std::size_t>> homophones;
  if (cfg.homophone_threshold >= 1.0 - kSimilarityEps) {
    std::map<Lexicon::PhoneIds, std::vector<std::size_t>> by_pron;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      for (const auto& p : lex.phone_ids(pool[k])) by_pron[p].push_back(k);
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto& [pron, members] : by_pron) {
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
          seen.insert({members[i], members[j]});
        }
      }
    }
    homophones.assign(seen.begin(), seen.end());
  } else {
    for (std::size_t i = 0; i < pool.size(); ++i) {
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        double s = indexed_similarity(lex, pool[i], pool[j], cfg.homophone_threshold);
        if (s + kSimilarityEps >= cfg.homophone_threshold) homophones.push_back({i, j});
      }
    }
  }
  if (homophones.empty()) {
    throw Error("lexicon yields no homophone pair at threshold " +
                std::to_string(cfg.homophone_threshold));
  }

  Rng rng(cfg.seed);
  AcousticTasks tasks;
  auto word = [&](std::size_t k) -> const std::string& {
    return lex.words()[pool[k]];
  };

  if (homophones.size() >= 2) {
    std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> used;
    std::size_t attempts = 0;
    std::size_t max_attempts = 50 * cfg.analogy_count + 100;
    while (tasks.analogies.size() < cfg.analogy_count && attempts++ < max_attempts) {
      auto p = homophones[uniform_below(rng, homophones.size())];
      auto q = homophones[uniform_below(rng, homophones.size())];
      if (uniform01(rng) < 0.5) std::swap(p.first, p.second);
      if (uniform01(rng) < 0.5) std::swap(q.first, q.second);
      std::set<std::size_t> distinct{p.first, p.second, q.first, q.second};
      if (distinct.size() != 4) continue;
      if (!used.insert({p.first, p.second, q.first, q.second}).second) continue;
      tasks.analogies.push_back(
          {word(p.first), word(p.second), word(q.first), word(q.second)});
    }
  }

  // Similarity pairs: cycle through equal-width bins over [0, 1] and draw a
  // partner for a random anchor word from the requested bin.
  const int bins = cfg.similarity_bins;
  auto bin_of = [&](double s) {
    int b = static_cast<int>(std::floor(s * bins + kSimilarityEps));
    return std::clamp(b, 0, bins - 1);
  };
  std::set<std::pair<std::size_t, std::size_t>> used_pairs;
  std::vector<std::size_t> candidates;
  if (pool.size() >= 2) {
    for (std::size_t i = 0; i < cfg.similarity_pair_count; ++i) {
      int target = static_cast<int>(i % static_cast<std::size_t>(bins));
      for (int attempt = 0; attempt < 20; ++attempt) {
        std::size_t a = uniform_below(rng, pool.size());
        candidates.clear();
        std::vector<double> sims;
        for (std::size_t b = 0; b < pool.size(); ++b) {
          if (b == a) continue;
          double s = indexed_similarity(lex, pool[a], pool[b]);
          if (bin_of(s) == target) {
            candidates.push_back(b);
            sims.push_back(s);
          }
        }
        if (candidates.empty()) continue;
        std::size_t pick = uniform_below(rng, candidates.size());
        std::size_t b = candidates[pick];
        auto key = std::minmax(a, b);
        if (!used_pairs.insert({key.first, key.second}).second) continue;
        tasks.similarity_pairs.push_back({word(a), word(b), sims[pick]});
        break;
      }
    }
  }
  return tasks;
}

void write_analogies(std::ostream& out, std::string_view section,
                     std::span<const AcousticAnalogy> analogies) {
  out << ": " << section << '\n';
  for (const auto& q : analogies) {
    out << q.w1 << ' ' << q.w2 << ' ' << q.w3 << ' ' << q.w4 << '\n';
  }
}

void write_similarity_pairs(std::ostream& out,
                            std::span<const AcousticPair> pairs) {
  for (const auto& p : pairs) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", p.score);
    out << p.w1 << '\t' << p.w2 << '\t' << buf << '\n';
  }
}

}  // namespace c2v
