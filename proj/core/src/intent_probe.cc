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

#include "c2v/intent_probe.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "c2v/cn_io.h"
#include "c2v/error.h"
#include "c2v/random.h"

namespace c2v {

int IntentDataset::class_id(const std::string& name) {
  auto it = std::find(classes.begin(), classes.end(), name);
  if (it != classes.end()) return static_cast<int>(it - classes.begin());
  classes.push_back(name);
  return static_cast<int>(classes.size() - 1);
}

void read_intents(std::istream& in, IntentDataset& data) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError("intent line needs 'label<TAB>tokens'", line_no);
    }
    LabeledUtterance u;
    std::istringstream tokens(line.substr(tab + 1));
    std::string tok;
    while (tokens >> tok) u.tokens.push_back(fold_case(tok));
    if (u.tokens.empty()) throw FormatError("intent line has no tokens", line_no);
    u.label = data.class_id(line.substr(0, tab));
    data.items.push_back(std::move(u));
  }
}

IntentDataset load_intents(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  IntentDataset data;
  read_intents(in, data);
  return data;
}

void write_intents(std::ostream& out, const IntentDataset& data) {
  for (const auto& u : data.items) {
    out << data.classes[static_cast<std::size_t>(u.label)] << '\t';
    for (std::size_t i = 0; i < u.tokens.size(); ++i) {
      if (i) out << ' ';
      out << u.tokens[i];
    }
    out << '\n';
  }
}

std::vector<double> featurize(std::span<const std::string> tokens, const VectorSpace& space,
                              FeatureStats* stats) {
  std::vector<double> mean(space.dim(), 0.0);
  std::size_t used = 0;
  for (const auto& t : tokens) {
    auto v = space.lookup(t);
    if (!v) {
      if (stats) ++stats->unknown_tokens;
      continue;
    }
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += double((*v)[k]);
    ++used;
  }
  if (used > 0) {
    for (auto& x : mean) x /= double(used);
  }
  if (normalize(std::span<double>(mean)) == 0.0 && stats) ++stats->zero_features;
  return mean;
}

DenseMatrix<double> featurize_all(const IntentDataset& data, const VectorSpace& space,
                                  FeatureStats* stats) {
  DenseMatrix<double> out(data.items.size(), space.dim());
  for (std::size_t i = 0; i < data.items.size(); ++i) {
    auto f = featurize(data.items[i].tokens, space, stats);
    std::copy(f.begin(), f.end(), out.row(i).begin());
  }
  return out;
}

std::vector<double> LinearClassifier::probabilities(std::span<const double> x) const {
  std::vector<double> z(classes());
  for (std::size_t c = 0; c < z.size(); ++c) z[c] = bias[c] + dot(weights.row(c), x);
  double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (auto& v : z) v /= sum;
  return z;
}

int LinearClassifier::predict(std::span<const double> x) const {
  int best = 0;
  double best_score = 0.0;
  for (std::size_t c = 0; c < classes(); ++c) {
    double s = bias[c] + dot(weights.row(c), x);
    if (c == 0 || s > best_score) {
      best = static_cast<int>(c);
      best_score = s;
    }
  }
  return best;
}

bool LinearClassifier::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  auto w = weights.data();
  return std::all_of(w.begin(), w.end(), finite) &&
         std::all_of(bias.begin(), bias.end(), finite);
}

double probe_loss(const LinearClassifier& clf, std::span<const double> x, int label) {
  std::vector<double> z(clf.classes());
  for (std::size_t c = 0; c < z.size(); ++c) z[c] = clf.bias[c] + dot(clf.weights.row(c), x);
  double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - top);
  return top + std::log(sum) - z[static_cast<std::size_t>(label)];
}

ProbeGradient probe_gradient(const LinearClassifier& clf, std::span<const double> x, int label) {
  ProbeGradient g{DenseMatrix<double>(clf.classes(), clf.dim()), std::vector<double>(clf.classes())};
  auto p = clf.probabilities(x);
  for (std::size_t c = 0; c < p.size(); ++c) {
    double coef = p[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
    g.bias[c] = coef;
    auto row = g.weights.row(c);
    for (std::size_t k = 0; k < x.size(); ++k) row[k] = coef * x[k];
  }
  return g;
}

LinearClassifier train_probe(const DenseMatrix<double>& features, std::span<const int> labels,
                             std::size_t classes, const ProbeConfig& cfg) {
  if (features.rows() != labels.size()) throw std::invalid_argument("features/labels mismatch");
  std::unordered_set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw Error("probe training needs at least two classes");
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= classes) throw std::invalid_argument("label out of range");
  }
  LinearClassifier clf(classes, features.cols());
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(order, rng);
    for (auto i : order) {
      auto x = features.row(i);
      auto p = clf.probabilities(x);
      for (std::size_t c = 0; c < classes; ++c) {
        double coef = cfg.lr * (p[c] - (static_cast<int>(c) == labels[i] ? 1.0 : 0.0));
        if (coef == 0.0) continue;
        auto w = clf.weights.row(c);
        for (std::size_t k = 0; k < x.size(); ++k) w[k] -= coef * x[k];
        clf.bias[c] -= coef;
      }
    }
  }
  return clf;
}

namespace {

std::vector<int> labels_of(const IntentDataset& data) {
  std::vector<int> labels;
  labels.reserve(data.items.size());
  for (const auto& u : data.items) labels.push_back(u.label);
  return labels;
}

}  // namespace

LinearClassifier train_probe(const IntentDataset& data, const VectorSpace& space,
                             const ProbeConfig& cfg) {
  auto features = featurize_all(data, space);
  auto labels = labels_of(data);
  return train_probe(features, labels, data.classes.size(), cfg);
}

double evaluate_probe(const LinearClassifier& clf, const DenseMatrix<double>& features,
                      std::span<const int> labels) {
  if (labels.empty()) throw Error("cannot evaluate on empty data");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (clf.predict(features.row(i)) != labels[i]) ++wrong;
  }
  return 100.0 * double(wrong) / double(labels.size());
}

double evaluate_probe(const LinearClassifier& clf, const IntentDataset& data,
                      const VectorSpace& space) {
  auto features = featurize_all(data, space);
  auto labels = labels_of(data);
  return evaluate_probe(clf, features, labels);
}

IntentDataset corrupt(const IntentDataset& data, const Lexicon& lexicon, double rate,
                      std::uint64_t seed, CorruptionStats* stats, double threshold,
                      std::span<const std::string> allowed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("rate must be in [0, 1]");
  std::unordered_set<std::string> allow(allowed.begin(), allowed.end());
  ConfusableCache cache(lexicon, threshold);
  std::unordered_map<std::string, std::vector<Confusable>> filtered;
  auto candidates = [&](const std::string& word) -> const std::vector<Confusable>& {
    auto it = filtered.find(word);
    if (it != filtered.end()) return it->second;
    std::vector<Confusable> c;
    if (lexicon.contains(word)) {
      for (const auto& x : cache.get(word)) {
        if (allow.empty() || allow.contains(x.word)) c.push_back(x);
      }
    }
    return filtered.emplace(word, std::move(c)).first->second;
  };

  Rng rng(seed);
  IntentDataset out = data;
  CorruptionStats local;
  for (auto& u : out.items) {
    for (auto& tok : u.tokens) {
      ++local.tokens;
      // One draw per token keeps the stream aligned across vocabularies.
      const bool hit = uniform01(rng) < rate;
      const auto& c = candidates(tok);
      if (c.empty()) {
        ++local.without_confusables;
        continue;
      }
      if (!hit) continue;
      double total = 0.0;
      for (const auto& x : c) total += x.similarity;
      double r = uniform01(rng) * total;
      std::size_t pick = 0;
      while (pick + 1 < c.size() && r >= c[pick].similarity) {
        r -= c[pick].similarity;
        ++pick;
      }
      tok = c[pick].word;
      ++local.substituted;
    }
  }
  if (stats) *stats = local;
  return out;
}

ProbeComparison compare_probe(const IntentDataset& train, const IntentDataset& test,
                              const IntentDataset& corrupted_test, const VectorSpace& space,
                              const ProbeConfig& cfg) {
  ProbeComparison out;
  auto features = featurize_all(train, space, &out.feature_stats);
  auto clf = train_probe(features, labels_of(train), train.classes.size(), cfg);
  out.cer_clean = evaluate_probe(clf, test, space);
  out.cer_corrupt = evaluate_probe(clf, corrupted_test, space);
  return out;
}

std::pair<IntentDataset, IntentDataset> split_dataset(const IntentDataset& data,
                                                      double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(data.items.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);
  auto cut = static_cast<std::size_t>(std::round(train_fraction * double(order.size())));
  std::pair<IntentDataset, IntentDataset> out;
  out.first.classes = out.second.classes = data.classes;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < cut ? out.first : out.second).items.push_back(data.items[order[i]]);
  }
  return out;
}

}  // namespace c2v
