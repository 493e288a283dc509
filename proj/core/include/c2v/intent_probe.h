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

// Linear intent-classification probe over mean-pooled word vectors, used to
// measure how much an embedding degrades under substitution noise.

#ifndef C2V_INTENT_PROBE_H_
#define C2V_INTENT_PROBE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "c2v/acoustics.h"
#include "c2v/matrix.h"
#include "c2v/model.h"

namespace c2v {

struct LabeledUtterance {
  std::vector<std::string> tokens;
  int label = 0;
};

struct IntentDataset {
  std::vector<std::string> classes;  // label id -> name
  std::vector<LabeledUtterance> items;

  // Id of `name`, registering it when new.
  int class_id(const std::string& name);
};

// "label<TAB>token token ..." per line; tokens are case-folded. Labels are
// appended to data.classes in order of first appearance. Throws FormatError
// on lines without a label or tokens.
void read_intents(std::istream& in, IntentDataset& data);
IntentDataset load_intents(const std::filesystem::path& path);
void write_intents(std::ostream& out, const IntentDataset& data);

struct FeatureStats {
  std::size_t zero_features = 0;      // utterances with a zero mean
  std::size_t unknown_tokens = 0;     // tokens the space cannot represent
};

// Mean of the token vectors, L2-normalized. Unrepresentable tokens are left
// out; a zero mean is returned as is and tallied.
std::vector<double> featurize(std::span<const std::string> tokens, const VectorSpace& space,
                              FeatureStats* stats = nullptr);
DenseMatrix<double> featurize_all(const IntentDataset& data, const VectorSpace& space,
                                  FeatureStats* stats = nullptr);

struct LinearClassifier {
  DenseMatrix<double> weights;  // classes x dim
  std::vector<double> bias;

  LinearClassifier() = default;
  LinearClassifier(std::size_t classes, std::size_t dim)
      : weights(classes, dim), bias(classes, 0.0) {}

  std::size_t classes() const { return bias.size(); }
  std::size_t dim() const { return weights.cols(); }
  std::vector<double> probabilities(std::span<const double> x) const;
  int predict(std::span<const double> x) const;  // ties go to the lower class
  bool all_finite() const;
};

// Cross-entropy of one example and its gradient.
double probe_loss(const LinearClassifier& clf, std::span<const double> x, int label);
struct ProbeGradient {
  DenseMatrix<double> weights;
  std::vector<double> bias;
};
ProbeGradient probe_gradient(const LinearClassifier& clf, std::span<const double> x, int label);

struct ProbeConfig {
  int epochs = 30;
  double lr = 0.5;
  std::uint64_t seed = 1;
};

// Multinomial logistic regression from zero weights; plain SGD over a
// freshly shuffled order each epoch. Throws Error for fewer than two
// distinct labels.
LinearClassifier train_probe(const DenseMatrix<double>& features, std::span<const int> labels,
                             std::size_t classes, const ProbeConfig& cfg);
LinearClassifier train_probe(const IntentDataset& data, const VectorSpace& space,
                             const ProbeConfig& cfg);

// Misclassified fraction in percent. Throws Error on empty data.
double evaluate_probe(const LinearClassifier& clf, const DenseMatrix<double>& features,
                      std::span<const int> labels);
double evaluate_probe(const LinearClassifier& clf, const IntentDataset& data,
                      const VectorSpace& space);

struct CorruptionStats {
  std::size_t tokens = 0;
  std::size_t substituted = 0;
  std::size_t without_confusables = 0;
};

// Replaces each token, with probability `rate`, by one of its confusables
// (similarity >= threshold, optionally limited to `allowed`) drawn with
// weight proportional to similarity. Tokens without confusables stay.
IntentDataset corrupt(const IntentDataset& data, const Lexicon& lexicon, double rate,
                      std::uint64_t seed, CorruptionStats* stats = nullptr,
                      double threshold = 0.6, std::span<const std::string> allowed = {});

struct ProbeComparison {
  double cer_clean = 0.0;
  double cer_corrupt = 0.0;
  double delta() const { return cer_corrupt - cer_clean; }
  FeatureStats feature_stats;
};

// Trains on clean `train` and evaluates on `test` and its corrupted copy.
ProbeComparison compare_probe(const IntentDataset& train, const IntentDataset& test,
                              const IntentDataset& corrupted_test, const VectorSpace& space,
                              const ProbeConfig& cfg);

// Deterministic split: a seeded shuffle, the first `train_fraction` for
// training. Class ids are shared.
std::pair<IntentDataset, IntentDataset> split_dataset(const IntentDataset& data,
                                                      double train_fraction, std::uint64_t seed);

}  // namespace c2v

#endif  // C2V_INTENT_PROBE_H_
