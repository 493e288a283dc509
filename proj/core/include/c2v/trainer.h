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

// Skip-gram training over confusion networks.
//
// Four pair generators share one objective:
//   top    skip-gram over the most probable path;
//   intra  pairs between alternatives of the same slot;
//   inter  each alternative paired with every alternative of the slots in
//          its context window;
//   hybrid intra followed by inter, slot by slot.
// Every pair is scored with negative sampling on the composed input vector
// (sum of the word row and its n-gram rows) and the target's output row.

#ifndef C2V_TRAINER_H_
#define C2V_TRAINER_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "c2v/cn_io.h"
#include "c2v/matrix.h"
#include "c2v/model.h"
#include "c2v/random.h"
#include "c2v/vocab.h"

namespace c2v {

enum class Mode { kTop, kIntra, kInter, kHybrid };

std::string_view mode_name(Mode mode);
// Accepts "top", "intra", "inter", "hybrid". Throws std::invalid_argument.
Mode parse_mode(std::string_view name);

struct TrainConfig {
  Mode mode = Mode::kInter;
  int dim = 300;
  int window_max = 5;
  int negatives = 64;
  double lr = 0.01;
  int epochs = 15;
  int minn = 3;
  int maxn = 6;  // 0 disables character n-grams
  std::uint32_t bucket_count = 2'000'000;
  std::uint64_t min_count = 5;
  double subsample_t = 1e-4;
  int max_alternatives_cap = 0;  // 0: keep every alternative
  int workers = 1;
  std::uint64_t seed = 1;
  // Divide the input-side gradient by the number of input rows.
  bool scale_input_gradient = false;
  std::size_t negative_table_size = NegativeTable::kDefaultSize;

  SubwordParams subword_params() const {
    return {minn, maxn, bucket_count};
  }
  // Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct TrainingPair {
  WordId input = 0;
  WordId target = 0;
  bool operator==(const TrainingPair&) const = default;
  auto operator<=>(const TrainingPair&) const = default;
};

// A network over word ids: slots of alternatives, best posterior first.
class IdNetwork {
 public:
  std::size_t slots() const { return offsets_.size() - 1; }
  std::span<const WordId> slot(std::size_t t) const {
    return {ids_.data() + offsets_[t], offsets_[t + 1] - offsets_[t]};
  }
  void add_slot(std::span<const WordId> alternatives);
  void push(WordId id) { ids_.push_back(id); }
  void close_slot();  // ends the slot built with push(); empty slots vanish
  void clear() {
    ids_.clear();
    offsets_.assign(1, 0);
  }

 private:
  std::vector<WordId> ids_;
  std::vector<std::size_t> offsets_{0};
};

// Corpus encoded against a vocabulary: epsilon arcs and pruned words removed,
// alternatives ranked by posterior and optionally capped. The top-1 word of
// each slot is kept separately (-1 when it is epsilon or pruned).
struct EncodedCorpus {
  std::vector<WordId> alts;
  std::vector<std::size_t> slot_begin{0};
  std::vector<WordId> top1;
  std::vector<std::size_t> network_begin{0};

  std::size_t networks() const { return network_begin.size() - 1; }
  std::size_t slots() const { return top1.size(); }
};

EncodedCorpus encode_corpus(std::span<const ConfusionNetwork> networks,
                            const Vocabulary& vocab, int max_alternatives_cap = 0);

// Builds the id network used for one pass over network n: applies frequent
// word subsampling to every arc (top mode keeps only the top-1 word) and
// drops slots left empty.
void filter_network(const EncodedCorpus& corpus, std::size_t n, Mode mode,
                    const Vocabulary& vocab, Rng& rng, IdNetwork& out);

// Uniform window width in [1, window_max], drawn once per center slot.
struct WindowSampler {
  int window_max = 5;
  int draw(Rng& rng) const {
    return 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(window_max)));
  }
};

// Enumerates (input, target) pairs of `net` for `mode`. `window()` is called
// once per center slot in top/inter/hybrid modes and never in intra mode.
template <typename WindowFn, typename Emit>
void for_each_pair(const IdNetwork& net, Mode mode, WindowFn&& window, Emit&& emit) {
  const std::size_t n = net.slots();
  auto intra = [&](std::size_t t) {
    auto s = net.slot(t);
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (i != j) emit(s[i], s[j]);
      }
    }
  };
  auto inter = [&](std::size_t t, bool top_only) {
    const auto b = static_cast<std::size_t>(window());
    const std::size_t lo = t >= b ? t - b : 0;
    const std::size_t hi = std::min(n - 1, t + b);
    auto center = net.slot(t);
    const std::size_t centers = top_only ? std::min<std::size_t>(1, center.size()) : center.size();
    for (std::size_t i = 0; i < centers; ++i) {
      for (std::size_t c = lo; c <= hi; ++c) {
        if (c == t) continue;
        auto ctx = net.slot(c);
        const std::size_t targets = top_only ? std::min<std::size_t>(1, ctx.size()) : ctx.size();
        for (std::size_t a = 0; a < targets; ++a) emit(center[i], ctx[a]);
      }
    }
  };
  for (std::size_t t = 0; t < n; ++t) {
    switch (mode) {
      case Mode::kTop:
        inter(t, true);
        break;
      case Mode::kIntra:
        intra(t);
        break;
      case Mode::kInter:
        inter(t, false);
        break;
      case Mode::kHybrid:
        intra(t);
        inter(t, false);
        break;
    }
  }
}

std::vector<TrainingPair> generate_pairs(const IdNetwork& net, Mode mode,
                                         const WindowSampler& sampler, Rng& rng);

// Seed of the stream a training worker draws subsampling decisions and
// window widths from, in corpus order. Negatives come from a separate stream.
std::uint64_t sample_stream_seed(std::uint64_t seed, int worker);

namespace detail {

inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// -log(sigmoid(x)), stable for large |x|.
inline double neg_log_sigmoid(double x) {
  return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

template <typename Real>
std::vector<double> composed_input(const DenseMatrix<Real>& input,
                                   std::span<const std::int32_t> rows) {
  std::vector<double> h(input.cols(), 0.0);
  for (auto r : rows) {
    auto x = input.row(static_cast<std::size_t>(r));
    for (std::size_t k = 0; k < h.size(); ++k) h[k] += double(x[k]);
  }
  return h;
}

template <typename Real>
double output_score(const std::vector<double>& h, const DenseMatrix<Real>& output,
                    WordId w) {
  auto o = output.row(static_cast<std::size_t>(w));
  double s = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) s += h[k] * double(o[k]);
  return s;
}

// Negative-sampling loss, accumulated in double:
//   -log s(h . o_target) - sum_k log s(-h . o_neg_k),  h = sum of input rows.
template <typename Real>
double ns_loss(const DenseMatrix<Real>& input, const DenseMatrix<Real>& output,
               std::span<const std::int32_t> rows, WordId target,
               std::span<const WordId> negatives) {
  auto h = composed_input(input, rows);
  double loss = neg_log_sigmoid(output_score(h, output, target));
  for (auto w : negatives) loss += neg_log_sigmoid(-output_score(h, output, w));
  return loss;
}

struct NsGradient {
  // d loss / d h. Each occurrence of a row in the input row list receives
  // this gradient.
  std::vector<double> input;
  // d loss / d o_w for the target followed by each negative, in order.
  // Repeated ids appear once per occurrence; their gradients add up.
  std::vector<std::vector<double>> outputs;
};

template <typename Real>
NsGradient ns_gradient(const DenseMatrix<Real>& input, const DenseMatrix<Real>& output,
                       std::span<const std::int32_t> rows, WordId target,
                       std::span<const WordId> negatives) {
  auto h = composed_input(input, rows);
  NsGradient g;
  g.input.assign(h.size(), 0.0);
  auto add = [&](WordId w, double label) {
    double coef = sigmoid(output_score(h, output, w)) - label;
    auto o = output.row(static_cast<std::size_t>(w));
    for (std::size_t k = 0; k < h.size(); ++k) g.input[k] += coef * double(o[k]);
    std::vector<double> go(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) go[k] = coef * h[k];
    g.outputs.push_back(std::move(go));
  };
  add(target, 1.0);
  for (auto w : negatives) add(w, 0.0);
  return g;
}

// Dot product with eight independent partial sums so the compiler can
// vectorize it without reassociating a single accumulator.
template <typename Real>
inline Real dot_lanes(const Real* a, const Real* b, std::size_t n) {
  Real acc[8] = {};
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    for (std::size_t j = 0; j < 8; ++j) acc[j] += a[k + j] * b[k + j];
  }
  Real s = ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

// y += alpha * x
template <typename Real>
inline void axpy(Real alpha, const Real* __restrict x, Real* __restrict y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

// Scores h against the target and negatives, updates their output rows and
// leaves dL/dh in `grad`. Returns the loss before the update.
template <typename Real>
double ns_output_step(DenseMatrix<Real>& output, const Real* h, WordId target,
                      std::span<const WordId> negatives, Real lr, Real* grad,
                      std::vector<double>& coef) {
  const std::size_t dim = output.cols();
  const std::size_t m = negatives.size() + 1;
  coef.resize(m);
  std::fill(grad, grad + dim, Real(0));
  double loss = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    WordId w = j == 0 ? target : negatives[j - 1];
    const Real* o = output.row(static_cast<std::size_t>(w)).data();
    const double s = double(dot_lanes(h, o, dim));
    loss += j == 0 ? neg_log_sigmoid(s) : neg_log_sigmoid(-s);
    coef[j] = sigmoid(s) - (j == 0 ? 1.0 : 0.0);
    axpy(static_cast<Real>(coef[j]), o, grad, dim);
  }
  for (std::size_t j = 0; j < m; ++j) {
    WordId w = j == 0 ? target : negatives[j - 1];
    axpy(static_cast<Real>(-double(lr) * coef[j]), h,
         output.row(static_cast<std::size_t>(w)).data(), dim);
  }
  return loss;
}

template <typename Real>
struct NsScratch {
  std::vector<Real> hidden;
  std::vector<Real> grad;
  std::vector<double> coef;
};

// One SGD step along the exact gradient of ns_loss: every output row moves
// by -lr * coef * h and every input row occurrence by -lr * dL/dh (optionally
// divided by the number of rows). Returns the loss before the step.
template <typename Real>
double ns_update(DenseMatrix<Real>& input, DenseMatrix<Real>& output,
                 std::span<const std::int32_t> rows, WordId target,
                 std::span<const WordId> negatives, Real lr, bool scale_input,
                 NsScratch<Real>& scratch) {
  const std::size_t dim = input.cols();
  scratch.hidden.assign(dim, Real(0));
  scratch.grad.resize(dim);
  for (auto r : rows) {
    axpy(Real(1), input.row(static_cast<std::size_t>(r)).data(), scratch.hidden.data(), dim);
  }
  double loss = ns_output_step(output, scratch.hidden.data(), target, negatives, lr,
                               scratch.grad.data(), scratch.coef);
  Real in_step = -lr;
  if (scale_input && !rows.empty()) in_step /= static_cast<Real>(rows.size());
  for (auto r : rows) {
    axpy(in_step, scratch.grad.data(), input.row(static_cast<std::size_t>(r)).data(), dim);
  }
  return loss;
}

// Sum over distinct rows of (multiplicity)^2: how far the composed vector
// moves when every row occurrence receives the same update.
inline double row_gain(std::span<const std::int32_t> rows) {
  std::vector<std::int32_t> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end());
  double gain = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    gain += double(j - i) * double(j - i);
    i = j;
  }
  return gain;
}

// Runs consecutive ns_update steps that share one input word. The composed
// vector is advanced by exactly what the row updates would add to it, and
// the summed row update is written back once in flush(). In exact arithmetic
// this matches calling ns_update for every pair; it saves re-reading and
// re-writing every input row per pair.
template <typename Real>
class CenterUpdater {
 public:
  CenterUpdater(DenseMatrix<Real>& input, DenseMatrix<Real>& output, bool scale_input)
      : input_(input), output_(output), scale_input_(scale_input),
        hidden_(input.cols()), grad_(input.cols()), delta_(input.cols()) {}

  bool active() const { return active_; }

  void begin(std::span<const std::int32_t> rows, double gain) {
    flush();
    rows_ = rows;
    gain_ = static_cast<Real>(gain);
    std::fill(hidden_.begin(), hidden_.end(), Real(0));
    std::fill(delta_.begin(), delta_.end(), Real(0));
    for (auto r : rows_) {
      axpy(Real(1), input_.row(static_cast<std::size_t>(r)).data(), hidden_.data(), dim());
    }
    active_ = true;
  }

  double step(WordId target, std::span<const WordId> negatives, Real lr) {
    double loss = ns_output_step(output_, hidden_.data(), target, negatives, lr, grad_.data(), coef_);
    Real in_step = -lr;
    if (scale_input_ && !rows_.empty()) in_step /= static_cast<Real>(rows_.size());
    axpy(in_step, grad_.data(), delta_.data(), dim());
    axpy(in_step * gain_, grad_.data(), hidden_.data(), dim());
    return loss;
  }

  void flush() {
    if (!active_) return;
    for (auto r : rows_) {
      axpy(Real(1), delta_.data(), input_.row(static_cast<std::size_t>(r)).data(), dim());
    }
    active_ = false;
  }

 private:
  std::size_t dim() const { return hidden_.size(); }

  DenseMatrix<Real>& input_;
  DenseMatrix<Real>& output_;
  bool scale_input_;
  std::span<const std::int32_t> rows_;
  Real gain_ = 0;
  bool active_ = false;
  std::vector<Real> hidden_, grad_, delta_;
  std::vector<double> coef_;
};

}  // namespace detail

// Loss of one pair on a model (computed in double precision).
double pair_loss(const EmbeddingModel& model, const TrainingPair& pair,
                 std::span<const WordId> negatives);

// In-place SGD step for one pair. Returns the loss before the step.
double sgd_step(EmbeddingModel& model, const TrainingPair& pair,
                std::span<const WordId> negatives, float lr,
                bool scale_input_gradient = false);

// Draws `count` negatives, redrawing any that equal `target`.
void draw_negatives(const NegativeTable& table, WordId target, int count, Rng& rng,
                    std::vector<WordId>& out);

struct TrainHooks {
  // Receives "progress<TAB>fraction<TAB>lr<TAB>mean loss" every 2^16 pairs.
  std::ostream* progress = nullptr;
  // Called for every trained pair (serialized only when workers == 1).
  std::function<void(const TrainingPair&)> on_pair;
};

struct TrainResult {
  EmbeddingModel model;
  std::vector<double> epoch_mean_loss;
  std::uint64_t pairs = 0;
  std::uint64_t estimated_pairs = 0;
  double final_lr = 0.0;
};

// lr0 * max(1e-4, 1 - progress).
double learning_rate(double lr0, double progress);

// Initializes input rows uniformly in [-1/dim, 1/dim] and output rows at
// zero, or copies a compatible `pretrained` model (same dim and subword
// parameters; vocabulary rows matched by word), then trains for cfg.epochs
// passes. Worker w processes a contiguous shard of the networks; workers
// share parameters without locking.
TrainResult train(const EncodedCorpus& corpus, Vocabulary vocab, const TrainConfig& cfg,
                  const EmbeddingModel* pretrained = nullptr, const TrainHooks& hooks = {});

// Builds the vocabulary, encodes the corpus and trains.
TrainResult train(std::span<const ConfusionNetwork> networks, const TrainConfig& cfg,
                  const EmbeddingModel* pretrained = nullptr, const TrainHooks& hooks = {});

}  // namespace c2v

#endif  // C2V_TRAINER_H_
