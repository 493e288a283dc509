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

#include "c2v/trainer.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "c2v/error.h"

namespace c2v {

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kTop:
      return "top";
    case Mode::kIntra:
      return "intra";
    case Mode::kInter:
      return "inter";
    case Mode::kHybrid:
      return "hybrid";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  if (name == "top") return Mode::kTop;
  if (name == "intra") return Mode::kIntra;
  if (name == "inter") return Mode::kInter;
  if (name == "hybrid") return Mode::kHybrid;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected top, intra, inter or hybrid)");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (dim < 1) fail("dim must be >= 1");
  if (window_max < 1) fail("window_max must be >= 1");
  if (negatives < 1) fail("negatives must be >= 1");
  if (!(lr > 0.0)) fail("lr must be > 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (maxn < 0) fail("maxn must be >= 0");
  if (maxn > 0 && (minn < 1 || minn > maxn)) fail("n-gram bounds need 1 <= minn <= maxn");
  if (maxn > 255) fail("maxn must fit in a byte");
  if (maxn > 0 && bucket_count == 0) fail("bucket_count must be >= 1 when n-grams are enabled");
  if (min_count < 1) fail("min_count must be >= 1");
  if (!(subsample_t > 0.0)) fail("subsample_t must be > 0");
  if (max_alternatives_cap < 0) fail("max_alternatives_cap must be >= 0");
  if (workers < 1) fail("workers must be >= 1");
}

void IdNetwork::add_slot(std::span<const WordId> alternatives) {
  if (alternatives.empty()) return;
  ids_.insert(ids_.end(), alternatives.begin(), alternatives.end());
  offsets_.push_back(ids_.size());
}

void IdNetwork::close_slot() {
  if (ids_.size() > offsets_.back()) offsets_.push_back(ids_.size());
}

EncodedCorpus encode_corpus(std::span<const ConfusionNetwork> networks,
                            const Vocabulary& vocab, int max_alternatives_cap) {
  EncodedCorpus out;
  std::vector<const Alternative*> ranked;
  for (const auto& cn : networks) {
    for (const auto& slot : cn.slots) {
      ranked.clear();
      for (const auto& alt : slot.alternatives) {
        if (!alt.is_epsilon()) ranked.push_back(&alt);
      }
      std::stable_sort(ranked.begin(), ranked.end(), [](auto* a, auto* b) {
        return a->posterior > b->posterior;
      });
      if (max_alternatives_cap > 0 &&
          ranked.size() > static_cast<std::size_t>(max_alternatives_cap)) {
        ranked.resize(static_cast<std::size_t>(max_alternatives_cap));
      }
      for (auto* alt : ranked) {
        if (auto id = vocab.id(alt->word)) out.alts.push_back(*id);
      }
      out.slot_begin.push_back(out.alts.size());
      WordId top = -1;
      if (auto i = slot.top1_index()) {
        if (auto id = vocab.id(slot.alternatives[*i].word)) top = *id;
      }
      out.top1.push_back(top);
    }
    out.network_begin.push_back(out.top1.size());
  }
  return out;
}

void filter_network(const EncodedCorpus& corpus, std::size_t n, Mode mode,
                    const Vocabulary& vocab, Rng& rng, IdNetwork& out) {
  out.clear();
  auto keep = [&](WordId id) {
    double p = vocab.keep_prob(id);
    return p >= 1.0 || uniform01(rng) < p;
  };
  for (std::size_t s = corpus.network_begin[n]; s < corpus.network_begin[n + 1]; ++s) {
    if (mode == Mode::kTop) {
      WordId id = corpus.top1[s];
      if (id >= 0 && keep(id)) {
        out.push(id);
        out.close_slot();
      }
      continue;
    }
    for (std::size_t a = corpus.slot_begin[s]; a < corpus.slot_begin[s + 1]; ++a) {
      if (keep(corpus.alts[a])) out.push(corpus.alts[a]);
    }
    out.close_slot();
  }
}

std::vector<TrainingPair> generate_pairs(const IdNetwork& net, Mode mode,
                                         const WindowSampler& sampler, Rng& rng) {
  std::vector<TrainingPair> pairs;
  for_each_pair(
      net, mode, [&] { return sampler.draw(rng); },
      [&](WordId in, WordId tgt) { pairs.push_back({in, tgt}); });
  return pairs;
}

std::uint64_t sample_stream_seed(std::uint64_t seed, int worker) {
  return derive_seed(seed, 0x5A00 + 2 * static_cast<std::uint64_t>(worker));
}

double pair_loss(const EmbeddingModel& model, const TrainingPair& pair,
                 std::span<const WordId> negatives) {
  return detail::ns_loss(model.input(), model.output(), model.subwords().rows(pair.input),
                         pair.target, negatives);
}

double sgd_step(EmbeddingModel& model, const TrainingPair& pair,
                std::span<const WordId> negatives, float lr, bool scale_input_gradient) {
  detail::NsScratch<float> scratch;
  return detail::ns_update(model.input(), model.output(), model.subwords().rows(pair.input),
                           pair.target, negatives, lr, scale_input_gradient, scratch);
}

void draw_negatives(const NegativeTable& table, WordId target, int count, Rng& rng,
                    std::vector<WordId>& out) {
  out.clear();
  while (out.size() < static_cast<std::size_t>(count)) {
    WordId w = table.draw(rng);
    if (w != target) out.push_back(w);
  }
}

double learning_rate(double lr0, double progress) {
  return lr0 * std::max(1e-4, 1.0 - progress);
}

namespace {

constexpr std::uint64_t kProgressInterval = 1u << 16;
constexpr std::uint64_t kFlushInterval = 1024;

// Seed streams. Subsampling and window widths share one stream per worker
// and negatives use another, so the pair stream does not depend on K.
constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kDryRunStream = 0xD2A;
std::uint64_t negative_stream(int worker) { return 0x5A01 + 2 * static_cast<std::uint64_t>(worker); }

void random_init(EmbeddingModel& model, Rng& rng) {
  const double bound = 1.0 / double(model.dim());
  for (auto& x : model.input().data()) {
    x = static_cast<float>((2.0 * uniform01(rng) - 1.0) * bound);
  }
  auto out = model.output().data();
  std::fill(out.begin(), out.end(), 0.0f);
}

void warm_start(EmbeddingModel& model, const EmbeddingModel& pretrained) {
  if (pretrained.dim() != model.dim()) {
    throw Error("warm start needs the same dim (" + std::to_string(pretrained.dim()) +
                " vs " + std::to_string(model.dim()) + ")");
  }
  if (!(pretrained.subword_params() == model.subword_params())) {
    throw Error("warm start needs identical bucket_count/minn/maxn");
  }
  const std::size_t v = model.vocab().size();
  const std::size_t pv = pretrained.vocab().size();
  for (std::size_t i = 0; i < v; ++i) {
    auto id = pretrained.vocab().id(model.vocab().word(static_cast<WordId>(i)));
    if (!id) continue;
    auto src_in = pretrained.input().row(static_cast<std::size_t>(*id));
    std::copy(src_in.begin(), src_in.end(), model.input().row(i).begin());
    auto src_out = pretrained.output().row(static_cast<std::size_t>(*id));
    std::copy(src_out.begin(), src_out.end(), model.output().row(i).begin());
  }
  const std::size_t buckets = model.input().rows() - v;
  for (std::size_t b = 0; b < buckets; ++b) {
    auto src = pretrained.input().row(pv + b);
    std::copy(src.begin(), src.end(), model.input().row(v + b).begin());
  }
}

std::uint64_t count_epoch_pairs(const EncodedCorpus& corpus, const Vocabulary& vocab,
                                const TrainConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, kDryRunStream));
  WindowSampler sampler{cfg.window_max};
  IdNetwork net;
  std::uint64_t pairs = 0;
  for (std::size_t n = 0; n < corpus.networks(); ++n) {
    filter_network(corpus, n, cfg.mode, vocab, rng, net);
    for_each_pair(
        net, cfg.mode, [&] { return sampler.draw(rng); }, [&](WordId, WordId) { ++pairs; });
  }
  return pairs;
}

struct SharedState {
  std::mutex mu;
  std::uint64_t processed = 0;
  std::uint64_t next_report = kProgressInterval;
  double report_loss = 0.0;
  std::uint64_t report_pairs = 0;
  std::atomic<double> lr{0.0};
  std::vector<double> epoch_loss;
  std::vector<std::uint64_t> epoch_pairs;
};

}  // namespace

TrainResult train(const EncodedCorpus& corpus, Vocabulary vocab, const TrainConfig& cfg,
                  const EmbeddingModel* pretrained, const TrainHooks& hooks) {
  cfg.validate();
  vocab.set_subsampling(cfg.subsample_t);
  EmbeddingModel model(vocab, cfg.subword_params(), static_cast<std::size_t>(cfg.dim));
  Rng init_rng(derive_seed(cfg.seed, kInitStream));
  random_init(model, init_rng);
  if (pretrained != nullptr) warm_start(model, *pretrained);

  std::vector<double> gains(vocab.size());
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    gains[w] = detail::row_gain(model.subwords().rows(static_cast<WordId>(w)));
  }
  const NegativeTable table(vocab, 0.75, std::max(cfg.negative_table_size, vocab.size()));
  const std::uint64_t per_epoch = count_epoch_pairs(corpus, vocab, cfg);
  const std::uint64_t estimate = std::max<std::uint64_t>(1, per_epoch * std::uint64_t(cfg.epochs));

  SharedState shared;
  shared.lr = cfg.lr;
  shared.epoch_loss.assign(static_cast<std::size_t>(cfg.epochs), 0.0);
  shared.epoch_pairs.assign(static_cast<std::size_t>(cfg.epochs), 0);

  const std::size_t networks = corpus.networks();
  const int workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), std::max<std::size_t>(1, networks)));

  auto flush = [&](int epoch, double loss, std::uint64_t pairs) {
    std::lock_guard<std::mutex> lock(shared.mu);
    shared.processed += pairs;
    shared.epoch_loss[static_cast<std::size_t>(epoch)] += loss;
    shared.epoch_pairs[static_cast<std::size_t>(epoch)] += pairs;
    shared.report_loss += loss;
    shared.report_pairs += pairs;
    double progress = double(shared.processed) / double(estimate);
    double lr = learning_rate(cfg.lr, progress);
    shared.lr = lr;
    if (shared.processed >= shared.next_report) {
      while (shared.next_report <= shared.processed) shared.next_report += kProgressInterval;
      if (hooks.progress != nullptr) {
        char line[128];
        std::snprintf(line, sizeof line, "progress\t%.6f\t%.6g\t%.6f\n", std::min(1.0, progress),
                      lr, shared.report_pairs ? shared.report_loss / double(shared.report_pairs) : 0.0);
        *hooks.progress << line << std::flush;
      }
      shared.report_loss = 0.0;
      shared.report_pairs = 0;
    }
  };

  auto work = [&](int w) {
    Rng sample_rng(sample_stream_seed(cfg.seed, w));
    Rng neg_rng(derive_seed(cfg.seed, negative_stream(w)));
    const WindowSampler sampler{cfg.window_max};
    const std::size_t begin = networks * static_cast<std::size_t>(w) / static_cast<std::size_t>(workers);
    const std::size_t end = networks * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(workers);
    IdNetwork net;
    std::vector<WordId> negatives;
    detail::CenterUpdater<float> updater(model.input(), model.output(), cfg.scale_input_gradient);
    const auto& subwords = model.subwords();
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      double loss = 0.0;
      std::uint64_t pairs = 0;
      float lr = static_cast<float>(shared.lr.load());
      for (std::size_t n = begin; n < end; ++n) {
        filter_network(corpus, n, cfg.mode, vocab, sample_rng, net);
        WordId center = -1;
        for_each_pair(
            net, cfg.mode, [&] { return sampler.draw(sample_rng); },
            [&](WordId in, WordId tgt) {
              if (hooks.on_pair) hooks.on_pair(TrainingPair{in, tgt});
              if (in != center) {
                updater.begin(subwords.rows(in), gains[static_cast<std::size_t>(in)]);
                center = in;
              }
              draw_negatives(table, tgt, cfg.negatives, neg_rng, negatives);
              loss += updater.step(tgt, std::span<const WordId>(negatives), lr);
              if (++pairs == kFlushInterval) {
                flush(epoch, loss, pairs);
                loss = 0.0;
                pairs = 0;
                lr = static_cast<float>(shared.lr.load());
              }
            });
        updater.flush();
      }
      flush(epoch, loss, pairs);
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }

  TrainResult result{std::move(model), {}, shared.processed, estimate, shared.lr.load()};
  for (std::size_t e = 0; e < shared.epoch_loss.size(); ++e) {
    result.epoch_mean_loss.push_back(
        shared.epoch_pairs[e] ? shared.epoch_loss[e] / double(shared.epoch_pairs[e]) : 0.0);
  }
  return result;
}

TrainResult train(std::span<const ConfusionNetwork> networks, const TrainConfig& cfg,
                  const EmbeddingModel* pretrained, const TrainHooks& hooks) {
  cfg.validate();
  Vocabulary vocab = build_vocabulary(networks, cfg.min_count);
  EncodedCorpus corpus = encode_corpus(networks, vocab, cfg.max_alternatives_cap);
  return train(corpus, std::move(vocab), cfg, pretrained, hooks);
}

}  // namespace c2v
