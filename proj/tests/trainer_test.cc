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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "c2v/cn_io.h"
#include "c2v/error.h"
#include "c2v/model.h"
#include "oracles.h"

namespace c2v {
namespace {

constexpr const char* kFigureLine =
    "u1 i:0.7 eye:0.3 | want:0.4 wand:0.3 won't:0.2 what:0.1 | to:0.5 two:0.3 tees:0.2 | "
    "sit:0.5 seat:0.3 seed:0.1 eat:0.1";

using WordPair = std::pair<std::string, std::string>;

std::vector<WordPair> named(const std::vector<TrainingPair>& pairs, const Vocabulary& v) {
  std::vector<WordPair> out;
  for (const auto& p : pairs) out.emplace_back(v.word(p.input), v.word(p.target));
  return out;
}

bool contains(const std::vector<WordPair>& pairs, const WordPair& p) {
  return std::find(pairs.begin(), pairs.end(), p) != pairs.end();
}

IdNetwork whole_network(const EncodedCorpus& corpus, std::size_t n, Mode mode, const Vocabulary& v) {
  IdNetwork net;
  Rng unused(0);
  filter_network(corpus, n, mode, v, unused, net);
  return net;
}

struct Figure {
  std::vector<ConfusionNetwork> nets = parse_cn_text(kFigureLine);
  Vocabulary vocab = build_vocabulary(nets, 1);
  EncodedCorpus corpus = encode_corpus(nets, vocab);
};

TEST(Modes, ParseAndName) {
  for (Mode m : {Mode::kTop, Mode::kIntra, Mode::kInter, Mode::kHybrid}) {
    EXPECT_EQ(parse_mode(mode_name(m)), m);
  }
  EXPECT_THROW(parse_mode("sideways"), std::invalid_argument);
}

TEST(Pairs, IntraFigureExample) {
  Figure f;
  auto net = whole_network(f.corpus, 0, Mode::kIntra, f.vocab);
  Rng rng(1);
  auto pairs = named(generate_pairs(net, Mode::kIntra, WindowSampler{5}, rng), f.vocab);
  for (const WordPair& p : std::vector<WordPair>{
           {"want", "wand"}, {"want", "won't"}, {"won't", "what"}, {"wand", "what"}, {"i", "eye"}, {"eye", "i"}}) {
    EXPECT_TRUE(contains(pairs, p)) << p.first << "," << p.second;
  }
  // k alternatives give k(k-1) ordered pairs per slot, none across slots.
  EXPECT_EQ(pairs.size(), 2u * 1 + 4u * 3 + 3u * 2 + 4u * 3);
  EXPECT_FALSE(contains(pairs, {"want", "to"}));
}

TEST(Pairs, InterFigureExample) {
  Figure f;
  auto net = whole_network(f.corpus, 0, Mode::kInter, f.vocab);
  std::vector<TrainingPair> pairs;
  for_each_pair(net, Mode::kInter, [] { return 1; },
                [&](WordId a, WordId b) { pairs.push_back({a, b}); });
  auto words = named(pairs, f.vocab);
  for (const WordPair& p : std::vector<WordPair>{{"want", "i"}, {"want", "eye"}, {"want", "two"},
                                                 {"want", "to"}, {"want", "tees"}, {"what", "tees"},
                                                 {"won't", "eye"}}) {
    EXPECT_TRUE(contains(words, p)) << p.first << "," << p.second;
  }
  // No targets from the center's own slot.
  EXPECT_FALSE(contains(words, {"want", "wand"}));
  // Window 1: slot sizes 2,4,3,4 -> 2*4 + 4*(2+3) + 3*(4+4) + 4*3.
  EXPECT_EQ(pairs.size(), 8u + 20u + 24u + 12u);
}

TEST(Pairs, HybridIsIntraThenInterPerSlot) {
  Figure f;
  auto net = whole_network(f.corpus, 0, Mode::kHybrid, f.vocab);
  std::vector<TrainingPair> hybrid, intra, inter;
  for_each_pair(net, Mode::kHybrid, [] { return 2; }, [&](WordId a, WordId b) { hybrid.push_back({a, b}); });
  for_each_pair(net, Mode::kIntra, [] { return 2; }, [&](WordId a, WordId b) { intra.push_back({a, b}); });
  for_each_pair(net, Mode::kInter, [] { return 2; }, [&](WordId a, WordId b) { inter.push_back({a, b}); });
  EXPECT_EQ(hybrid.size(), intra.size() + inter.size());
  auto joined = intra;
  joined.insert(joined.end(), inter.begin(), inter.end());
  std::sort(joined.begin(), joined.end());
  auto sorted = hybrid;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, joined);
}

TEST(Pairs, TopUsesBestPath) {
  Figure f;
  auto net = whole_network(f.corpus, 0, Mode::kTop, f.vocab);
  ASSERT_EQ(net.slots(), 4u);
  std::vector<TrainingPair> pairs;
  for_each_pair(net, Mode::kTop, [] { return 5; }, [&](WordId a, WordId b) { pairs.push_back({a, b}); });
  EXPECT_EQ(pairs.size(), 12u);
  for (auto w : named(pairs, f.vocab)) {
    for (const auto* s : {&w.first, &w.second}) {
      EXPECT_TRUE(*s == "i" || *s == "want" || *s == "to" || *s == "sit") << *s;
    }
  }
}

TEST(Pairs, CapKeepsBestPosteriors) {
  Figure f;
  auto capped = encode_corpus(f.nets, f.vocab, 2);
  auto net = whole_network(capped, 0, Mode::kIntra, f.vocab);
  ASSERT_EQ(net.slots(), 4u);
  std::vector<std::string> second;
  for (auto id : net.slot(1)) second.push_back(f.vocab.word(id));
  EXPECT_EQ(second, (std::vector<std::string>{"want", "wand"}));
  for (std::size_t t = 0; t < net.slots(); ++t) EXPECT_LE(net.slot(t).size(), 2u);
}

TEST(Pairs, EncodingDropsEpsilonAndPrunedWords) {
  auto nets = parse_cn_text("u a:0.6 <eps>:0.4 | <eps>:0.9 b:0.1 | c:1.0\nv a:1.0 | b:1.0\n");
  auto vocab = build_vocabulary(nets, 2);  // c is pruned
  auto corpus = encode_corpus(nets, vocab);
  ASSERT_EQ(corpus.networks(), 2u);
  EXPECT_EQ(corpus.top1[1], -1);  // epsilon wins the second slot
  auto net = whole_network(corpus, 0, Mode::kInter, vocab);
  EXPECT_EQ(net.slots(), 2u);  // the pruned-only slot vanished
  auto top = whole_network(corpus, 0, Mode::kTop, vocab);
  EXPECT_EQ(top.slots(), 1u);
}

std::vector<std::vector<std::string>> random_sentences(std::uint64_t seed, std::size_t tokens) {
  Rng rng(seed);
  std::vector<std::vector<std::string>> out;
  std::size_t total = 0;
  while (total < tokens) {
    std::vector<std::string> s(1 + uniform_below(rng, 15));
    for (auto& w : s) w = "w" + std::to_string(uniform_below(rng, 50));
    total += s.size();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ConfusionNetwork> plain(const std::vector<std::vector<std::string>>& sentences) {
  std::vector<ConfusionNetwork> nets;
  for (const auto& s : sentences) nets.push_back(make_plain_network("u", s));
  return nets;
}

TEST(Pairs, SingleAlternativeDegeneracy) {
  auto sentences = random_sentences(3, 2000);
  auto nets = plain(sentences);
  auto vocab = build_vocabulary(nets, 1);
  auto corpus = encode_corpus(nets, vocab);
  const WindowSampler sampler{5};
  for (Mode mode : {Mode::kInter, Mode::kTop, Mode::kHybrid}) {
    Rng rng(77), oracle_rng(77);
    std::vector<WordPair> got;
    for (std::size_t n = 0; n < corpus.networks(); ++n) {
      auto net = whole_network(corpus, n, mode, vocab);
      auto p = named(generate_pairs(net, mode, sampler, rng), vocab);
      got.insert(got.end(), p.begin(), p.end());
    }
    auto expect = testing::skipgram_oracle(sentences, [&] { return long(sampler.draw(oracle_rng)); });
    std::sort(got.begin(), got.end());
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(got, expect) << mode_name(mode);
  }
  Rng rng(1);
  for (std::size_t n = 0; n < corpus.networks(); ++n) {
    auto net = whole_network(corpus, n, Mode::kIntra, vocab);
    EXPECT_TRUE(generate_pairs(net, Mode::kIntra, sampler, rng).empty());
  }
}

TEST(Subsampling, RejectedArcsLeaveTheirSlot) {
  // "a" is 90% of the corpus; with a tiny t it is almost always dropped.
  std::string text;
  for (int i = 0; i < 200; ++i) text += "a a a a a a a a a b\n";
  auto nets = parse_plain_text(text);
  auto vocab = build_vocabulary(nets, 1);
  vocab.set_subsampling(1e-4);
  auto corpus = encode_corpus(nets, vocab);
  Rng rng(5);
  IdNetwork net;
  std::size_t a = 0, b = 0;
  for (std::size_t n = 0; n < corpus.networks(); ++n) {
    filter_network(corpus, n, Mode::kInter, vocab, rng, net);
    for (std::size_t t = 0; t < net.slots(); ++t) {
      for (auto id : net.slot(t)) (vocab.word(id) == "a" ? a : b)++;
    }
  }
  EXPECT_LT(a, 200u * 9 / 10);
  EXPECT_GT(b, 0u);
}

TEST(Negatives, NeverEqualTarget) {
  Vocabulary v({"a", "b"}, {1000, 1});
  NegativeTable table(v, 0.75, 1000);
  Rng rng(3);
  std::vector<WordId> out;
  for (int i = 0; i < 200; ++i) {
    draw_negatives(table, 0, 5, rng, out);
    ASSERT_EQ(out.size(), 5u);
    for (auto w : out) EXPECT_EQ(w, 1);
  }
}

double oracle_loss(const std::vector<std::vector<double>>& in_rows, const std::vector<std::vector<double>>& out,
                   WordId target, const std::vector<WordId>& negs) {
  std::vector<std::size_t> n(negs.begin(), negs.end());
  return testing::ns_loss_oracle(in_rows, out, static_cast<std::size_t>(target), n);
}

struct Instance {
  DenseMatrix<double> input, output;
  std::vector<std::int32_t> rows;
  WordId target = 0;
  std::vector<WordId> negs;
};

Instance random_instance(Rng& rng, std::size_t dim) {
  Instance x;
  const std::size_t in_rows = 6, vocab = 8;
  x.input = DenseMatrix<double>(in_rows, dim);
  x.output = DenseMatrix<double>(vocab, dim);
  for (auto& v : x.input.data()) v = (2 * uniform01(rng) - 1) * 0.3;
  for (auto& v : x.output.data()) v = (2 * uniform01(rng) - 1) * 0.3;
  auto n_rows = 1 + uniform_below(rng, 5);
  for (std::size_t i = 0; i < n_rows; ++i) x.rows.push_back(static_cast<std::int32_t>(uniform_below(rng, in_rows)));
  x.target = static_cast<WordId>(uniform_below(rng, vocab));
  auto k = 1 + uniform_below(rng, 5);
  while (x.negs.size() < k) {
    auto w = static_cast<WordId>(uniform_below(rng, vocab));
    if (w != x.target) x.negs.push_back(w);
  }
  return x;
}

std::vector<std::vector<double>> rows_of(const DenseMatrix<double>& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
  return out;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  double scale = std::sqrt(std::max(na, nb));
  return scale == 0 ? std::sqrt(diff) : std::sqrt(diff) / scale;
}

TEST(Gradient, MatchesFiniteDifferences) {
  Rng rng(2024);
  const std::size_t dim = 10;
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_instance(rng, dim);
    auto g = detail::ns_gradient(x.input, x.output, x.rows, x.target, x.negs);
    auto in = rows_of(x.input), out = rows_of(x.output);
    auto in_loss = [&](std::size_t r) {
      return [&, r](const std::vector<double>& v) {
        auto tmp = in;
        tmp[r] = v;
        std::vector<std::vector<double>> sel;
        for (auto i : x.rows) sel.push_back(tmp[static_cast<std::size_t>(i)]);
        return oracle_loss(sel, out, x.target, x.negs);
      };
    };
    ASSERT_NEAR(detail::ns_loss(x.input, x.output, x.rows, x.target, x.negs),
                in_loss(0)(in[0]), 1e-12);
    std::map<std::int32_t, int> mult;
    for (auto r : x.rows) ++mult[r];
    for (auto [r, m] : mult) {
      std::vector<double> analytic(dim), numeric(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        analytic[k] = m * g.input[k];
        numeric[k] = testing::central_difference(in_loss(static_cast<std::size_t>(r)), in[static_cast<std::size_t>(r)], k, 1e-4);
      }
      EXPECT_LT(relative_error(analytic, numeric), 1e-4) << "trial " << trial << " input row " << r;
    }
    std::map<WordId, std::vector<double>> out_grad;
    std::vector<WordId> ids = {x.target};
    ids.insert(ids.end(), x.negs.begin(), x.negs.end());
    for (std::size_t j = 0; j < ids.size(); ++j) {
      auto& acc = out_grad[ids[j]];
      acc.resize(dim);
      for (std::size_t k = 0; k < dim; ++k) acc[k] += g.outputs[j][k];
    }
    std::vector<std::vector<double>> sel;
    for (auto i : x.rows) sel.push_back(in[static_cast<std::size_t>(i)]);
    for (auto& [w, analytic] : out_grad) {
      auto f = [&, w = w](const std::vector<double>& v) {
        auto tmp = out;
        tmp[static_cast<std::size_t>(w)] = v;
        return oracle_loss(sel, tmp, x.target, x.negs);
      };
      std::vector<double> numeric(dim);
      for (std::size_t k = 0; k < dim; ++k) numeric[k] = testing::central_difference(f, out[static_cast<std::size_t>(w)], k, 1e-4);
      EXPECT_LT(relative_error(analytic, numeric), 1e-4) << "trial " << trial << " output row " << w;
    }
  }
}

EmbeddingModel small_model(std::uint64_t seed) {
  auto nets = parse_plain_text("want wand what won't to two tees\n");
  Vocabulary v = build_vocabulary(nets, 1);
  EmbeddingModel m(v, SubwordParams{3, 6, 50}, 10);
  Rng rng(seed);
  for (auto& x : m.input().data()) x = static_cast<float>((2 * uniform01(rng) - 1) * 0.3);
  for (auto& x : m.output().data()) x = static_cast<float>((2 * uniform01(rng) - 1) * 0.3);
  return m;
}

TEST(PairLoss, AnalyticCases) {
  auto nets = parse_plain_text("a b c d\n");
  EmbeddingModel zero(build_vocabulary(nets, 1), SubwordParams{3, 6, 10}, 8);
  std::vector<WordId> negs = {2, 3, 2};
  EXPECT_NEAR(pair_loss(zero, {0, 1}, negs), 4 * std::log(2.0), 1e-12);

  EmbeddingModel big = zero;
  for (std::int32_t r : big.subwords().rows(0)) big.input().row(static_cast<std::size_t>(r))[0] = 10.0f;
  big.output().row(1)[0] = 10.0f;
  big.output().row(2)[0] = -10.0f;
  big.output().row(3)[0] = -10.0f;
  EXPECT_LT(pair_loss(big, {0, 1}, negs), 1e-12);
}

TEST(PairLoss, MatchesScalarRecomputation) {
  auto m = small_model(11);
  std::vector<WordId> negs = {3, 4, 5};
  std::vector<std::vector<double>> sel, out;
  for (auto r : m.subwords().rows(0)) {
    auto row = m.input().row(static_cast<std::size_t>(r));
    sel.emplace_back(row.begin(), row.end());
  }
  for (std::size_t w = 0; w < m.vocab().size(); ++w) {
    auto row = m.output().row(w);
    out.emplace_back(row.begin(), row.end());
  }
  EXPECT_NEAR(pair_loss(m, {0, 1}, negs), oracle_loss(sel, out, 1, negs), 1e-10);
}

TEST(SgdStep, AppliesGradient) {
  auto m = small_model(12);
  std::vector<WordId> negs = {3, 4};
  TrainingPair pair{0, 1};
  auto before = m;
  sgd_step(m, pair, negs, 0.0f);
  EXPECT_EQ(m, before);

  auto g = detail::ns_gradient(m.input(), m.output(), m.subwords().rows(0), 1, negs);
  const float lr = 0.05f;
  double loss0 = pair_loss(m, pair, negs);
  sgd_step(m, pair, negs, lr);
  EXPECT_LT(pair_loss(m, pair, negs), loss0);
  std::map<std::int32_t, int> mult;
  for (auto r : before.subwords().rows(0)) ++mult[r];
  for (auto [r, k] : mult) {
    for (std::size_t d = 0; d < 10; ++d) {
      double expect = before.input().row(static_cast<std::size_t>(r))[d] - lr * k * g.input[d];
      EXPECT_NEAR(m.input().row(static_cast<std::size_t>(r))[d], expect, 1e-6);
    }
  }
  for (std::size_t d = 0; d < 10; ++d) {
    EXPECT_NEAR(m.output().row(1)[d], before.output().row(1)[d] - lr * g.outputs[0][d], 1e-6);
  }
}

TEST(SgdStep, ScaledInputGradient) {
  auto a = small_model(13), b = a;
  std::vector<WordId> negs = {2};
  auto rows = a.subwords().rows(0);
  sgd_step(a, {0, 1}, negs, 0.1f, false);
  sgd_step(b, {0, 1}, negs, 0.1f, true);
  auto r0 = static_cast<std::size_t>(rows[0]);
  auto base = small_model(13);
  for (std::size_t d = 0; d < 10; ++d) {
    double full = a.input().row(r0)[d] - base.input().row(r0)[d];
    double scaled = b.input().row(r0)[d] - base.input().row(r0)[d];
    EXPECT_NEAR(scaled * double(rows.size()), full, 1e-6);
  }
}

TEST(CenterUpdater, MatchesPerPairUpdates) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_instance(rng, 12);
    if (trial % 2 == 0) x.rows.push_back(x.rows.front());  // repeated row
    auto a_in = x.input, a_out = x.output, b_in = x.input, b_out = x.output;
    detail::NsScratch<double> scratch;
    detail::CenterUpdater<double> updater(b_in, b_out, trial % 3 == 0);
    updater.begin(x.rows, detail::row_gain(x.rows));
    for (int step = 0; step < 6; ++step) {
      WordId target = static_cast<WordId>(uniform_below(rng, 8));
      double la = detail::ns_update(a_in, a_out, x.rows, target, x.negs, 0.1, trial % 3 == 0, scratch);
      double lb = updater.step(target, x.negs, 0.1);
      EXPECT_NEAR(la, lb, 1e-12);
    }
    updater.flush();
    for (std::size_t i = 0; i < a_in.data().size(); ++i) EXPECT_NEAR(a_in.data()[i], b_in.data()[i], 1e-12);
    for (std::size_t i = 0; i < a_out.data().size(); ++i) EXPECT_NEAR(a_out.data()[i], b_out.data()[i], 1e-12);
  }
  EXPECT_EQ(detail::row_gain(std::vector<std::int32_t>{1, 2, 2, 3, 3, 3}), 1.0 + 4 + 9);
}

TEST(Schedule, LinearDecayWithFloor) {
  EXPECT_DOUBLE_EQ(learning_rate(0.01, 0.0), 0.01);
  EXPECT_DOUBLE_EQ(learning_rate(0.01, 0.5), 0.005);
  EXPECT_DOUBLE_EQ(learning_rate(0.01, 1.0), 0.01 * 1e-4);
  EXPECT_DOUBLE_EQ(learning_rate(0.01, 3.0), 0.01 * 1e-4);
}

TEST(Config, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  for (auto mutate : std::vector<std::function<void(TrainConfig&)>>{
           [](TrainConfig& x) { x.dim = 0; }, [](TrainConfig& x) { x.window_max = 0; },
           [](TrainConfig& x) { x.negatives = 0; }, [](TrainConfig& x) { x.lr = 0; },
           [](TrainConfig& x) { x.epochs = 0; }, [](TrainConfig& x) { x.workers = 0; },
           [](TrainConfig& x) { x.subsample_t = 0; }, [](TrainConfig& x) { x.minn = 0; },
           [](TrainConfig& x) { x.maxn = 2; }}) {
    TrainConfig bad;
    mutate(bad);
    EXPECT_THROW(bad.validate(), std::invalid_argument);
  }
}

TrainConfig small_config(Mode mode) {
  TrainConfig c;
  c.mode = mode;
  c.dim = 16;
  c.epochs = 3;
  c.negatives = 4;
  c.lr = 0.05;
  c.min_count = 1;
  c.subsample_t = 1.0;
  c.bucket_count = 5000;
  c.negative_table_size = 100'000;
  return c;
}

std::vector<ConfusionNetwork> small_cn_corpus() {
  std::string text;
  for (int i = 0; i < 150; ++i) {
    text += std::string(kFigureLine) + "\n";
    text += "u2 i:0.6 eye:0.4 | see:0.5 sea:0.5 | the:1.0 | sea:0.7 see:0.3\n";
  }
  return parse_cn_text(text);
}

TEST(Train, DeterministicWithOneWorker) {
  auto nets = small_cn_corpus();
  for (Mode mode : {Mode::kTop, Mode::kIntra, Mode::kInter, Mode::kHybrid}) {
    auto cfg = small_config(mode);
    cfg.seed = 7;
    auto a = train(nets, cfg);
    auto b = train(nets, cfg);
    EXPECT_TRUE(a.model == b.model) << mode_name(mode);
    EXPECT_EQ(a.epoch_mean_loss, b.epoch_mean_loss);
    cfg.seed = 8;
    EXPECT_FALSE(train(nets, cfg).model == a.model);
  }
}

TEST(Train, LossDecreasesAndLrStaysPositive) {
  auto nets = small_cn_corpus();
  auto cfg = small_config(Mode::kInter);
  cfg.epochs = 5;
  auto r = train(nets, cfg);
  ASSERT_EQ(r.epoch_mean_loss.size(), 5u);
  EXPECT_LT(r.epoch_mean_loss.back(), r.epoch_mean_loss.front());
  EXPECT_GT(r.final_lr, 0.0);
  EXPECT_GT(r.pairs, 0u);
  EXPECT_TRUE(r.model.all_finite());
}

TEST(Train, MultipleWorkersProduceAFiniteModel) {
  auto nets = small_cn_corpus();
  auto cfg = small_config(Mode::kHybrid);
  cfg.workers = 3;
  auto r = train(nets, cfg);
  EXPECT_TRUE(r.model.all_finite());
  EXPECT_LT(r.epoch_mean_loss.back(), r.epoch_mean_loss.front());
}

TEST(Train, ProgressLines) {
  auto nets = small_cn_corpus();
  auto cfg = small_config(Mode::kHybrid);
  cfg.epochs = 15;
  std::ostringstream log;
  TrainHooks hooks;
  hooks.progress = &log;
  auto r = train(nets, cfg, nullptr, hooks);
  ASSERT_GT(r.pairs, 1u << 16);
  std::istringstream lines(log.str());
  std::string line;
  std::size_t count = 0;
  double last = 0.0;
  const std::regex shape(R"(progress\t[0-9.]+\t[0-9.e+-]+\t[0-9.]+)");
  while (std::getline(lines, line)) {
    ASSERT_TRUE(std::regex_match(line, shape)) << line;
    double fraction = std::stod(line.substr(9));
    EXPECT_GE(fraction, last);
    last = fraction;
    ++count;
  }
  EXPECT_EQ(count, r.pairs >> 16);
}

TEST(Train, PairStreamMatchesSkipGramOracle) {
  auto sentences = random_sentences(9, 3000);
  auto nets = plain(sentences);
  auto cfg = small_config(Mode::kInter);
  cfg.epochs = 2;
  cfg.subsample_t = 1.0;  // keeps every token
  cfg.seed = 21;
  auto vocab = build_vocabulary(nets, 1);
  std::vector<WordPair> got;
  TrainHooks hooks;
  hooks.on_pair = [&](const TrainingPair& p) { got.emplace_back(vocab.word(p.input), vocab.word(p.target)); };
  train(nets, cfg, nullptr, hooks);

  Rng stream(sample_stream_seed(cfg.seed, 0));
  std::vector<WordPair> expect;
  for (int e = 0; e < cfg.epochs; ++e) {
    auto p = testing::skipgram_oracle(sentences, [&] { return long(1 + uniform_below(stream, 5)); });
    expect.insert(expect.end(), p.begin(), p.end());
  }
  std::sort(got.begin(), got.end());
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(got, expect);

  cfg.mode = Mode::kIntra;
  std::size_t intra = 0;
  hooks.on_pair = [&](const TrainingPair&) { ++intra; };
  EXPECT_EQ(train(nets, cfg, nullptr, hooks).pairs, 0u);
  EXPECT_EQ(intra, 0u);
}

TEST(Train, WarmStart) {
  auto nets = small_cn_corpus();
  auto cfg = small_config(Mode::kTop);
  auto base = train(nets, cfg).model;

  auto bad = cfg;
  bad.dim = 8;
  EXPECT_THROW(train(nets, bad, &base), Error);
  bad = cfg;
  bad.bucket_count = 4000;
  EXPECT_THROW(train(nets, bad, &base), Error);

  // A tiny learning rate leaves the warm-started rows nearly unchanged,
  // while a cold start lands far from every word the base model trained.
  auto tiny = cfg;
  tiny.mode = Mode::kIntra;
  tiny.lr = 1e-9;
  tiny.epochs = 1;
  auto warm = train(nets, tiny, &base).model;
  auto cold = train(nets, tiny).model;
  std::size_t moved = 0;
  for (const auto& w : base.vocab().words()) {
    auto a = base.word_vector(w), b = warm.word_vector(w), c = cold.word_vector(w);
    double warm_gap = 0, cold_gap = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      warm_gap = std::max(warm_gap, double(std::abs(a[k] - b[k])));
      cold_gap = std::max(cold_gap, double(std::abs(a[k] - c[k])));
    }
    EXPECT_LT(warm_gap, 1e-5) << w;
    moved += cold_gap > 1e-2 ? 1 : 0;
  }
  EXPECT_GE(moved, 4u);
}

}  // namespace
}  // namespace c2v
