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

#include "desk_experiment.h"

#include <chrono>
#include <cstdio>

#include "c2v/cn_io.h"
#include "c2v/eval.h"
#include "c2v/intent_probe.h"

namespace c2v::testing {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ModelScores score(const std::string& name, const VectorSpace& space, const AnalogySet& semantic,
                  const AnalogySet& acoustic, const std::vector<ScoredPair>& pairs) {
  ModelScores s;
  s.name = name;
  auto sem = eval_analogies(space, semantic);
  s.semantic_top1 = sem.overall.accuracy_top1();
  s.semantic_top2 = sem.overall.accuracy_top2();
  auto ac = eval_analogies(space, acoustic);
  s.acoustic_top1 = ac.overall.accuracy_top1();
  s.acoustic_top2 = ac.overall.accuracy_top2();
  s.acoustic_rho = eval_similarity(space, pairs).rho;
  return s;
}

}  // namespace

void print_scores(std::ostream& out, const ModelScores& s) {
  char line[256];
  std::snprintf(line, sizeof line,
                "%-10s sem %.2f/%.2f  ac %.2f/%.2f  rho %.4f  %.1fs  loss %.4f -> %.4f\n",
                s.name.c_str(), s.semantic_top1, s.semantic_top2, s.acoustic_top1, s.acoustic_top2,
                s.acoustic_rho, s.seconds, s.epoch_loss.empty() ? 0.0 : s.epoch_loss.front(),
                s.epoch_loss.empty() ? 0.0 : s.epoch_loss.back());
  out << line << std::flush;
}

DeskResult run_desk_experiment(const DeskConfig& cfg) {
  DeskResult result;
  WorldConfig wc = cfg.world;
  wc.seed = cfg.seed;
  World world = build_world(wc);
  result.homophone_clusters = world.homophone_clusters;

  std::vector<ConfusionNetwork> clean;
  clean.reserve(world.sentences.size());
  for (std::size_t i = 0; i < world.sentences.size(); ++i) {
    clean.push_back(make_plain_network("s" + std::to_string(i + 1), world.sentences[i]));
    result.tokens += world.sentences[i].size();
  }
  SynthesisConfig sc = cfg.synthesis;
  sc.seed = derive_seed(cfg.seed, 11);
  auto cal = calibrate_confusion_prob(clean, world.lexicon, sc, cfg.target_mean_alternatives);
  sc.confusion_prob = cal.confusion_prob;
  result.confusion_prob = cal.confusion_prob;
  auto networks = synthesize_cn_corpus(clean, world.lexicon, sc);
  result.mean_alternatives = mean_alternatives(networks);
  clean.clear();
  clean.shrink_to_fit();

  TrainConfig base = cfg.train;
  base.seed = cfg.seed;
  Vocabulary vocab = build_vocabulary(networks, base.min_count);
  result.vocab_size = vocab.size();
  EncodedCorpus corpus = encode_corpus(networks, vocab, base.max_alternatives_cap);
  networks.clear();
  networks.shrink_to_fit();

  AcousticTaskConfig tc;
  tc.seed = derive_seed(cfg.seed, 12);
  auto tasks = generate_acoustic_tasks(world.lexicon, tc, vocab.words());
  AnalogySet acoustic;
  for (const auto& a : tasks.analogies) {
    acoustic.questions.push_back({a.w1, a.w2, a.w3, a.w4, "acoustic"});
  }
  std::vector<ScoredPair> pairs;
  for (const auto& p : tasks.similarity_pairs) pairs.push_back({p.w1, p.w2, p.score});

  if (cfg.log) {
    *cfg.log << "world: tokens " << result.tokens << ", vocab " << result.vocab_size
             << ", homophone clusters " << result.homophone_clusters << ", mean alternatives "
             << result.mean_alternatives << " (p=" << result.confusion_prob << ")\n";
  }

  auto run = [&](const std::string& name, Mode mode, bool subwords, int epochs,
                 const EmbeddingModel* warm, ModelScores& out) {
    TrainConfig tcfg = base;
    tcfg.mode = mode;
    tcfg.epochs = epochs;
    if (!subwords) tcfg.maxn = 0;
    if (warm != nullptr && cfg.finetune_lr > 0.0) tcfg.lr = cfg.finetune_lr;
    auto t0 = Clock::now();
    auto trained = train(corpus, vocab, tcfg, warm);
    double secs = seconds_since(t0);
    out = score(name, trained.model, world.semantic_analogies, acoustic, pairs);
    out.seconds = secs;
    out.epoch_loss = trained.epoch_mean_loss;
    if (cfg.log) print_scores(*cfg.log, out);
    return std::move(trained.model);
  };

  EmbeddingModel baseline = run("baseline", Mode::kTop, false, base.epochs, nullptr, result.baseline);
  EmbeddingModel pretrain = run("pretrain", Mode::kTop, true, cfg.pretrain_epochs, nullptr, result.pretrain);
  EmbeddingModel intra = run("intra", Mode::kIntra, true, base.epochs, &pretrain, result.intra);
  if (cfg.train_inter) {
    run("inter", Mode::kInter, true, base.epochs, &pretrain, result.inter);
  }

  ConcatenatedSpace cat(intra, baseline);
  result.concat = score("intra+base", cat, world.semantic_analogies, acoustic, pairs);
  if (cfg.log) print_scores(*cfg.log, result.concat);

  // Intent probe: train on clean, test on clean and corrupted copies.
  auto t0 = Clock::now();
  auto [train_set, test_set] = split_dataset(world.intents, 0.5, derive_seed(cfg.seed, 13));
  CorruptionStats cs;
  auto corrupted = corrupt(test_set, world.lexicon, cfg.corruption_rate, derive_seed(cfg.seed, 14),
                           &cs, 0.6, vocab.words());
  result.substitution_rate = cs.tokens ? double(cs.substituted) / double(cs.tokens) : 0.0;
  ProbeConfig pc = cfg.probe;
  pc.seed = derive_seed(cfg.seed, 15);
  auto a = compare_probe(train_set, test_set, corrupted, intra, pc);
  auto b = compare_probe(train_set, test_set, corrupted, baseline, pc);
  result.probe_clean_intra = a.cer_clean;
  result.probe_corrupt_intra = a.cer_corrupt;
  result.probe_clean_baseline = b.cer_clean;
  result.probe_corrupt_baseline = b.cer_corrupt;
  result.probe_seconds = seconds_since(t0);
  if (cfg.log) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "probe: intra %.2f -> %.2f (delta %.2f), baseline %.2f -> %.2f (delta %.2f), "
                  "substituted %.3f, %.1fs\n",
                  a.cer_clean, a.cer_corrupt, a.delta(), b.cer_clean, b.cer_corrupt, b.delta(),
                  result.substitution_rate, result.probe_seconds);
    *cfg.log << line << std::flush;
  }
  return result;
}

}  // namespace c2v::testing
