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

// End-to-end run on a synthetic world: confusion-network synthesis, four
// trained models (word-level top-1 baseline, subword top-1 model used as the
// warm start, intra and inter), and their benchmark scores.

#ifndef C2V_TESTS_SUPPORT_DESK_EXPERIMENT_H_
#define C2V_TESTS_SUPPORT_DESK_EXPERIMENT_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "c2v/trainer.h"
#include "synthetic_world.h"

namespace c2v::testing {

struct DeskConfig {
  std::uint64_t seed = 1;
  WorldConfig world;
  double target_mean_alternatives = 3.3;
  SynthesisConfig synthesis;
  TrainConfig train;              // shared settings; mode and maxn set per model
  int pretrain_epochs = 5;
  double finetune_lr = 0.0;       // lr of the warm-started models; 0: train.lr
  double corruption_rate = 0.18;
  ProbeConfig probe;
  bool train_inter = true;
  std::ostream* log = nullptr;
};

struct ModelScores {
  std::string name;
  double semantic_top1 = 0.0;
  double semantic_top2 = 0.0;
  double acoustic_top1 = 0.0;
  double acoustic_top2 = 0.0;
  double acoustic_rho = 0.0;
  double seconds = 0.0;
  std::vector<double> epoch_loss;
};

struct DeskResult {
  double mean_alternatives = 0.0;
  double confusion_prob = 0.0;
  std::size_t vocab_size = 0;
  std::size_t tokens = 0;
  std::size_t homophone_clusters = 0;
  ModelScores baseline, pretrain, intra, inter, concat;
  // Intent probe: CER in percent.
  double probe_clean_intra = 0.0, probe_corrupt_intra = 0.0;
  double probe_clean_baseline = 0.0, probe_corrupt_baseline = 0.0;
  double substitution_rate = 0.0;
  double probe_seconds = 0.0;
};

DeskResult run_desk_experiment(const DeskConfig& cfg);

void print_scores(std::ostream& out, const ModelScores& s);

}  // namespace c2v::testing

#endif  // C2V_TESTS_SUPPORT_DESK_EXPERIMENT_H_
