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

#include "cli.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_set>

#include "CLI11.hpp"
#include "c2v/acoustics.h"
#include "c2v/cn_io.h"
#include "c2v/error.h"
#include "c2v/eval.h"
#include "c2v/intent_probe.h"
#include "c2v/model.h"
#include "c2v/random.h"
#include "c2v/trainer.h"

namespace c2v::cli {
namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

Lexicon read_lexicon(const std::string& path) {
  auto in = open_in(path);
  return parse_lexicon(in);
}

std::vector<ConfusionNetwork> read_networks(const std::string& path, bool plain) {
  auto in = open_in(path);
  if (plain) {
    PlainCorpusReader reader(in);
    return read_all(reader);
  }
  CnReader reader(in);
  return read_all(reader);
}

std::vector<std::string> read_word_list(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(fold_case(w));
  return words;
}

void emit(std::ostream& out, std::vector<ReportRow> rows) { write_report(out, rows); }

struct Globals {
  std::uint64_t seed = 1;
  int threads = 1;
};

// Each subcommand registers its flags and returns the action to run.
using Action = std::function<void()>;

Action add_synth(CLI::App& app, const Globals& g, std::ostream& out, std::ostream& err) {
  auto* sub = app.add_subcommand("synth-cn", "Synthesize confusion networks from a plain corpus");
  struct Opts {
    std::string corpus, lexicon, output;
    std::optional<double> confusion_prob;
    double target = 3.34;
    SynthesisConfig synth;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--corpus,--input", o->corpus, "Plain text, one utterance per line")
      ->required()->check(CLI::ExistingFile);
  sub->add_option("--lexicon", o->lexicon, "CMUdict-style pronouncing dictionary")
      ->required()->check(CLI::ExistingFile);
  sub->add_option("--out,--output", o->output, "Output confusion-network file")->required();
  sub->add_option("--confusion-prob", o->confusion_prob,
                  "Per-token confusion probability; calibrated to --target-mean when absent")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--target-mean", o->target, "Mean alternatives per slot to calibrate for")
      ->capture_default_str();
  sub->add_option("--max-alternatives", o->synth.max_alternatives, "Alternatives per slot, spoken word included")
      ->capture_default_str();
  sub->add_option("--threshold", o->synth.similarity_threshold, "Minimum acoustic similarity of a confusable")
      ->capture_default_str();
  sub->add_option("--temperature", o->synth.temperature, "Softmax temperature of the posteriors")
      ->capture_default_str();
  return [o, &g, &out, &err]() {
    SynthesisConfig cfg = o->synth;
    cfg.seed = g.seed;
    cfg.validate();
    Lexicon lex = read_lexicon(o->lexicon);
    auto clean = read_networks(o->corpus, true);
    if (o->confusion_prob) {
      cfg.confusion_prob = *o->confusion_prob;
    } else {
      auto cal = calibrate_confusion_prob(clean, lex, cfg, o->target);
      if (!cal.reachable) err << "warning: target mean " << o->target << " is out of reach\n";
      cfg.confusion_prob = cal.confusion_prob;
    }
    auto networks = synthesize_cn_corpus(clean, lex, cfg);
    auto file = open_out(o->output);
    write_cn(file, networks);
    finish(file, o->output);
    std::size_t slots = 0;
    for (const auto& n : networks) slots += n.slots.size();
    emit(out, {{"synth-cn", "confusion_prob", cfg.confusion_prob},
               {"synth-cn", "mean_alternatives", mean_alternatives(networks)},
               {"synth-cn", "utterances", double(networks.size())},
               {"synth-cn", "slots", double(slots)}});
  };
}

Action add_train(CLI::App& app, const Globals& g, std::ostream& out, std::ostream& err) {
  auto* sub = app.add_subcommand("train", "Train an embedding model on confusion networks");
  struct Opts {
    std::string cn, output, pretrained, mode = "inter";
    bool plain = false, quiet = false;
    TrainConfig cfg;
  };
  auto o = std::make_shared<Opts>();
  auto& c = o->cfg;
  sub->add_option("--cn,--input", o->cn, "Confusion-network corpus")->required()->check(CLI::ExistingFile);
  sub->add_flag("--plain", o->plain, "Read --cn as plain text (one utterance per line)");
  sub->add_option("--out,--output", o->output, "Output model file")->required();
  sub->add_option("--mode", o->mode, "Pair generation: top, intra, inter or hybrid")
      ->check(CLI::IsMember({"top", "intra", "inter", "hybrid"}))->capture_default_str();
  sub->add_option("--dim", c.dim, "Vector dimension")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--ws,--window", c.window_max, "Maximum context window")->capture_default_str();
  sub->add_option("--epoch,--epochs", c.epochs, "Passes over the corpus")->capture_default_str();
  sub->add_option("--lr", c.lr, "Initial learning rate")->capture_default_str();
  sub->add_option("--neg,--negatives", c.negatives, "Negative samples per pair")->capture_default_str();
  sub->add_option("--min-count,--minCount", c.min_count, "Minimum word count")->capture_default_str();
  sub->add_option("--t", c.subsample_t, "Subsampling threshold")->capture_default_str();
  sub->add_option("--minn", c.minn, "Shortest character n-gram")->capture_default_str();
  sub->add_option("--maxn", c.maxn, "Longest character n-gram; 0 disables subwords")->capture_default_str();
  sub->add_option("--bucket", c.bucket_count, "Hash buckets for n-grams")->capture_default_str();
  sub->add_option("--cap", c.max_alternatives_cap, "Keep at most this many alternatives per slot; 0 keeps all")
      ->capture_default_str();
  sub->add_option("--pretrained,--pretrainedVectors", o->pretrained, "Warm-start model (binary)")
      ->check(CLI::ExistingFile);
  sub->add_flag("--quiet", o->quiet, "Suppress progress lines");
  return [o, &g, &out, &err]() {
    TrainConfig cfg = o->cfg;
    cfg.mode = parse_mode(o->mode);
    cfg.workers = g.threads;
    cfg.seed = g.seed;
    cfg.validate();
    std::optional<EmbeddingModel> warm;
    if (!o->pretrained.empty()) warm = load_model(std::filesystem::path(o->pretrained));
    auto networks = read_networks(o->cn, o->plain);
    TrainHooks hooks;
    if (!o->quiet) hooks.progress = &err;
    auto result = train(networks, cfg, warm ? &*warm : nullptr, hooks);
    save_model(result.model, std::filesystem::path(o->output));
    std::vector<ReportRow> rows = {{"train", "vocab", double(result.model.vocab().size())},
                                   {"train", "pairs", double(result.pairs)}};
    for (std::size_t e = 0; e < result.epoch_mean_loss.size(); ++e) {
      rows.push_back({"train", "loss_epoch" + std::to_string(e + 1), result.epoch_mean_loss[e]});
    }
    emit(out, rows);
  };
}

void add_direction(CLI::App* sub, std::string& direction) {
  sub->add_option("--direction", direction,
                  "offset: w2 - w1 + w3 (standard), literal: w1 - w2 + w3")
      ->check(CLI::IsMember({"offset", "literal"}))->capture_default_str();
}

Action add_eval_analogy(CLI::App& app, std::ostream& out) {
  auto* sub = app.add_subcommand("eval-analogy", "Analogy accuracy (top-1, top-2, top-k)");
  struct Opts {
    std::string model, questions, task = "analogy", direction = "offset";
    std::size_t top_k = 2;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Binary model or text vectors")->required()->check(CLI::ExistingFile);
  sub->add_option("--questions,--analogies", o->questions, "questions-words file")
      ->required()->check(CLI::ExistingFile);
  sub->add_option("--top-k", o->top_k, "Extra cutoff reported when above 2")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--task", o->task, "Task label of the report rows")->capture_default_str();
  add_direction(sub, o->direction);
  return [o, &out]() {
    auto space = load_vector_space(o->model);
    auto dir = o->direction == "literal" ? AnalogyDirection::kLiteral : AnalogyDirection::kOffset;
    auto report = eval_analogy_file(*space, o->questions, dir, o->top_k);
    auto rows = report_rows(o->task, report);
    rows.push_back({o->task, "dim", double(space->dim())});
    emit(out, rows);
  };
}

Action add_eval_sim(CLI::App& app, std::ostream& out) {
  auto* sub = app.add_subcommand("eval-sim", "Spearman correlation with similarity judgments");
  struct Opts {
    std::string model, pairs, task = "similarity";
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Binary model or text vectors")->required()->check(CLI::ExistingFile);
  sub->add_option("--pairs", o->pairs, "Lines of 'w1 w2 score'")->required()->check(CLI::ExistingFile);
  sub->add_option("--task", o->task, "Task label of the report rows")->capture_default_str();
  return [o, &out]() {
    auto space = load_vector_space(o->model);
    emit(out, report_rows(o->task, eval_similarity_file(*space, o->pairs)));
  };
}

Action add_nn(CLI::App& app, std::ostream& out) {
  auto* sub = app.add_subcommand("nn", "Nearest neighbors of a word");
  struct Opts {
    std::string model, word;
    std::size_t k = 10;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Binary model or text vectors")->required()->check(CLI::ExistingFile);
  sub->add_option("--word", o->word, "Query word")->required();
  sub->add_option("--k", o->k, "Number of neighbors")->check(CLI::PositiveNumber)->capture_default_str();
  return [o, &out]() {
    auto space = load_vector_space(o->model);
    std::string word = fold_case(o->word);
    auto v = space->lookup(word);
    if (!v) throw MissingWordError(word);
    char line[64];
    for (const auto& n : nearest_neighbors(*space, *v, o->k, {word})) {
      std::snprintf(line, sizeof line, "%.6f", n.cosine);
      out << n.word << '\t' << line << '\n';
    }
  };
}

Action add_concat(CLI::App& app, std::ostream& out) {
  auto* sub = app.add_subcommand("concat", "Concatenate two spaces over their shared words");
  struct Opts {
    std::vector<std::string> models;
    std::string output;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("models", o->models, "Two models (binary or text)")
      ->required()->expected(2)->check(CLI::ExistingFile);
  sub->add_option("--out,--output", o->output, "Output text vectors")->required();
  return [o, &out]() {
    auto a = load_vector_space(o->models[0]);
    auto b = load_vector_space(o->models[1]);
    ConcatenatedSpace cat(*a, *b);
    auto file = open_out(o->output);
    export_text(cat, file);
    finish(file, o->output);
    emit(out, {{"concat", "dim", double(cat.dim())}, {"concat", "words", double(cat.words().size())}});
  };
}

Action add_export(CLI::App& app, std::ostream& out) {
  auto* sub = app.add_subcommand("export", "Write word vectors as text");
  struct Opts {
    std::string model, output;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Binary model or text vectors")->required()->check(CLI::ExistingFile);
  sub->add_option("--out,--output", o->output, "Output text vectors")->required();
  return [o, &out]() {
    auto space = load_vector_space(o->model);
    auto file = open_out(o->output);
    export_text(*space, file);
    finish(file, o->output);
    emit(out, {{"export", "dim", double(space->dim())}, {"export", "words", double(space->words().size())}});
  };
}

Action add_pca(CLI::App& app, std::ostream& out) {
  auto* sub = app.add_subcommand("pca", "Project words onto the top two principal components");
  struct Opts {
    std::string model, words_file;
    std::vector<std::string> words;
    std::size_t limit = 50;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Binary model or text vectors")->required()->check(CLI::ExistingFile);
  sub->add_option("--word", o->words, "Word to project (repeatable)");
  sub->add_option("--words", o->words_file, "File of words to project")->check(CLI::ExistingFile);
  sub->add_option("--limit", o->limit, "Number of vocabulary words used when no words are given")
      ->capture_default_str();
  return [o, &out]() {
    auto space = load_vector_space(o->model);
    std::vector<std::string> words;
    for (const auto& w : o->words) words.push_back(fold_case(w));
    if (!o->words_file.empty()) {
      auto more = read_word_list(o->words_file);
      words.insert(words.end(), more.begin(), more.end());
    }
    if (words.empty()) {
      const auto& all = space->words();
      words.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(o->limit, all.size())));
    }
    write_pca(out, pca_2d(*space, words));
  };
}

Action add_gen_tasks(CLI::App& app, const Globals& g, std::ostream& out) {
  auto* sub = app.add_subcommand("gen-tasks", "Generate acoustic analogy and similarity tasks");
  struct Opts {
    std::string lexicon, analogies, pairs, vocab_from;
    AcousticTaskConfig cfg;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--lexicon", o->lexicon, "CMUdict-style pronouncing dictionary")
      ->required()->check(CLI::ExistingFile);
  sub->add_option("--analogies", o->analogies, "Output questions-words file")->required();
  sub->add_option("--pairs", o->pairs, "Output similarity pairs")->required();
  sub->add_option("--vocab-from", o->vocab_from, "Limit both tasks to the words of this model")
      ->check(CLI::ExistingFile);
  sub->add_option("--analogy-count", o->cfg.analogy_count, "Analogy questions")->capture_default_str();
  sub->add_option("--pair-count", o->cfg.similarity_pair_count, "Similarity pairs")->capture_default_str();
  sub->add_option("--bins", o->cfg.similarity_bins, "Similarity strata over [0,1]")->capture_default_str();
  return [o, &g, &out]() {
    AcousticTaskConfig cfg = o->cfg;
    cfg.seed = g.seed;
    Lexicon lex = read_lexicon(o->lexicon);
    std::vector<std::string> restrict_to;
    if (!o->vocab_from.empty()) restrict_to = load_vector_space(o->vocab_from)->words();
    auto tasks = generate_acoustic_tasks(lex, cfg, restrict_to);
    auto a = open_out(o->analogies);
    write_analogies(a, "acoustic", tasks.analogies);
    finish(a, o->analogies);
    auto p = open_out(o->pairs);
    write_similarity_pairs(p, tasks.similarity_pairs);
    finish(p, o->pairs);
    emit(out, {{"gen-tasks", "analogies", double(tasks.analogies.size())},
               {"gen-tasks", "pairs", double(tasks.similarity_pairs.size())}});
  };
}

Action add_intent(CLI::App& app, const Globals& g, std::ostream& out, std::ostream& err) {
  auto* sub = app.add_subcommand("intent", "Clean-trained intent probe on clean and corrupted test data");
  struct Opts {
    std::string model, data, test, lexicon, vocab_from;
    double rate = 0.18, threshold = 0.6, split = 0.5;
    ProbeConfig probe;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Binary model or text vectors")->required()->check(CLI::ExistingFile);
  sub->add_option("--data,--train", o->data, "Labeled utterances 'label<TAB>tokens'")
      ->required()->check(CLI::ExistingFile);
  sub->add_option("--test", o->test, "Test utterances; --data is split when absent")->check(CLI::ExistingFile);
  sub->add_option("--lexicon", o->lexicon, "Pronouncing dictionary used for corruption")
      ->required()->check(CLI::ExistingFile);
  sub->add_option("--vocab-from", o->vocab_from, "Only substitute words of this model")->check(CLI::ExistingFile);
  sub->add_option("--rate", o->rate, "Per-token substitution probability")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sub->add_option("--threshold", o->threshold, "Minimum similarity of a substitute")->capture_default_str();
  sub->add_option("--split", o->split, "Training fraction when --test is absent")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sub->add_option("--probe-epochs", o->probe.epochs, "Probe training epochs")->capture_default_str();
  sub->add_option("--probe-lr", o->probe.lr, "Probe learning rate")->capture_default_str();
  return [o, &g, &out, &err]() {
    auto space = load_vector_space(o->model);
    Lexicon lex = read_lexicon(o->lexicon);
    IntentDataset train_set = load_intents(o->data);
    IntentDataset test_set;
    if (o->test.empty()) {
      std::tie(train_set, test_set) = split_dataset(train_set, o->split, derive_seed(g.seed, 1));
    } else {
      test_set = train_set;
      test_set.items.clear();
      auto in = open_in(o->test);
      read_intents(in, test_set);
    }
    std::vector<std::string> allowed;
    if (!o->vocab_from.empty()) allowed = load_vector_space(o->vocab_from)->words();
    CorruptionStats cs;
    auto corrupted = corrupt(test_set, lex, o->rate, derive_seed(g.seed, 2), &cs, o->threshold, allowed);
    ProbeConfig pc = o->probe;
    pc.seed = derive_seed(g.seed, 3);
    auto cmp = compare_probe(train_set, test_set, corrupted, *space, pc);
    if (cmp.feature_stats.unknown_tokens > 0) {
      err << "note: " << cmp.feature_stats.unknown_tokens << " tokens had no vector\n";
    }
    emit(out, {{"intent", "cer_clean", cmp.cer_clean},
               {"intent", "cer_corrupt", cmp.cer_corrupt},
               {"intent", "delta", cmp.delta()},
               {"intent", "substitution_rate", cs.tokens ? double(cs.substituted) / double(cs.tokens) : 0.0}});
  };
}

}  // namespace

std::vector<std::string> normalize_flags(std::vector<std::string> args) {
  for (auto& a : args) {
    if (a.size() > 2 && a[0] == '-' && std::isalpha(static_cast<unsigned char>(a[1])) &&
        std::isalpha(static_cast<unsigned char>(a[2]))) {
      a.insert(a.begin(), '-');
    }
  }
  return args;
}

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subword confusion-network embeddings: synthesis, training and evaluation", "c2v"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads,--thread", g.threads, "Training workers")
      ->check(CLI::PositiveNumber)->capture_default_str();

  std::vector<std::pair<CLI::App*, Action>> actions;
  auto reg = [&](const char* name, Action a) { actions.emplace_back(app.get_subcommand(name), std::move(a)); };
  reg("synth-cn", add_synth(app, g, out, err));
  reg("train", add_train(app, g, out, err));
  reg("eval-analogy", add_eval_analogy(app, out));
  reg("eval-sim", add_eval_sim(app, out));
  reg("nn", add_nn(app, out));
  reg("concat", add_concat(app, out));
  reg("export", add_export(app, out));
  reg("pca", add_pca(app, out));
  reg("gen-tasks", add_gen_tasks(app, g, out));
  reg("intent", add_intent(app, g, out, err));

  args = normalize_flags(std::move(args));
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (auto& [sub, action] : actions) {
      if (sub->parsed()) action();
    }
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataFormat;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace c2v::cli
