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

// Analogy and word-similarity benchmarks.

#ifndef C2V_EVAL_H_
#define C2V_EVAL_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "c2v/model.h"

namespace c2v {

struct AnalogyQuadruple {
  std::string w1, w2, w3, w4;
  std::string section;
};

struct AnalogySet {
  std::vector<AnalogyQuadruple> questions;
  std::size_t rejected = 0;  // w4 repeated one of w1..w3
};

// questions-words format: ": section" headers, then "w1 w2 w3 w4" lines.
// Words are case-folded. Throws FormatError on malformed lines.
AnalogySet parse_analogies(std::istream& in);
AnalogySet load_analogies(const std::filesystem::path& path);

// Offset: answer ~ vec(w2) - vec(w1) + vec(w3) (w1 : w2 :: w3 : w4).
// Literal: answer ~ vec(w1) - vec(w2) + vec(w3).
enum class AnalogyDirection { kOffset, kLiteral };

// Ranks analogy candidates: every word of the space except w1..w3, by cosine
// to the query built from unit-normalized vectors. Ties go to the lower word
// index.
class AnalogySolver {
 public:
  explicit AnalogySolver(const VectorSpace& space,
                         AnalogyDirection direction = AnalogyDirection::kOffset);

  // nullopt when w1..w3 are not all in the vocabulary (question skipped).
  // Otherwise the 0-based rank of w4 among the candidates, or nullopt in
  // `rank` when w4 is not a candidate.
  struct Outcome {
    bool skipped = false;
    std::optional<std::size_t> rank;
    bool correct_at(std::size_t k) const { return !skipped && rank && *rank < k; }
  };
  Outcome solve(const AnalogyQuadruple& q) const;

  // Best `k` candidates for the question.
  std::vector<NeighborIndex::Neighbor> answer(const AnalogyQuadruple& q, std::size_t k) const;

 private:
  std::optional<Vector> query(const AnalogyQuadruple& q) const;

  const VectorSpace* space_;
  AnalogyDirection direction_;
  NeighborIndex index_;
};

// True iff w4 is among the top_k candidates. Skipped questions count as
// incorrect here; use AnalogySolver to tell them apart.
bool answer_analogy(const VectorSpace& space, const AnalogyQuadruple& q, std::size_t top_k,
                    AnalogyDirection direction = AnalogyDirection::kOffset);

struct AnalogyScore {
  std::string section;
  std::size_t attempted = 0;
  std::size_t skipped = 0;
  std::size_t correct_top1 = 0;
  std::size_t correct_top2 = 0;
  std::size_t correct_top_k = 0;  // at AnalogyReport::top_k

  double accuracy_top1() const { return attempted ? 100.0 * double(correct_top1) / double(attempted) : 0.0; }
  double accuracy_top2() const { return attempted ? 100.0 * double(correct_top2) / double(attempted) : 0.0; }
  double accuracy_top_k() const { return attempted ? 100.0 * double(correct_top_k) / double(attempted) : 0.0; }
};

struct AnalogyReport {
  std::vector<AnalogyScore> sections;  // file order
  AnalogyScore overall;
  std::size_t rejected = 0;
  std::size_t top_k = 2;
};

// Accuracies are percentages of attempted questions; top-1 and top-2 are
// always counted, `top_k` (>= 1) in addition. Throws Error when the set holds
// no questions.
AnalogyReport eval_analogies(const VectorSpace& space, const AnalogySet& set,
                             AnalogyDirection direction = AnalogyDirection::kOffset,
                             std::size_t top_k = 2);
AnalogyReport eval_analogy_file(const VectorSpace& space, const std::filesystem::path& path,
                                AnalogyDirection direction = AnalogyDirection::kOffset,
                                std::size_t top_k = 2);

struct ScoredPair {
  std::string w1, w2;
  double score = 0.0;
};

// "w1<TAB>w2<TAB>score" (any whitespace accepted); '#' lines are comments.
std::vector<ScoredPair> parse_scored_pairs(std::istream& in);
std::vector<ScoredPair> load_scored_pairs(const std::filesystem::path& path);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

// Spearman rank correlation (Pearson correlation of average ranks). Throws
// std::invalid_argument on length mismatch or fewer than three points, and
// Error when either side is constant.
double spearman_rho(std::span<const double> xs, std::span<const double> ys);

// Two-sided p-value of rho under the t approximation with n - 2 degrees of
// freedom.
double spearman_p_value(double rho, std::size_t n);

struct SimilarityReport {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

// Correlates cosine(w1, w2) with the annotated score. Pairs whose words
// cannot be represented (or have zero vectors) are skipped. Throws Error when
// fewer than three pairs remain.
SimilarityReport eval_similarity(const VectorSpace& space, std::span<const ScoredPair> pairs);
SimilarityReport eval_similarity_file(const VectorSpace& space,
                                      const std::filesystem::path& path);

// One "task<TAB>metric<TAB>value" row of a results table.
struct ReportRow {
  std::string task;
  std::string metric;
  double value = 0.0;
};

std::vector<ReportRow> report_rows(std::string_view task, const AnalogyReport& report);
std::vector<ReportRow> report_rows(std::string_view task, const SimilarityReport& report);
void write_report(std::ostream& out, std::span<const ReportRow> rows);

}  // namespace c2v

#endif  // C2V_EVAL_H_
