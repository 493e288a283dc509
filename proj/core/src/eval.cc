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

#include "c2v/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "c2v/cn_io.h"
#include "c2v/error.h"

namespace c2v {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

AnalogySet parse_analogies(std::istream& in) {
  AnalogySet set;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields[0] == ":") {
      if (fields.size() < 2) throw FormatError("section header without a name", line_no);
      section = fields[1];
      continue;
    }
    if (fields[0].size() > 1 && fields[0][0] == ':') {
      section = fields[0].substr(1);
      continue;
    }
    if (fields.size() != 4) {
      throw FormatError("analogy line needs four words, got " + std::to_string(fields.size()),
                        line_no);
    }
    AnalogyQuadruple q{fold_case(fields[0]), fold_case(fields[1]), fold_case(fields[2]),
                       fold_case(fields[3]), section};
    if (q.w4 == q.w1 || q.w4 == q.w2 || q.w4 == q.w3) {
      ++set.rejected;
      continue;
    }
    set.questions.push_back(std::move(q));
  }
  return set;
}

AnalogySet load_analogies(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_analogies(in);
}

AnalogySolver::AnalogySolver(const VectorSpace& space, AnalogyDirection direction)
    : space_(&space), direction_(direction), index_(space) {}

std::optional<Vector> AnalogySolver::query(const AnalogyQuadruple& q) const {
  auto i1 = space_->index_of(q.w1);
  auto i2 = space_->index_of(q.w2);
  auto i3 = space_->index_of(q.w3);
  if (!i1 || !i2 || !i3) return std::nullopt;
  auto a = index_.unit_row(*i1);
  auto b = index_.unit_row(*i2);
  auto c = index_.unit_row(*i3);
  Vector v(space_->dim());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = direction_ == AnalogyDirection::kOffset ? b[k] - a[k] + c[k] : a[k] - b[k] + c[k];
  }
  return v;
}

AnalogySolver::Outcome AnalogySolver::solve(const AnalogyQuadruple& q) const {
  Outcome out;
  auto v = query(q);
  if (!v) {
    out.skipped = true;
    return out;
  }
  auto target = space_->index_of(q.w4);
  if (!target) return out;
  auto cos = index_.cosines(*v);
  auto i1 = *space_->index_of(q.w1);
  auto i2 = *space_->index_of(q.w2);
  auto i3 = *space_->index_of(q.w3);
  const double ct = cos[*target];
  std::size_t rank = 0;
  for (std::size_t i = 0; i < cos.size(); ++i) {
    if (i == *target || i == i1 || i == i2 || i == i3) continue;
    if (cos[i] > ct || (cos[i] == ct && i < *target)) ++rank;
  }
  out.rank = rank;
  return out;
}

std::vector<NeighborIndex::Neighbor> AnalogySolver::answer(const AnalogyQuadruple& q,
                                                           std::size_t k) const {
  auto v = query(q);
  if (!v) throw MissingWordError(q.w1 + "/" + q.w2 + "/" + q.w3);
  return index_.nearest(*v, k, {q.w1, q.w2, q.w3});
}

bool answer_analogy(const VectorSpace& space, const AnalogyQuadruple& q, std::size_t top_k,
                    AnalogyDirection direction) {
  return AnalogySolver(space, direction).solve(q).correct_at(top_k);
}

AnalogyReport eval_analogies(const VectorSpace& space, const AnalogySet& set,
                             AnalogyDirection direction, std::size_t top_k) {
  if (set.questions.empty()) throw Error("analogy set holds no questions");
  if (top_k == 0) throw std::invalid_argument("top_k must be at least 1");
  AnalogySolver solver(space, direction);
  AnalogyReport report;
  report.rejected = set.rejected;
  report.top_k = top_k;
  report.overall.section = "overall";
  std::map<std::string, std::size_t> position;
  for (const auto& q : set.questions) {
    auto [it, fresh] = position.emplace(q.section, report.sections.size());
    if (fresh) report.sections.push_back(AnalogyScore{q.section});
    auto& sec = report.sections[it->second];
    auto outcome = solver.solve(q);
    for (auto* score : {&sec, &report.overall}) {
      if (outcome.skipped) {
        ++score->skipped;
        continue;
      }
      ++score->attempted;
      if (outcome.correct_at(1)) ++score->correct_top1;
      if (outcome.correct_at(2)) ++score->correct_top2;
      if (outcome.correct_at(top_k)) ++score->correct_top_k;
    }
  }
  return report;
}

AnalogyReport eval_analogy_file(const VectorSpace& space, const std::filesystem::path& path,
                                AnalogyDirection direction, std::size_t top_k) {
  return eval_analogies(space, load_analogies(path), direction, top_k);
}

std::vector<ScoredPair> parse_scored_pairs(std::istream& in) {
  std::vector<ScoredPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    if (fields.size() != 3) throw FormatError("pair line needs 'w1 w2 score'", line_no);
    double score = 0.0;
    const auto& s = fields[2];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(score)) {
      throw FormatError("bad score '" + s + "'", line_no);
    }
    pairs.push_back({fold_case(fields[0]), fold_case(fields[1]), score});
  }
  return pairs;
}

std::vector<ScoredPair> load_scored_pairs(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_scored_pairs(in);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    double r = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spearman_rho: length mismatch");
  if (xs.size() < 3) throw std::invalid_argument("spearman_rho needs at least three points");
  auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  const double n = double(xs.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    double a = rx[i] - mean;
    double b = ry[i] - mean;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("spearman_rho is undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman_p_value(double rho, std::size_t n) {
  if (n < 3) throw std::invalid_argument("p-value needs at least three points");
  if (std::abs(rho) >= 1.0) return 0.0;
  const double df = double(n - 2);
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

SimilarityReport eval_similarity(const VectorSpace& space, std::span<const ScoredPair> pairs) {
  SimilarityReport report;
  std::vector<double> cosines;
  std::vector<double> scores;
  for (const auto& p : pairs) {
    auto a = space.lookup(p.w1);
    auto b = space.lookup(p.w2);
    double na = a ? l2_norm(std::span<const float>(*a)) : 0.0;
    double nb = b ? l2_norm(std::span<const float>(*b)) : 0.0;
    if (na == 0.0 || nb == 0.0) {
      ++report.skipped;
      continue;
    }
    cosines.push_back(dot(std::span<const float>(*a), std::span<const float>(*b)) / (na * nb));
    scores.push_back(p.score);
  }
  report.used = cosines.size();
  if (report.used < 3) {
    throw Error("similarity evaluation needs at least three usable pairs (got " +
                std::to_string(report.used) + ", skipped " + std::to_string(report.skipped) + ")");
  }
  report.rho = spearman_rho(cosines, scores);
  report.p_value = spearman_p_value(report.rho, report.used);
  return report;
}

SimilarityReport eval_similarity_file(const VectorSpace& space,
                                      const std::filesystem::path& path) {
  auto pairs = load_scored_pairs(path);
  return eval_similarity(space, pairs);
}

std::vector<ReportRow> report_rows(std::string_view task, const AnalogyReport& report) {
  std::vector<ReportRow> rows;
  std::string t(task);
  auto add = [&](const std::string& prefix, const AnalogyScore& s) {
    rows.push_back({prefix, "top1", s.accuracy_top1()});
    rows.push_back({prefix, "top2", s.accuracy_top2()});
    if (report.top_k > 2) rows.push_back({prefix, "top" + std::to_string(report.top_k), s.accuracy_top_k()});
    rows.push_back({prefix, "attempted", double(s.attempted)});
    rows.push_back({prefix, "skipped", double(s.skipped)});
  };
  if (report.sections.size() > 1) {
    for (const auto& s : report.sections) add(t + "/" + s.section, s);
  }
  add(t, report.overall);
  rows.push_back({t, "rejected", double(report.rejected)});
  return rows;
}

std::vector<ReportRow> report_rows(std::string_view task, const SimilarityReport& report) {
  std::string t(task);
  return {{t, "rho", report.rho},
          {t, "p_value", report.p_value},
          {t, "pairs", double(report.used)},
          {t, "skipped", double(report.skipped)}};
}

void write_report(std::ostream& out, std::span<const ReportRow> rows) {
  char value[64];
  for (const auto& r : rows) {
    std::snprintf(value, sizeof value, "%.4f", r.value);
    if (r.metric == "p_value") std::snprintf(value, sizeof value, "%.3g", r.value);
    out << r.task << '\t' << r.metric << '\t' << value << '\n';
  }
}

}  // namespace c2v
