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

#ifndef C2V_MODEL_H_
#define C2V_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "c2v/matrix.h"
#include "c2v/vocab.h"

namespace c2v {

using Vector = std::vector<float>;

// Anything that maps words to dense vectors. words() is the candidate set
// used for neighbor search and analogies.
class VectorSpace {
 public:
  virtual ~VectorSpace() = default;
  virtual std::size_t dim() const = 0;
  virtual const std::vector<std::string>& words() const = 0;
  // nullopt when the word cannot be represented at all.
  virtual std::optional<Vector> lookup(std::string_view word) const = 0;
  virtual std::optional<std::size_t> index_of(std::string_view word) const = 0;
};

// Input matrix: V word rows followed by bucket_count n-gram rows.
// Output matrix: V rows. A word vector is the sum of its input rows.
class EmbeddingModel : public VectorSpace {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(Vocabulary vocab, SubwordParams params, std::size_t dim);

  std::size_t dim() const override { return dim_; }
  const std::vector<std::string>& words() const override { return vocab_.words(); }
  std::optional<Vector> lookup(std::string_view word) const override;
  std::optional<std::size_t> index_of(std::string_view word) const override;

  const Vocabulary& vocab() const { return vocab_; }
  const SubwordIndex& subwords() const { return subwords_; }
  const SubwordParams& subword_params() const { return subwords_.params(); }

  DenseMatrix<float>& input() { return input_; }
  const DenseMatrix<float>& input() const { return input_; }
  DenseMatrix<float>& output() { return output_; }
  const DenseMatrix<float>& output() const { return output_; }

  // Sum of the input rows of the word; out-of-vocabulary words use their
  // hashed n-grams only. Throws Error when the word has no rows.
  Vector word_vector(std::string_view word) const;
  Vector word_vector(WordId id) const;

  bool all_finite() const;

  // Same vocabulary, subword parameters and parameters, bit for bit.
  bool operator==(const EmbeddingModel& other) const;

 private:
  void sum_rows(std::span<const std::int32_t> rows, std::span<float> out) const;

  std::size_t dim_ = 0;
  Vocabulary vocab_;
  SubwordIndex subwords_;
  DenseMatrix<float> input_;
  DenseMatrix<float> output_;
};

// Plain word -> vector table (text .vec files, concatenations).
class StaticVectors : public VectorSpace {
 public:
  StaticVectors(std::vector<std::string> words, DenseMatrix<float> vectors);

  std::size_t dim() const override { return vectors_.cols(); }
  const std::vector<std::string>& words() const override { return words_; }
  std::optional<Vector> lookup(std::string_view word) const override;
  std::optional<std::size_t> index_of(std::string_view word) const override;
  const DenseMatrix<float>& vectors() const { return vectors_; }

 private:
  std::vector<std::string> words_;
  DenseMatrix<float> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Unit-normalized vectors of every candidate word, for brute-force cosine
// search. Words whose vector is zero keep a zero row (cosine 0).
class NeighborIndex {
 public:
  explicit NeighborIndex(const VectorSpace& space);

  const VectorSpace& space() const { return *space_; }
  std::size_t size() const { return unit_.rows(); }
  std::span<const float> unit_row(std::size_t i) const { return unit_.row(i); }

  struct Neighbor {
    std::string word;
    double cosine = 0.0;
  };

  // Top-k words by cosine to `query`, skipping `exclude`; ties go to the
  // lower word index. Throws Error on a zero-norm query.
  std::vector<Neighbor> nearest(std::span<const float> query, std::size_t k,
                                const std::unordered_set<std::string>& exclude = {}) const;

  // Cosine of `query` against every candidate (query need not be unit).
  std::vector<double> cosines(std::span<const float> query) const;

 private:
  const VectorSpace* space_;
  DenseMatrix<float> unit_;
};

std::vector<NeighborIndex::Neighbor> nearest_neighbors(
    const VectorSpace& space, std::span<const float> query, std::size_t k,
    const std::unordered_set<std::string>& exclude = {});

// Binary model format, all little-endian:
//   "C2V2", u32 version (1), u32 dim, u32 V, u32 bucket_count, u8 minn,
//   u8 maxn, V x (u32 byte length, UTF-8 word, u64 count),
//   input rows (V + bucket_count) x dim f32, output rows V x dim f32.
// With n-grams disabled (maxn == 0) the input matrix has V rows.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const EmbeddingModel& model, std::ostream& out);
void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_model(std::istream& in);
EmbeddingModel load_model(const std::filesystem::path& path);

// "V dim" header, then "word v1 ... vdim" with composed word vectors printed
// to six significant digits. Throws Error on an empty vocabulary.
void export_text(const VectorSpace& space, std::ostream& out);
void export_text(const VectorSpace& space, const std::filesystem::path& path);
StaticVectors load_text_vectors(std::istream& in);

// Loads either a binary model or a text .vec file (detected by magic).
std::unique_ptr<VectorSpace> load_vector_space(const std::filesystem::path& path);

// Concatenation of two spaces over their shared vocabulary (in the order of
// `a`). Each half is L2-normalized before concatenation.
class ConcatenatedSpace : public VectorSpace {
 public:
  ConcatenatedSpace(const VectorSpace& a, const VectorSpace& b);

  std::size_t dim() const override { return a_->dim() + b_->dim(); }
  const std::vector<std::string>& words() const override { return words_; }
  std::optional<Vector> lookup(std::string_view word) const override;
  std::optional<std::size_t> index_of(std::string_view word) const override;

  // Materialized copy, e.g. for export.
  StaticVectors materialize() const;

 private:
  const VectorSpace* a_;
  const VectorSpace* b_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Throws Error when the vocabularies do not intersect.
ConcatenatedSpace concatenate(const VectorSpace& a, const VectorSpace& b);

struct PcaPoint {
  std::string word;
  double x = 0.0;
  double y = 0.0;
};

struct PcaOptions {
  double tolerance = 1e-8;
  int max_iterations = 1000;
};

// Mean-centred projection onto the top two principal components (power
// iteration with deflation). Each component is sign-normalized so that its
// largest-magnitude entry is positive. Throws Error for fewer than three
// points or rank < 2.
std::vector<PcaPoint> pca_2d(std::span<const std::string> words,
                             const DenseMatrix<double>& vectors,
                             const PcaOptions& options = {});
std::vector<PcaPoint> pca_2d(const VectorSpace& space,
                             std::span<const std::string> words,
                             const PcaOptions& options = {});
void write_pca(std::ostream& out, std::span<const PcaPoint> points);

}  // namespace c2v

#endif  // C2V_MODEL_H_
