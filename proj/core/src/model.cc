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

#include "c2v/model.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "c2v/error.h"

namespace c2v {

EmbeddingModel::EmbeddingModel(Vocabulary vocab, SubwordParams params,
                               std::size_t dim)
    : dim_(dim), vocab_(std::move(vocab)) {
  if (dim_ == 0) throw std::invalid_argument("embedding dimension must be positive");
  if (!params.enabled()) {
    params.maxn = 0;
    params.bucket_count = 0;
  }
  subwords_ = SubwordIndex(vocab_, params);
  input_ = DenseMatrix<float>(subwords_.input_rows(), dim_);
  output_ = DenseMatrix<float>(vocab_.size(), dim_);
}

void EmbeddingModel::sum_rows(std::span<const std::int32_t> rows,
                              std::span<float> out) const {
  std::fill(out.begin(), out.end(), 0.0f);
  for (auto r : rows) {
    auto src = input_.row(static_cast<std::size_t>(r));
    for (std::size_t k = 0; k < dim_; ++k) out[k] += src[k];
  }
}

std::optional<Vector> EmbeddingModel::lookup(std::string_view word) const {
  auto rows = subwords_.rows_for(word, vocab_.id(word));
  if (rows.empty()) return std::nullopt;
  Vector v(dim_);
  sum_rows(rows, v);
  return v;
}

std::optional<std::size_t> EmbeddingModel::index_of(std::string_view word) const {
  auto id = vocab_.id(word);
  if (!id) return std::nullopt;
  return static_cast<std::size_t>(*id);
}

Vector EmbeddingModel::word_vector(std::string_view word) const {
  auto v = lookup(word);
  if (!v) {
    throw Error("word '" + std::string(word) +
                "' is out of vocabulary and has no character n-grams");
  }
  return *v;
}

Vector EmbeddingModel::word_vector(WordId id) const {
  Vector v(dim_);
  sum_rows(subwords_.rows(id), v);
  return v;
}

bool EmbeddingModel::all_finite() const {
  auto finite = [](std::span<const float> xs) {
    return std::all_of(xs.begin(), xs.end(), [](float x) { return std::isfinite(x); });
  };
  return finite(input_.data()) && finite(output_.data());
}

bool EmbeddingModel::operator==(const EmbeddingModel& other) const {
  return dim_ == other.dim_ && vocab_ == other.vocab_ &&
         subword_params() == other.subword_params() && input_ == other.input_ &&
         output_ == other.output_;
}

StaticVectors::StaticVectors(std::vector<std::string> words,
                             DenseMatrix<float> vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (words_.size() != vectors_.rows()) {
    throw std::invalid_argument("word list and vector table differ in size");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw FormatError("duplicate word '" + words_[i] + "' in vector table");
    }
  }
}

std::optional<Vector> StaticVectors::lookup(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  auto r = vectors_.row(it->second);
  return Vector(r.begin(), r.end());
}

std::optional<std::size_t> StaticVectors::index_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NeighborIndex::NeighborIndex(const VectorSpace& space)
    : space_(&space), unit_(space.words().size(), space.dim()) {
  const auto& words = space.words();
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto v = space.lookup(words[i]);
    if (!v) continue;
    auto row = unit_.row(i);
    std::copy(v->begin(), v->end(), row.begin());
    normalize(row);
  }
}

std::vector<double> NeighborIndex::cosines(std::span<const float> query) const {
  double qn = l2_norm(query);
  std::vector<double> out(unit_.rows(), 0.0);
  if (qn == 0.0) return out;
  for (std::size_t i = 0; i < unit_.rows(); ++i) {
    out[i] = dot(query, unit_.row(i)) / qn;
  }
  return out;
}

std::vector<NeighborIndex::Neighbor> NeighborIndex::nearest(
    std::span<const float> query, std::size_t k,
    const std::unordered_set<std::string>& exclude) const {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (query.size() != unit_.cols()) {
    throw std::invalid_argument("query dimension does not match the space");
  }
  if (l2_norm(query) == 0.0) throw Error("nearest-neighbor query has zero norm");
  auto cos = cosines(query);
  const auto& words = space_->words();
  std::vector<std::size_t> order;
  order.reserve(cos.size());
  for (std::size_t i = 0; i < cos.size(); ++i) {
    if (!exclude.contains(words[i])) order.push_back(i);
  }
  auto better = [&](std::size_t a, std::size_t b) {
    if (cos[a] != cos[b]) return cos[a] > cos[b];
    return a < b;
  };
  std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                    order.end(), better);
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({words[order[i]], cos[order[i]]});
  return out;
}

std::vector<NeighborIndex::Neighbor> nearest_neighbors(
    const VectorSpace& space, std::span<const float> query, std::size_t k,
    const std::unordered_set<std::string>& exclude) {
  NeighborIndex index(space);
  return index.nearest(query, k, exclude);
}

// ---------------------------------------------------------------------------
// Binary serialization.

namespace {

constexpr std::array<char, 4> kMagic = {'C', '2', 'V', '2'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
  }
  out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw FormatError(std::string("truncated model file while reading ") + what);
  }
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    u |= static_cast<std::make_unsigned_t<T>>(bytes[i]) << (8 * i);
  }
  return static_cast<T>(u);
}

void put_floats(std::ostream& out, std::span<const float> xs) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(xs.data()),
              static_cast<std::streamsize>(xs.size() * sizeof(float)));
  } else {
    for (float x : xs) put_le(out, std::bit_cast<std::uint32_t>(x));
  }
}

void get_floats(std::istream& in, std::span<float> xs) {
  if constexpr (std::endian::native == std::endian::little) {
    auto bytes = static_cast<std::streamsize>(xs.size() * sizeof(float));
    if (!in.read(reinterpret_cast<char*>(xs.data()), bytes)) {
      throw FormatError("truncated model file while reading matrices");
    }
  } else {
    for (auto& x : xs) x = std::bit_cast<float>(get_le<std::uint32_t>(in, "matrices"));
  }
}

}  // namespace

void save_model(const EmbeddingModel& model, std::ostream& out) {
  const auto& vocab = model.vocab();
  const auto& p = model.subword_params();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kModelFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.size()));
  put_le<std::uint32_t>(out, p.bucket_count);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(p.minn));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(p.maxn));
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto& w = vocab.word(static_cast<WordId>(i));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(w.size()));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
    put_le<std::uint64_t>(out, vocab.count(static_cast<WordId>(i)));
  }
  put_floats(out, model.input().data());
  put_floats(out, model.output().data());
  if (!out) throw IoError("failed writing model");
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  save_model(model, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

EmbeddingModel load_model(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size())) {
    throw FormatError("truncated model file while reading magic");
  }
  if (magic != kMagic) throw FormatError("not a model file (bad magic)");
  auto version = get_le<std::uint32_t>(in, "version");
  if (version != kModelFormatVersion) throw UnsupportedVersionError(version);
  auto dim = get_le<std::uint32_t>(in, "dim");
  auto v = get_le<std::uint32_t>(in, "vocabulary size");
  SubwordParams params;
  params.bucket_count = get_le<std::uint32_t>(in, "bucket count");
  params.minn = get_le<std::uint8_t>(in, "minn");
  params.maxn = get_le<std::uint8_t>(in, "maxn");
  if (dim == 0) throw FormatError("model has zero dimension");

  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  words.reserve(v);
  counts.reserve(v);
  for (std::uint32_t i = 0; i < v; ++i) {
    auto len = get_le<std::uint32_t>(in, "word length");
    if (len > (1u << 20)) throw FormatError("implausible word length in model file");
    std::string w(len, '\0');
    if (!in.read(w.data(), len)) throw FormatError("truncated model file while reading words");
    words.push_back(std::move(w));
    counts.push_back(get_le<std::uint64_t>(in, "word count"));
  }
  EmbeddingModel model(Vocabulary(std::move(words), std::move(counts)), params, dim);
  get_floats(in, model.input().data());
  get_floats(in, model.output().data());
  return model;
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return load_model(in);
}

void export_text(const VectorSpace& space, std::ostream& out) {
  const auto& words = space.words();
  if (words.empty()) throw Error("cannot export an empty vocabulary");
  out << words.size() << ' ' << space.dim() << '\n';
  char buf[32];
  for (const auto& w : words) {
    auto v = space.lookup(w);
    Vector zeros;
    if (!v) {
      zeros.assign(space.dim(), 0.0f);
      v = zeros;
    }
    out << w;
    for (float x : *v) {
      std::snprintf(buf, sizeof(buf), " %.6g", double(x));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing vectors");
}

void export_text(const VectorSpace& space, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  export_text(space, out);
}

StaticVectors load_text_vectors(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty vector file", 1);
  std::istringstream header(line);
  std::size_t n = 0, dim = 0;
  if (!(header >> n >> dim) || dim == 0) {
    throw FormatError("vector file header must be '<count> <dim>'", 1);
  }
  std::vector<std::string> words;
  DenseMatrix<float> vectors(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw FormatError("vector file is truncated", i + 2);
    std::istringstream row(line);
    std::string w;
    row >> w;
    auto dst = vectors.row(i);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!(row >> dst[k])) throw FormatError("too few components", i + 2);
    }
    words.push_back(std::move(w));
  }
  return StaticVectors(std::move(words), std::move(vectors));
}

std::unique_ptr<VectorSpace> load_vector_space(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  bool binary = in.gcount() == 4 && magic == kMagic;
  in.clear();
  in.seekg(0);
  if (binary) return std::make_unique<EmbeddingModel>(load_model(in));
  return std::make_unique<StaticVectors>(load_text_vectors(in));
}

// ---------------------------------------------------------------------------
// Concatenation.

ConcatenatedSpace::ConcatenatedSpace(const VectorSpace& a, const VectorSpace& b)
    : a_(&a), b_(&b) {
  for (const auto& w : a.words()) {
    if (b.index_of(w)) {
      index_.emplace(w, words_.size());
      words_.push_back(w);
    }
  }
  if (words_.empty()) throw Error("cannot concatenate spaces with disjoint vocabularies");
}

std::optional<Vector> ConcatenatedSpace::lookup(std::string_view word) const {
  auto va = a_->lookup(word);
  auto vb = b_->lookup(word);
  if (!va || !vb) return std::nullopt;
  normalize(std::span<float>(*va));
  normalize(std::span<float>(*vb));
  va->insert(va->end(), vb->begin(), vb->end());
  return va;
}

std::optional<std::size_t> ConcatenatedSpace::index_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

StaticVectors ConcatenatedSpace::materialize() const {
  DenseMatrix<float> m(words_.size(), dim());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto v = lookup(words_[i]);
    std::copy(v->begin(), v->end(), m.row(i).begin());
  }
  return StaticVectors(words_, std::move(m));
}

ConcatenatedSpace concatenate(const VectorSpace& a, const VectorSpace& b) {
  return ConcatenatedSpace(a, b);
}

// ---------------------------------------------------------------------------
// PCA.

namespace {

struct Eigenpair {
  double value = 0.0;
  std::vector<double> vector;
};

Eigenpair power_iteration(const DenseMatrix<double>& c, const PcaOptions& opt) {
  const std::size_t d = c.rows();
  // Start from the largest column of the matrix: it lies in the column space.
  std::size_t best = 0;
  double best_norm = -1.0;
  for (std::size_t j = 0; j < d; ++j) {
    double n = l2_norm(c.row(j));
    if (n > best_norm) {
      best_norm = n;
      best = j;
    }
  }
  Eigenpair e;
  if (best_norm <= 0.0) return e;
  e.vector.assign(c.row(best).begin(), c.row(best).end());
  normalize(std::span<double>(e.vector));
  std::vector<double> next(d);
  for (int it = 0; it < opt.max_iterations; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      next[i] = dot(c.row(i), std::span<const double>(e.vector));
    }
    double n = normalize(std::span<double>(next));
    e.value = n;
    if (n == 0.0) return e;
    double delta = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      delta = std::max(delta, std::fabs(next[i] - e.vector[i]));
    }
    e.vector.swap(next);
    if (delta < opt.tolerance) break;
  }
  // Rayleigh quotient for the final estimate.
  double rq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    rq += e.vector[i] * dot(c.row(i), std::span<const double>(e.vector));
  }
  e.value = rq;
  return e;
}

void fix_sign(std::vector<double>& v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::fabs(v[i]) > std::fabs(v[arg])) arg = i;
  }
  if (v[arg] < 0.0) {
    for (auto& x : v) x = -x;
  }
}

}  // namespace

std::vector<PcaPoint> pca_2d(std::span<const std::string> words,
                             const DenseMatrix<double>& vectors,
                             const PcaOptions& options) {
  const std::size_t n = vectors.rows();
  const std::size_t d = vectors.cols();
  if (n < 3) throw Error("PCA needs at least three points");
  if (words.size() != n) throw std::invalid_argument("words/vectors size mismatch");
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) mean[k] += vectors.row(i)[k];
  }
  for (auto& m : mean) m /= double(n);
  DenseMatrix<double> centred(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) centred.row(i)[k] = vectors.row(i)[k] - mean[k];
  }
  DenseMatrix<double> cov(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = centred.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) cov.row(a)[b] += x[a] * x[b];
    }
  }
  for (auto& c : cov.data()) c /= double(n - 1);

  double trace = 0.0;
  for (std::size_t a = 0; a < d; ++a) trace += cov.row(a)[a];
  auto first = power_iteration(cov, options);
  if (trace <= 0.0 || first.value <= 1e-12 * trace) {
    throw Error("PCA input has rank < 2");
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      cov.row(a)[b] -= first.value * first.vector[a] * first.vector[b];
    }
  }
  auto second = power_iteration(cov, options);
  if (second.value <= 1e-10 * trace) throw Error("PCA input has rank < 2");
  fix_sign(first.vector);
  fix_sign(second.vector);

  std::vector<PcaPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = std::span<const double>(centred.row(i));
    out.push_back({words[i], dot(x, std::span<const double>(first.vector)),
                   dot(x, std::span<const double>(second.vector))});
  }
  return out;
}

std::vector<PcaPoint> pca_2d(const VectorSpace& space,
                             std::span<const std::string> words,
                             const PcaOptions& options) {
  DenseMatrix<double> m(words.size(), space.dim());
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto v = space.lookup(words[i]);
    if (!v) throw MissingWordError(words[i]);
    std::copy(v->begin(), v->end(), m.row(i).begin());
  }
  return pca_2d(words, m, options);
}

void write_pca(std::ostream& out, std::span<const PcaPoint> points) {
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "\t%.6f\t%.6f", p.x, p.y);
    out << p.word << buf << '\n';
  }
}

}  // namespace c2v
