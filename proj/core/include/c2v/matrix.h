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

#ifndef C2V_MATRIX_H_
#define C2V_MATRIX_H_

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace c2v {

// Row-major dense matrix.
template <typename Real>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Real(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<Real> row(std::size_t i) {
    assert(i < rows_);
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const Real> row(std::size_t i) const {
    assert(i < rows_);
    return {data_.data() + i * cols_, cols_};
  }

  std::span<Real> data() { return data_; }
  std::span<const Real> data() const { return data_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

template <typename A, typename B>
double dot(std::span<const A> a, std::span<const B> b) {
  assert(a.size() == b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += double(a[i]) * double(b[i]);
  return sum;
}

template <typename Real>
double l2_norm(std::span<const Real> a) {
  return std::sqrt(dot(a, a));
}

// Scales `a` to unit length in place; zero vectors are left untouched.
// Returns the original norm.
template <typename Real>
double normalize(std::span<Real> a) {
  double n = l2_norm(std::span<const Real>(a));
  if (n > 0.0) {
    for (auto& x : a) x = static_cast<Real>(x / n);
  }
  return n;
}

}  // namespace c2v

#endif  // C2V_MATRIX_H_
