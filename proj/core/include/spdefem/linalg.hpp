/* Copyright 2026 The spdefem Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spdefem {

struct MatrixEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

/// Symmetric sparse matrix holding only its upper triangle (row <= col),
/// in compressed row form. Immutable after construction.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  explicit SparseSymMatrix(std::size_t dim);

  /// Builds from upper-triangle entries that are already sorted by
  /// (row, col) and free of duplicates; throws ValidationError otherwise.
  static SparseSymMatrix from_sorted_entries(std::size_t dim, std::span<const MatrixEntry> entries);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return cols_.size(); }

  /// Stored upper-triangle entries in (row, col) order.
  std::vector<MatrixEntry> entries() const;

  /// Compressed row view of the upper triangle.
  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return cols_; }
  std::span<const double> values() const noexcept { return values_; }

  /// A(i, j) with symmetric completion; 0 when not stored.
  double at(std::size_t i, std::size_t j) const;
  double max_abs() const;

  friend bool operator==(const SparseSymMatrix&, const SparseSymMatrix&) = default;

 private:
  friend class TripletAccumulator;
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_ = {0};
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

/// Collects (row, col, value) contributions, duplicates allowed.
/// Contributions below the diagonal are mirrored into the upper triangle.
class TripletAccumulator {
 public:
  explicit TripletAccumulator(std::size_t dim) : dim_(dim) {}

  void add(std::size_t row, std::size_t col, double value);
  void reserve(std::size_t n) { triplets_.reserve(n); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return triplets_.size(); }

  /// Sums duplicates and drops entries that are exactly zero. The result is
  /// bitwise independent of insertion order: contributions are sorted by
  /// (row, col, value) before being summed.
  SparseSymMatrix finalize() const;

 private:
  std::size_t dim_;
  std::vector<MatrixEntry> triplets_;
};

std::vector<double> matvec(const SparseSymMatrix& a, std::span<const double> x);

/// alpha * A + beta * B.
SparseSymMatrix linear_combination(double alpha, const SparseSymMatrix& a, double beta,
                                   const SparseSymMatrix& b);

/// B * diag(w) * B for symmetric B.
SparseSymMatrix congruence_diag(const SparseSymMatrix& b, std::span<const double> w);

/// B * M * B for symmetric B and M.
SparseSymMatrix congruence(const SparseSymMatrix& b, const SparseSymMatrix& m);

SparseSymMatrix diagonal_matrix(std::span<const double> d);

/// Sparse Cholesky factor P A P^T = L L^T with a fill-reducing (approximate
/// minimum degree) permutation P. Immutable; concurrent solves are safe.
class SpdFactorization {
 public:
  std::size_t dim() const noexcept { return dim_; }
  std::size_t factor_nnz() const noexcept { return l_idx_.size(); }

  /// perm()[i] is the position of original row i in the factor ordering.
  std::span<const std::size_t> perm() const noexcept { return perm_; }

  /// A^-1 b.
  std::vector<double> solve(std::span<const double> b) const;

  /// Half solves. With transposed == false returns L^-1 (P b): input in
  /// original ordering, output in factor ordering. With transposed == true
  /// returns P^T (L^-T b): input in factor ordering, output in original
  /// ordering. Composing the two gives solve().
  std::vector<double> solve_lower(std::span<const double> b, bool transposed) const;

  /// Column-compressed L, diagonal first in every column.
  std::span<const std::size_t> l_col_ptr() const noexcept { return l_ptr_; }
  std::span<const std::size_t> l_row_idx() const noexcept { return l_idx_; }
  std::span<const double> l_values() const noexcept { return l_val_; }

 private:
  friend SpdFactorization factorize(const SparseSymMatrix& a);
  std::size_t dim_ = 0;
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> l_ptr_;
  std::vector<std::size_t> l_idx_;
  std::vector<double> l_val_;
};

/// Throws NotPositiveDefiniteError naming the failing pivot (original row).
SpdFactorization factorize(const SparseSymMatrix& a);

std::vector<double> solve(const SpdFactorization& f, std::span<const double> b);
std::vector<double> solve_lower(const SpdFactorization& f, std::span<const double> b,
                                bool transposed);

/// Matrix Market coordinate real symmetric, 1-based, lower triangle.
std::string write_matrix_market(const SparseSymMatrix& a);
SparseSymMatrix read_matrix_market(std::string_view text);

}  // namespace spdefem
