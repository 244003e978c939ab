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

#include "spdefem/linalg.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "spdefem/error.hpp"
#include "spdefem/io.hpp"

namespace spdefem {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void check_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

// Full (symmetrically completed) compressed-row matrix, used for products.
struct FullCsr {
  std::size_t n = 0;
  std::vector<std::size_t> ptr;
  std::vector<std::size_t> idx;
  std::vector<double> val;
};

FullCsr expand(const SparseSymMatrix& a) {
  const std::size_t n = a.dim();
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto cv = a.values();
  FullCsr f;
  f.n = n;
  f.ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      ++f.ptr[i + 1];
      if (ci[p] != i) ++f.ptr[ci[p] + 1];
    }
  }
  for (std::size_t i = 0; i < n; ++i) f.ptr[i + 1] += f.ptr[i];
  f.idx.resize(f.ptr[n]);
  f.val.resize(f.ptr[n]);
  std::vector<std::size_t> next(f.ptr.begin(), f.ptr.end() - 1);
  // Visiting rows in order emits lower entries (j, i) before the upper part
  // of row j, so every row comes out sorted by column.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      const std::size_t j = ci[p];
      f.idx[next[i]] = j;
      f.val[next[i]++] = cv[p];
      if (j != i) {
        f.idx[next[j]] = i;
        f.val[next[j]++] = cv[p];
      }
    }
  }
  return f;
}

// Upper triangle of X * Y (Gustavson), exact zeros dropped.
SparseSymMatrix upper_product(const FullCsr& x, const FullCsr& y) {
  const std::size_t n = x.n;
  std::vector<double> acc(n, 0.0);
  std::vector<std::size_t> mark(n, kNone);
  std::vector<std::size_t> cols;
  std::vector<MatrixEntry> out;
  for (std::size_t i = 0; i < n; ++i) {
    cols.clear();
    for (std::size_t p = x.ptr[i]; p < x.ptr[i + 1]; ++p) {
      const std::size_t k = x.idx[p];
      const double xv = x.val[p];
      for (std::size_t q = y.ptr[k]; q < y.ptr[k + 1]; ++q) {
        const std::size_t j = y.idx[q];
        if (j < i) continue;
        if (mark[j] != i) {
          mark[j] = i;
          acc[j] = 0.0;
          cols.push_back(j);
        }
        acc[j] += xv * y.val[q];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (std::size_t j : cols) {
      if (acc[j] != 0.0) out.push_back({i, j, acc[j]});
    }
  }
  return SparseSymMatrix::from_sorted_entries(n, out);
}

FullCsr full_product(const FullCsr& x, const FullCsr& y) {
  const std::size_t n = x.n;
  std::vector<double> acc(n, 0.0);
  std::vector<std::size_t> mark(n, kNone);
  std::vector<std::size_t> cols;
  FullCsr out;
  out.n = n;
  out.ptr.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    cols.clear();
    for (std::size_t p = x.ptr[i]; p < x.ptr[i + 1]; ++p) {
      const std::size_t k = x.idx[p];
      for (std::size_t q = y.ptr[k]; q < y.ptr[k + 1]; ++q) {
        const std::size_t j = y.idx[q];
        if (mark[j] != i) {
          mark[j] = i;
          acc[j] = 0.0;
          cols.push_back(j);
        }
        acc[j] += x.val[p] * y.val[q];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (std::size_t j : cols) {
      out.idx.push_back(j);
      out.val.push_back(acc[j]);
    }
    out.ptr.push_back(out.idx.size());
  }
  return out;
}

}  // namespace

SparseSymMatrix::SparseSymMatrix(std::size_t dim) : dim_(dim), row_ptr_(dim + 1, 0) {}

SparseSymMatrix SparseSymMatrix::from_sorted_entries(std::size_t dim,
                                                     std::span<const MatrixEntry> entries) {
  SparseSymMatrix m(dim);
  m.cols_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const MatrixEntry& en = entries[e];
    if (en.row > en.col || en.col >= dim) {
      throw ValidationError("entry (" + std::to_string(en.row) + ", " + std::to_string(en.col) +
                            ") is not in the upper triangle of a " + std::to_string(dim) +
                            "x" + std::to_string(dim) + " matrix");
    }
    if (e > 0) {
      const MatrixEntry& prev = entries[e - 1];
      if (prev.row > en.row || (prev.row == en.row && prev.col >= en.col)) {
        throw ValidationError("entries are not sorted and unique");
      }
    }
    ++m.row_ptr_[en.row + 1];
    m.cols_.push_back(en.col);
    m.values_.push_back(en.value);
  }
  for (std::size_t i = 0; i < dim; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
  return m;
}

std::vector<MatrixEntry> SparseSymMatrix::entries() const {
  std::vector<MatrixEntry> out;
  out.reserve(nnz());
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out.push_back({i, cols_[p], values_[p]});
  }
  return out;
}

double SparseSymMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= dim_ || j >= dim_) throw DimensionError("matrix index out of range");
  if (i > j) std::swap(i, j);
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

double SparseSymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void TripletAccumulator::add(std::size_t row, std::size_t col, double value) {
  if (row >= dim_ || col >= dim_) {
    throw DimensionError("triplet (" + std::to_string(row) + ", " + std::to_string(col) +
                         ") out of range for dimension " + std::to_string(dim_));
  }
  if (row > col) std::swap(row, col);
  triplets_.push_back({row, col, value});
}

SparseSymMatrix TripletAccumulator::finalize() const {
  std::vector<MatrixEntry> sorted = triplets_;
  std::sort(sorted.begin(), sorted.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.value < b.value;
  });
  std::vector<MatrixEntry> merged;
  for (std::size_t s = 0; s < sorted.size();) {
    MatrixEntry e = sorted[s++];
    while (s < sorted.size() && sorted[s].row == e.row && sorted[s].col == e.col) {
      e.value += sorted[s++].value;
    }
    if (e.value != 0.0) merged.push_back(e);
  }
  return SparseSymMatrix::from_sorted_entries(dim_, merged);
}

std::vector<double> matvec(const SparseSymMatrix& a, std::span<const double> x) {
  check_dim(a.dim(), x.size(), "matvec");
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto cv = a.values();
  std::vector<double> y(a.dim(), 0.0);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      const std::size_t j = ci[p];
      y[i] += cv[p] * x[j];
      if (j != i) y[j] += cv[p] * x[i];
    }
  }
  return y;
}

SparseSymMatrix linear_combination(double alpha, const SparseSymMatrix& a, double beta,
                                   const SparseSymMatrix& b) {
  check_dim(a.dim(), b.dim(), "linear_combination");
  TripletAccumulator acc(a.dim());
  acc.reserve(a.nnz() + b.nnz());
  for (const MatrixEntry& e : a.entries()) acc.add(e.row, e.col, alpha * e.value);
  for (const MatrixEntry& e : b.entries()) acc.add(e.row, e.col, beta * e.value);
  return acc.finalize();
}

SparseSymMatrix diagonal_matrix(std::span<const double> d) {
  std::vector<MatrixEntry> e;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] != 0.0) e.push_back({i, i, d[i]});
  }
  return SparseSymMatrix::from_sorted_entries(d.size(), e);
}

SparseSymMatrix congruence_diag(const SparseSymMatrix& b, std::span<const double> w) {
  check_dim(b.dim(), w.size(), "congruence_diag");
  const FullCsr full = expand(b);
  FullCsr scaled = full;  // diag(w) * B
  for (std::size_t i = 0; i < scaled.n; ++i) {
    for (std::size_t p = scaled.ptr[i]; p < scaled.ptr[i + 1]; ++p) scaled.val[p] *= w[i];
  }
  return upper_product(full, scaled);
}

SparseSymMatrix congruence(const SparseSymMatrix& b, const SparseSymMatrix& m) {
  check_dim(b.dim(), m.dim(), "congruence");
  const FullCsr fb = expand(b);
  return upper_product(full_product(fb, expand(m)), fb);
}

// Up-looking sparse Cholesky on C = P A P^T. Row k of L is found by walking
// the elimination tree from the nonzeros of column k of triu(C).
SpdFactorization factorize(const SparseSymMatrix& a) {
  const std::size_t n = a.dim();
  SpdFactorization f;
  f.dim_ = n;

  // Fill-reducing ordering.
  f.perm_.resize(n);
  if (n > 0) {
    std::vector<Eigen::Triplet<double, int>> trip;
    trip.reserve(2 * a.nnz());
    for (const MatrixEntry& e : a.entries()) {
      trip.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), 1.0);
      if (e.row != e.col) trip.emplace_back(static_cast<int>(e.col), static_cast<int>(e.row), 1.0);
    }
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> pattern(static_cast<int>(n), static_cast<int>(n));
    pattern.setFromTriplets(trip.begin(), trip.end());
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> pinv;
    Eigen::AMDOrdering<int> amd;
    amd(pattern, pinv);
    const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p = pinv.inverse();
    for (std::size_t i = 0; i < n; ++i) f.perm_[i] = static_cast<std::size_t>(p.indices()[static_cast<int>(i)]);
  }
  std::vector<std::size_t> iperm(n);
  for (std::size_t i = 0; i < n; ++i) iperm[f.perm_[i]] = i;

  // triu(C) in compressed column form.
  std::vector<std::size_t> cp(n + 1, 0);
  const auto entries = a.entries();
  for (const MatrixEntry& e : entries) ++cp[std::max(f.perm_[e.row], f.perm_[e.col]) + 1];
  for (std::size_t k = 0; k < n; ++k) cp[k + 1] += cp[k];
  std::vector<std::size_t> ci(cp[n]);
  std::vector<double> cx(cp[n]);
  {
    std::vector<std::size_t> next(cp.begin(), cp.end() - 1);
    for (const MatrixEntry& e : entries) {
      const auto [r, c] = std::minmax(f.perm_[e.row], f.perm_[e.col]);
      ci[next[c]] = r;
      cx[next[c]++] = e.value;
    }
  }

  // Elimination tree.
  std::vector<std::size_t> parent(n, kNone);
  {
    std::vector<std::size_t> ancestor(n, kNone);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t p = cp[k]; p < cp[k + 1]; ++p) {
        for (std::size_t i = ci[p]; i != kNone && i < k;) {
          const std::size_t inext = ancestor[i];
          ancestor[i] = k;
          if (inext == kNone) parent[i] = k;
          i = inext;
        }
      }
    }
  }

  // Pattern of row k of L, returned in stack[top..n).
  std::vector<std::size_t> stack(n);
  std::vector<std::size_t> flag(n, kNone);
  const auto ereach = [&](std::size_t k) {
    std::size_t top = n;
    flag[k] = k;
    for (std::size_t p = cp[k]; p < cp[k + 1]; ++p) {
      std::size_t i = ci[p];
      if (i > k) continue;
      std::size_t len = 0;
      for (; flag[i] != k; i = parent[i]) {
        stack[len++] = i;
        flag[i] = k;
      }
      while (len > 0) stack[--top] = stack[--len];
    }
    return top;
  };

  // Symbolic pass: column counts.
  std::vector<std::size_t> count(n, 1);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t top = ereach(k); top < n; ++top) ++count[stack[top]];
  }
  f.l_ptr_.assign(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) f.l_ptr_[k + 1] = f.l_ptr_[k] + count[k];
  f.l_idx_.resize(f.l_ptr_[n]);
  f.l_val_.resize(f.l_ptr_[n]);

  // Numeric pass.
  std::fill(flag.begin(), flag.end(), kNone);
  std::vector<std::size_t> fill(f.l_ptr_.begin(), f.l_ptr_.end() - 1);
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t top = ereach(k);
    x[k] = 0.0;
    for (std::size_t p = cp[k]; p < cp[k + 1]; ++p) {
      if (ci[p] <= k) x[ci[p]] += cx[p];
    }
    double d = x[k];
    x[k] = 0.0;
    for (; top < n; ++top) {
      const std::size_t i = stack[top];
      const double lki = x[i] / f.l_val_[f.l_ptr_[i]];
      x[i] = 0.0;
      for (std::size_t p = f.l_ptr_[i] + 1; p < fill[i]; ++p) x[f.l_idx_[p]] -= f.l_val_[p] * lki;
      d -= lki * lki;
      const std::size_t p = fill[i]++;
      f.l_idx_[p] = k;
      f.l_val_[p] = lki;
    }
    if (!(d > 0.0)) throw NotPositiveDefiniteError(iperm[k], d);
    const std::size_t p = fill[k]++;
    f.l_idx_[p] = k;
    f.l_val_[p] = std::sqrt(d);
  }
  return f;
}

std::vector<double> SpdFactorization::solve_lower(std::span<const double> b, bool transposed) const {
  check_dim(dim_, b.size(), "solve_lower");
  const std::size_t n = dim_;
  std::vector<double> y(n);
  if (!transposed) {
    for (std::size_t i = 0; i < n; ++i) y[perm_[i]] = b[i];
    for (std::size_t j = 0; j < n; ++j) {
      y[j] /= l_val_[l_ptr_[j]];
      for (std::size_t p = l_ptr_[j] + 1; p < l_ptr_[j + 1]; ++p) y[l_idx_[p]] -= l_val_[p] * y[j];
    }
    return y;
  }
  y.assign(b.begin(), b.end());
  for (std::size_t j = n; j-- > 0;) {
    for (std::size_t p = l_ptr_[j] + 1; p < l_ptr_[j + 1]; ++p) y[j] -= l_val_[p] * y[l_idx_[p]];
    y[j] /= l_val_[l_ptr_[j]];
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = y[perm_[i]];
  return x;
}

std::vector<double> SpdFactorization::solve(std::span<const double> b) const {
  return solve_lower(solve_lower(b, false), true);
}

std::vector<double> solve(const SpdFactorization& f, std::span<const double> b) { return f.solve(b); }

std::vector<double> solve_lower(const SpdFactorization& f, std::span<const double> b,
                                bool transposed) {
  return f.solve_lower(b, transposed);
}

std::string write_matrix_market(const SparseSymMatrix& a) {
  std::string out = "%%MatrixMarket matrix coordinate real symmetric\n";
  out += std::to_string(a.dim()) + " " + std::to_string(a.dim()) + " " + std::to_string(a.nnz()) + "\n";
  // Upper (r, c) is written as lower (c, r); rows of the upper triangle are
  // columns of the lower one, so this is column-major order.
  for (const MatrixEntry& e : a.entries()) {
    out += std::to_string(e.col + 1) + " " + std::to_string(e.row + 1) + " " + format_double(e.value) + "\n";
  }
  return out;
}

SparseSymMatrix read_matrix_market(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(1, "empty Matrix Market file");
  ++line_no;
  {
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    const auto lower = [](std::string s) {
      for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return s;
    };
    if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate" ||
        lower(field) != "real" || lower(symmetry) != "symmetric") {
      throw ParseError(1, "expected '%%MatrixMarket matrix coordinate real symmetric'");
    }
  }

  std::size_t rows = 0, cols = 0, nnz = 0;
  bool have_size = false;
  std::size_t read = 0;
  std::vector<MatrixEntry> raw;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (!have_size) {
      if (tok.size() != 3) throw ParseError(line_no, "expected '<rows> <cols> <nnz>'");
      rows = parse_index(tok[0], line_no);
      cols = parse_index(tok[1], line_no);
      nnz = parse_index(tok[2], line_no);
      if (rows != cols) throw ParseError(line_no, "symmetric matrix must be square");
      have_size = true;
      continue;
    }
    if (tok.size() != 3) throw ParseError(line_no, "expected '<row> <col> <value>'");
    if (read == nnz) throw ParseError(line_no, "more entries than declared");
    const std::size_t r = parse_index(tok[0], line_no);
    const std::size_t c = parse_index(tok[1], line_no);
    if (r == 0 || c == 0 || r > rows || c > cols) throw ParseError(line_no, "index out of range");
    if (r < c) throw ParseError(line_no, "symmetric storage expects the lower triangle (row >= col)");
    raw.push_back({r - 1, c - 1, parse_double(tok[2], line_no)});
    ++read;
  }
  if (!have_size) throw ParseError(line_no, "missing size line");
  if (read != nnz) {
    throw ParseError(line_no, "declared " + std::to_string(nnz) + " entries, found " + std::to_string(read));
  }
  TripletAccumulator acc(rows);
  for (const MatrixEntry& e : raw) acc.add(e.row, e.col, e.value);
  return acc.finalize();
}

}  // namespace spdefem
