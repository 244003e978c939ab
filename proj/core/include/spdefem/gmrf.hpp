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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "spdefem/assembly.hpp"
#include "spdefem/linalg.hpp"
#include "spdefem/mesh.hpp"
#include "spdefem/pde.hpp"

namespace spdefem {

/// Sparse GMRF for the discretized SPDE k u - laplace(u) = white noise:
///
///   Q_u = B Q_f B,   B = k J + D,   Q_f = diag(1 / a)
///
/// where a is the white-noise variance vector. A general sparse SPD Q_f may
/// be supplied instead of the diagonal one.
///
/// Immutable once built. Cholesky factors of Q_u, B and (for a general
/// Q_f) Q_f are computed on first use and shared between copies; first use
/// from several threads at once is safe.
class PrecisionModel {
 public:
  std::size_t dim() const noexcept { return precision_.dim(); }
  double k() const noexcept { return k_; }

  const SparseSymMatrix& precision() const noexcept { return precision_; }
  /// B = kJ + D.
  const SparseSymMatrix& operator_matrix() const noexcept { return operator_; }
  /// Diagonal white-noise variances a; empty when a general Q_f was given.
  const std::vector<double>& white_noise() const noexcept { return white_noise_; }
  /// The general noise precision, if one was given.
  const std::optional<SparseSymMatrix>& noise_precision() const noexcept { return noise_precision_; }

  const SpdFactorization& factor() const;
  const SpdFactorization& operator_factor() const;
  const SpdFactorization& noise_factor() const;

 private:
  friend PrecisionModel build_precision(const FemMatrices&, double);
  friend PrecisionModel build_precision(const FemMatrices&, double, const SparseSymMatrix&);
  struct Cache;

  double k_ = 0.0;
  SparseSymMatrix operator_;
  SparseSymMatrix precision_;
  std::vector<double> white_noise_;
  std::optional<SparseSymMatrix> noise_precision_;
  std::shared_ptr<Cache> cache_;
};

/// Requires k > 0 and every white-noise variance > 0.
PrecisionModel build_precision(const FemMatrices& fem, double k);
PrecisionModel build_precision(const FemMatrices& fem, double k, const SparseSymMatrix& noise_precision);

/// Draws n fields with covariance Q_u^-1. Sample s uses the normal stream
/// (seed, s), so output is a pure function of (seed, n, model).
std::vector<Field> sample(const PrecisionModel& model, std::uint64_t seed, std::size_t n);

/// Column i of Q_u^-1, computed as B^-1 Q_f^-1 B^-1 e_i.
std::vector<double> covariance_column(const PrecisionModel& model, std::size_t i);

/// Diagonal of Q_u^-1. One covariance column per node, so the full version
/// costs dim() pairs of solves; pass `nodes` to restrict it.
std::vector<double> marginal_variances(const PrecisionModel& model);
std::vector<double> marginal_variances(const PrecisionModel& model, std::span<const std::size_t> nodes);

/// Matérn parameters matched to the operator k - laplace in 2D: kappa =
/// sqrt(k), smoothness nu = 1, empirical range sqrt(8 nu) / kappa (the
/// distance where the correlation is about 0.14).
struct MaternSpec {
  double kappa = 1.0;
  static constexpr double kNu = 1.0;

  static MaternSpec from_k(double k);
  static MaternSpec from_range(double range);
  double k() const { return kappa * kappa; }
  double empirical_range() const;
};

/// kappa d K_1(kappa d), the nu = 1 Matérn correlation; 1 at d = 0.
double matern_correlation(double d, const MaternSpec& spec);

struct MaternValidation {
  std::size_t probe = 0;
  Point probe_point;
  QualityReport quality;
  /// Both rules of thumb hold at the probe.
  bool rules_pass = false;
  /// Nodes within 2 ranges of the probe and at least range/2 from the boundary.
  std::size_t compared_nodes = 0;
  double max_discrepancy = 0.0;
  double mean_discrepancy = 0.0;
  /// Distance from the probe of the node with the largest discrepancy.
  double worst_distance = 0.0;
  /// Coefficient of variation of the marginal variances over compared nodes.
  double variance_cv = 0.0;
};

/// Compares FEM correlations against the Matérn correlation around `probe`.
/// Rule-of-thumb violations are reported in the result, never thrown.
MaternValidation validate_matern(const Mesh& mesh, const PrecisionModel& model, const MaternSpec& spec,
                                 std::size_t probe);

}  // namespace spdefem
