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

#include "spdefem/gmrf.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "spdefem/error.hpp"
#include "spdefem/io.hpp"
#include "spdefem/random.hpp"

namespace spdefem {

struct PrecisionModel::Cache {
  std::once_flag precision_once;
  std::once_flag operator_once;
  std::once_flag noise_once;
  std::optional<SpdFactorization> precision;
  std::optional<SpdFactorization> op;
  std::optional<SpdFactorization> noise;
};

const SpdFactorization& PrecisionModel::factor() const {
  std::call_once(cache_->precision_once, [this] { cache_->precision = factorize(precision_); });
  return *cache_->precision;
}

const SpdFactorization& PrecisionModel::operator_factor() const {
  std::call_once(cache_->operator_once, [this] { cache_->op = factorize(operator_); });
  return *cache_->op;
}

const SpdFactorization& PrecisionModel::noise_factor() const {
  if (!noise_precision_) throw PreconditionError("model uses a diagonal noise precision");
  std::call_once(cache_->noise_once, [this] { cache_->noise = factorize(*noise_precision_); });
  return *cache_->noise;
}

namespace {

void check_k(double k) {
  if (!(k > 0.0)) throw PreconditionError("k must be positive (k = " + format_double(k) + ")");
}

}  // namespace

PrecisionModel build_precision(const FemMatrices& fem, double k) {
  check_k(k);
  std::vector<double> inv(fem.white_noise.size());
  for (std::size_t i = 0; i < inv.size(); ++i) {
    if (!(fem.white_noise[i] > 0.0)) {
      throw PreconditionError("white-noise variance of node " + std::to_string(i) + " is not positive");
    }
    inv[i] = 1.0 / fem.white_noise[i];
  }
  PrecisionModel m;
  m.k_ = k;
  m.operator_ = linear_combination(k, fem.mass, 1.0, fem.stiffness);
  m.precision_ = congruence_diag(m.operator_, inv);
  m.white_noise_ = fem.white_noise;
  m.cache_ = std::make_shared<PrecisionModel::Cache>();
  return m;
}

PrecisionModel build_precision(const FemMatrices& fem, double k, const SparseSymMatrix& noise_precision) {
  check_k(k);
  if (noise_precision.dim() != fem.mass.dim()) {
    throw DimensionError("noise precision has dimension " + std::to_string(noise_precision.dim()) +
                         ", mesh has " + std::to_string(fem.mass.dim()) + " nodes");
  }
  PrecisionModel m;
  m.k_ = k;
  m.operator_ = linear_combination(k, fem.mass, 1.0, fem.stiffness);
  m.precision_ = congruence(m.operator_, noise_precision);
  m.noise_precision_ = noise_precision;
  m.cache_ = std::make_shared<PrecisionModel::Cache>();
  return m;
}

std::vector<Field> sample(const PrecisionModel& model, std::uint64_t seed, std::size_t n) {
  if (n == 0) throw PreconditionError("sample count must be at least 1");
  const SpdFactorization& f = model.factor();
  std::vector<Field> out;
  out.reserve(n);
  std::vector<double> z(model.dim());
  for (std::size_t s = 0; s < n; ++s) {
    NormalStream(seed, s).fill(z);
    // x = P^T L^-T z has covariance (P^T L L^T P)^-1 = Q_u^-1.
    out.push_back({f.solve_lower(z, true)});
  }
  return out;
}

std::vector<double> covariance_column(const PrecisionModel& model, std::size_t i) {
  if (i >= model.dim()) {
    throw DimensionError("node " + std::to_string(i) + " out of range for " + std::to_string(model.dim()) +
                         " nodes");
  }
  const SpdFactorization& b = model.operator_factor();
  std::vector<double> e(model.dim(), 0.0);
  e[i] = 1.0;
  std::vector<double> y = b.solve(e);
  if (model.noise_precision()) {
    y = model.noise_factor().solve(y);
  } else {
    for (std::size_t j = 0; j < y.size(); ++j) y[j] *= model.white_noise()[j];
  }
  return b.solve(y);
}

std::vector<double> marginal_variances(const PrecisionModel& model, std::span<const std::size_t> nodes) {
  std::vector<double> v;
  v.reserve(nodes.size());
  for (std::size_t i : nodes) v.push_back(covariance_column(model, i)[i]);
  return v;
}

std::vector<double> marginal_variances(const PrecisionModel& model) {
  std::vector<std::size_t> all(model.dim());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return marginal_variances(model, all);
}

MaternSpec MaternSpec::from_k(double k) {
  if (!(k > 0.0)) throw PreconditionError("k must be positive");
  return {std::sqrt(k)};
}

MaternSpec MaternSpec::from_range(double range) {
  if (!(range > 0.0)) throw PreconditionError("range must be positive");
  return {std::sqrt(8.0 * kNu) / range};
}

double MaternSpec::empirical_range() const { return std::sqrt(8.0 * kNu) / kappa; }

double matern_correlation(double d, const MaternSpec& spec) {
  if (!(d >= 0.0)) throw PreconditionError("distance must be non-negative");
  const double x = spec.kappa * d;
  if (x == 0.0) return 1.0;
  return x * std::cyl_bessel_k(1.0, x);
}

MaternValidation validate_matern(const Mesh& mesh, const PrecisionModel& model, const MaternSpec& spec,
                                 std::size_t probe) {
  if (model.dim() != mesh.node_count()) throw DimensionError("model does not match mesh");
  if (probe >= mesh.node_count()) throw DimensionError("probe node out of range");
  const double range = spec.empirical_range();
  const auto boundary = boundary_edges(mesh);
  const Point centre = mesh.node(probe);

  MaternValidation r;
  r.probe = probe;
  r.probe_point = centre;
  r.quality = quality_report(mesh, range, std::span<const Point>(&centre, 1), boundary);
  r.rules_pass = r.quality.passes_edge_rule && r.quality.passes_boundary_rule;

  std::vector<std::size_t> nodes;
  for (std::size_t j = 0; j < mesh.node_count(); ++j) {
    const Point& p = mesh.node(j);
    if (std::hypot(p.x - centre.x, p.y - centre.y) > 2.0 * range) continue;
    const double dist = distance_to_boundary(mesh, boundary, p);
    if (dist >= range / 2.0) nodes.push_back(j);
  }
  r.compared_nodes = nodes.size();
  if (nodes.empty()) return r;

  const auto column = covariance_column(model, probe);
  const auto variances = marginal_variances(model, nodes);
  const double probe_var = column[probe];
  double sum = 0.0, var_sum = 0.0, var_sq = 0.0;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const std::size_t j = nodes[n];
    const Point& p = mesh.node(j);
    const double d = std::hypot(p.x - centre.x, p.y - centre.y);
    const double fem_corr = column[j] / std::sqrt(probe_var * variances[n]);
    const double diff = std::abs(fem_corr - matern_correlation(d, spec));
    sum += diff;
    if (diff > r.max_discrepancy) {
      r.max_discrepancy = diff;
      r.worst_distance = d;
    }
    var_sum += variances[n];
    var_sq += variances[n] * variances[n];
  }
  const double count = static_cast<double>(nodes.size());
  r.mean_discrepancy = sum / count;
  const double mean_var = var_sum / count;
  r.variance_cv = std::sqrt(std::max(0.0, var_sq / count - mean_var * mean_var)) / mean_var;
  return r;
}

}  // namespace spdefem
