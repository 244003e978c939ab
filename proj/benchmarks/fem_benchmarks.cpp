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

#include <benchmark/benchmark.h>

#include "spdefem/assembly.hpp"
#include "spdefem/gmrf.hpp"
#include "spdefem/linalg.hpp"
#include "spdefem/mesh.hpp"

namespace {

using namespace spdefem;

void BM_BuildFem(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mesh m = generate_structured_mesh(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(build_fem(m));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.triangle_count()));
}
BENCHMARK(BM_BuildFem)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BuildPrecision(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FemMatrices fem = build_fem(generate_structured_mesh(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(build_precision(fem, 32.0));
}
BENCHMARK(BM_BuildPrecision)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_FactorizePrecision(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PrecisionModel model = build_precision(build_fem(generate_structured_mesh(n, n)), 32.0);
  for (auto _ : state) benchmark::DoNotOptimize(factorize(model.precision()));
  state.counters["nodes"] = static_cast<double>(model.dim());
}
BENCHMARK(BM_FactorizePrecision)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Sample(benchmark::State& state) {
  const PrecisionModel model = build_precision(build_fem(generate_structured_mesh(64, 64)), 32.0);
  (void)model.factor();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample(model, 7, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sample)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_CovarianceColumn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PrecisionModel model = build_precision(build_fem(generate_structured_mesh(n, n)), 32.0);
  (void)covariance_column(model, 0);
  for (auto _ : state) benchmark::DoNotOptimize(covariance_column(model, model.dim() / 2));
}
BENCHMARK(BM_CovarianceColumn)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
