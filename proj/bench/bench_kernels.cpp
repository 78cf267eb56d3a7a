// Copyright 2026 The cohprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Master-equation right-hand side: dense serial reference against the banded
// kernel, the latter on one thread and on every available thread.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "cohprobe/liouvillian.hpp"
#include "cohprobe/states.hpp"

using namespace cohprobe;

namespace {

PhysicalParams bench_params() {
    PhysicalParams p;
    p.gamma = 0.01;
    p.theta = 1.0;
    p.epsilon = 0.7;
    p.lambda = 0.1;
    return p;
}

Matrix bench_state(const SpaceDescriptor& s) {
    return prepare_protocol_input(ThermalSpec{0.5}, s).matrix();
}

DissipatorKind kind_of(const benchmark::State& state) {
    return state.range(1) == 0 ? DissipatorKind::QuantumOptical : DissipatorKind::CaldeiraLeggett;
}

void BM_DenseReference(benchmark::State& state) {
    const PhysicalParams p = bench_params();
    const SpaceDescriptor s = build_space(static_cast<int>(state.range(0)), 1.0, 1.0);
    const Matrix rho = bench_state(s);
    for (auto _ : state) benchmark::DoNotOptimize(rhs_reference(rho, p, s, kind_of(state)));
}

void run_banded(benchmark::State& state, int threads) {
    const PhysicalParams p = bench_params();
    const SpaceDescriptor s = build_space(static_cast<int>(state.range(0)), 1.0, 1.0);
    const Matrix rho = bench_state(s);
    const Liouvillian l(p, s, kind_of(state));
    Matrix out;
    const int saved = omp_get_max_threads();
    omp_set_num_threads(threads);
    for (auto _ : state) {
        l.apply(rho, out);
        benchmark::DoNotOptimize(out.data());
    }
    omp_set_num_threads(saved);
    state.counters["threads"] = threads;
}

void BM_BandedSerial(benchmark::State& state) { run_banded(state, 1); }
void BM_BandedParallel(benchmark::State& state) { run_banded(state, omp_get_max_threads()); }

void sizes(benchmark::internal::Benchmark* b) {
    for (int kind : {0, 1}) {
        for (int n : {16, 32, 64, 96}) b->Args({n, kind});
    }
    b->ArgNames({"N", "cl"})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_DenseReference)->Apply(sizes);
BENCHMARK(BM_BandedSerial)->Apply(sizes);
BENCHMARK(BM_BandedParallel)->Apply(sizes);

BENCHMARK_MAIN();
