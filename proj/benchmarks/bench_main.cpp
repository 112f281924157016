// Hot paths: mode decomposition, entanglement measures,
// open-system stepping, and the grid oracle.

#include <random>

#include <benchmark/benchmark.h>

#include "bipartition/entanglement.hpp"
#include "bipartition/gaussian_state.hpp"
#include "bipartition/hamiltonian.hpp"
#include "bipartition/open_system.hpp"
#include "bipartition/oracle.hpp"

using namespace bipartition;

namespace {

// Dense positive definite potential over n modes, fixed seed.
QuadraticHamiltonian chain_hamiltonian(int n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    Matrix v = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            v(i, j) = u(rng) / (1 + j - i);
            v(j, i) = v(i, j);
        }
    }
    v += static_cast<double>(n) * 0.1 * Matrix::Identity(n, n);
    std::vector<double> masses(n, 1.0);
    for (int i = 0; i < n; ++i) masses[i] = 1.0 + 0.1 * i;
    return build_hamiltonian(masses, v);
}

QuadraticHamiltonian pair_hamiltonian() {
    Matrix v(2, 2);
    v << 1.0, 0.5,  //
        0.5, 1.0;
    return build_hamiltonian({1.0, 1.0}, v);
}

void BM_normal_modes(benchmark::State& state) {
    const auto h = chain_hamiltonian(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(normal_modes(h));
    }
}

void BM_ground_state(benchmark::State& state) {
    const auto h = chain_hamiltonian(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ground_state(h));
    }
}

void BM_log_negativity(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto g = ground_state(chain_hamiltonian(n));
    std::vector<int> first;
    for (int i = 0; i < n / 2; ++i) first.push_back(i);
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_negativity(g, first));
    }
}

void BM_evolve_unit_time(benchmark::State& state) {
    const auto h = pair_hamiltonian();
    const auto g = ground_state(h);
    NoiseSpec noise;
    noise.target_modes = {0};
    noise.diffusion = 0.1 * Matrix::Identity(2, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evolve(g, h, noise, 1.0));
    }
}

void BM_oracle(benchmark::State& state) {
    const auto g = ground_state(pair_hamiltonian());
    GridOptions options;
    options.points = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle_measures(g, options));
    }
}

}  // namespace

BENCHMARK(BM_normal_modes)->Arg(4)->Arg(16)->Arg(64);
BENCHMARK(BM_ground_state)->Arg(4)->Arg(16)->Arg(64);
BENCHMARK(BM_log_negativity)->Arg(4)->Arg(16)->Arg(64);
BENCHMARK(BM_evolve_unit_time)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_oracle)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
