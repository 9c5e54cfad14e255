// Serial reference kernels against the OpenMP ones on 2D and 3D grids.
// Set OMP_NUM_THREADS to vary the thread count.

#include "hlab/fields.hpp"
#include "hlab/pde.hpp"
#include "hlab/reference.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace hlab;

namespace {

GridSpec grid_for(const benchmark::State &state) {
    const int dim = static_cast<int>(state.range(0));
    const int n = static_cast<int>(state.range(1));
    return GridSpec::uniform(dim, 8.0, n, Topology::box);
}

ScalarField smooth(const GridSpec &g) {
    return ScalarField::sample(g, [](const Point &x) {
        return 2.0 + std::sin(x[0]) * std::cos(0.7 * x[1]) + 0.1 * x[2] * x[2];
    });
}

void args(benchmark::internal::Benchmark *b) {
    b->Args({2, 256})->Args({2, 1024})->Args({3, 64})->Args({3, 128})->Unit(benchmark::kMicrosecond);
}

template <class F>
void run(benchmark::State &state, F kernel) {
    const GridSpec g = grid_for(state);
    const ScalarField f = smooth(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel(f));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(g.size()));
}

void BM_laplacian_reference(benchmark::State &s) { run(s, [](const ScalarField &f) { return reference::laplacian(f); }); }
void BM_laplacian_omp(benchmark::State &s) { run(s, [](const ScalarField &f) { return laplacian(f); }); }
void BM_gradient_reference(benchmark::State &s) { run(s, [](const ScalarField &f) { return reference::gradient(f); }); }
void BM_gradient_omp(benchmark::State &s) { run(s, [](const ScalarField &f) { return gradient(f); }); }
void BM_hessian_reference(benchmark::State &s) { run(s, [](const ScalarField &f) { return reference::hessian(f); }); }
void BM_hessian_omp(benchmark::State &s) { run(s, [](const ScalarField &f) { return hessian(f); }); }
void BM_integrate_reference(benchmark::State &s) { run(s, [](const ScalarField &f) { return reference::integrate(f); }); }
void BM_integrate_omp(benchmark::State &s) { run(s, [](const ScalarField &f) { return integrate(f); }); }

template <bool Ref>
void linear_rhs_bench(benchmark::State &state) {
    const GridSpec g = grid_for(state);
    const ScalarField rho = smooth(g);
    const VectorField drift = gradient(rho);
    const ScalarField reaction(g, -0.5);
    std::vector<double> out;
    for (auto _ : state) {
        if constexpr (Ref) {
            reference::linear_rhs(rho, drift, reaction, out);
        } else {
            linear_rhs(rho, drift, reaction, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(g.size()));
}

}  // namespace

BENCHMARK(BM_laplacian_reference)->Apply(args);
BENCHMARK(BM_laplacian_omp)->Apply(args);
BENCHMARK(BM_gradient_reference)->Apply(args);
BENCHMARK(BM_gradient_omp)->Apply(args);
BENCHMARK(BM_hessian_reference)->Apply(args);
BENCHMARK(BM_hessian_omp)->Apply(args);
BENCHMARK(BM_integrate_reference)->Apply(args);
BENCHMARK(BM_integrate_omp)->Apply(args);
BENCHMARK(linear_rhs_bench<true>)->Name("BM_linear_rhs_reference")->Apply(args);
BENCHMARK(linear_rhs_bench<false>)->Name("BM_linear_rhs_omp")->Apply(args);

BENCHMARK_MAIN();
