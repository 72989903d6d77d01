#include "bla/linalg.hpp"
#include "bla/rng.hpp"

#include <benchmark/benchmark.h>

using namespace bla;

namespace {

SymMatrix random_spd(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
    }
    Matrix a = g * g.transpose() + Matrix::Identity(n, n) * 0.1;
    Matrix sym = 0.5 * (a + a.transpose());
    return SymMatrix::from_dense(sym);
}

void bench_jacobi_extremes(benchmark::State& state) {
    Rng rng = make_rng(1, "bench");
    SymMatrix a = random_spd(state.range(0), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(extreme_eigenvalues(a));
    }
}

void bench_richardson(benchmark::State& state) {
    Rng rng = make_rng(2, "bench");
    Eigen::Index n = state.range(0);
    SymMatrix a = random_spd(n, rng);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix b(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) b(i, 0) = gauss(rng);
    EigenBounds bounds = extreme_eigenvalues(a);
    double mu = step_size(bounds.lambda_min, bounds.lambda_max);
    Matrix w0 = Matrix::Zero(n, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(richardson_solve(a, b, w0, mu, 1e-10, 200000));
    }
}

void bench_moment_accumulate(benchmark::State& state) {
    Rng rng = make_rng(3, "bench");
    Eigen::Index n = state.range(0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
    SymMatrix a = SymMatrix::zero(n);
    for (auto _ : state) {
        a.add_outer(v);
        benchmark::DoNotOptimize(a);
    }
}

} // namespace

BENCHMARK(bench_jacobi_extremes)->Arg(11)->Arg(101);
BENCHMARK(bench_richardson)->Arg(11)->Arg(101);
BENCHMARK(bench_moment_accumulate)->Arg(101);
