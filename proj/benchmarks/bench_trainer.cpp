#include "bla/baselines.hpp"
#include "bla/trainer.hpp"

#include <benchmark/benchmark.h>

using namespace bla;

namespace {

Dataset make_data(Eigen::Index n) {
    Rng rng = make_rng(6, "bench");
    GeneratorSpec spec;
    spec.tag = GeneratorTag::F1;
    return gen_regression(spec, n, rng);
}

void bench_forward(benchmark::State& state) {
    Rng rng = make_rng(7, "bench");
    Network net =
        init_network({1, 100, 1}, {Activation::tanh(), Activation::identity()}, 0.5, rng);
    Vector x(1);
    x << 1.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(net, x));
    }
}

void bench_train_epoch(benchmark::State& state) {
    Dataset train = make_data(state.range(0));
    BlaConfig cfg;
    cfg.seed = 12;
    Rng rng = make_rng(cfg.seed, "init");
    for (auto _ : state) {
        state.PauseTiming();
        Network net = init_from_spec(cfg.net, 1, rng);
        std::vector<MomentState> moments = {MomentState::zero(2, 100),
                                            MomentState::zero(101, 1)};
        state.ResumeTiming();
        train_epoch(net, train, moments, 1, cfg);
    }
}

void bench_backprop_epoch(benchmark::State& state) {
    Dataset train = make_data(state.range(0));
    Rng rng = make_rng(8, "bench");
    Network net =
        init_network({1, 100, 1}, {Activation::tanh(), Activation::identity()}, 0.5, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(backprop_gradients(net, train));
    }
}

} // namespace

BENCHMARK(bench_forward);
BENCHMARK(bench_train_epoch)->Arg(600)->Arg(6000)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_backprop_epoch)->Arg(6000)->Unit(benchmark::kMillisecond);
