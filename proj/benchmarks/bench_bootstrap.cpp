#include "bla/bootstrap.hpp"
#include "bla/data.hpp"

#include <benchmark/benchmark.h>

using namespace bla;

namespace {

struct Fixture {
    Network net;
    Dataset batch;
    std::vector<Particle> proposals;

    explicit Fixture(Eigen::Index n) {
        Rng rng = make_rng(4, "bench");
        net = init_network({1, 100, 1}, {Activation::tanh(), Activation::identity()}, 0.5, rng);
        GeneratorSpec spec;
        spec.tag = GeneratorTag::F1;
        batch = gen_regression(spec, n, rng);
        for (Eigen::Index i = 0; i < batch.size(); ++i) {
            proposals.push_back(forward_trace(net, batch.input(i)));
        }
    }
};

// The dominant cost of a training batch: distances from one datum to every
// proposal, then the top-delta scan.
void bench_candidate_set(benchmark::State& state) {
    Fixture f(state.range(0));
    ResampleConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(candidate_set(f.batch.input(0), f.batch.y[0], f.proposals, cfg));
    }
}

void bench_resample_index(benchmark::State& state) {
    Fixture f(state.range(0));
    ResampleConfig cfg;
    Rng rng = make_rng(5, "bench");
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            resample_index(f.batch.input(0), f.batch.y[0], f.proposals, cfg, rng));
    }
}

} // namespace

BENCHMARK(bench_candidate_set)->Arg(600)->Arg(6000);
BENCHMARK(bench_resample_index)->Arg(600)->Arg(6000);
