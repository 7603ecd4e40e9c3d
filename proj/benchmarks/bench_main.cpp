#include <random>

#include <benchmark/benchmark.h>

#include "flatmaj/conditions.hpp"
#include "flatmaj/entropies.hpp"
#include "flatmaj/feasibility.hpp"
#include "flatmaj/flatpair.hpp"
#include "flatmaj/jordan.hpp"
#include "flatmaj/sampling.hpp"

using namespace flatmaj;

namespace {

FlatPair fixture_pair(unsigned long long seed, int max_blocks) {
    std::mt19937_64 gen(seed);
    PairSampleOptions opts;
    opts.max_blocks = max_blocks;
    return random_normalized_pair(gen, opts);
}

void BM_BlockDivergence(benchmark::State& state) {
    const FlatPair fp = fixture_pair(41, 6);
    const ParamPoint pt = ParamPoint::finite(0.37, 12.5);
    for (auto _ : state) benchmark::DoNotOptimize(d_hat(fp, pt));
}
BENCHMARK(BM_BlockDivergence);

void BM_TropicalDivergence(benchmark::State& state) {
    const FlatPair fp = fixture_pair(41, 6);
    const ParamPoint pt = ParamPoint::tropical();
    for (auto _ : state) benchmark::DoNotOptimize(d_hat(fp, pt));
}
BENCHMARK(BM_TropicalDivergence);

void BM_DenseDivergence(benchmark::State& state) {
    const DenseOperatorPair d = realize_dense(fixture_pair(41, 6));
    for (auto _ : state) benchmark::DoNotOptimize(d_alphaz_dense(d.a, d.b, 0.37, 12.5));
}
BENCHMARK(BM_DenseDivergence);

void BM_MarginMinimization(benchmark::State& state) {
    const FlatPair in = fixture_pair(42, 4);
    const FlatPair out = fixture_pair(43, 4);
    for (auto _ : state) {
        const auto f = [&](const CompactParam& c) {
            const ParamPoint pt = c.to_point();
            return d_hat(in, pt) - d_hat(out, pt);
        };
        benchmark::DoNotOptimize(minimize_over_domain(f).value);
    }
}
BENCHMARK(BM_MarginMinimization)->Unit(benchmark::kMillisecond);

void BM_JordanDecompose(benchmark::State& state) {
    std::mt19937_64 gen(44);
    const Matrix p = random_projection(12, 5, gen);
    const Matrix q = random_projection(12, 7, gen);
    for (auto _ : state) benchmark::DoNotOptimize(jordan_decompose(p, q).residual);
}
BENCHMARK(BM_JordanDecompose)->Unit(benchmark::kMicrosecond);

void BM_FeasibilitySolve(benchmark::State& state) {
    FlatPair in;
    in.blocks = {Block(1.0, 1.0, 0.25)};
    FlatPair out;
    out.blocks = {Block(1.0, 1.0, 0.5)};
    const FeasibilityProblem pr = tensor_instance(canonicalize(in), canonicalize(out), 1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(solve(pr).residual);
}
BENCHMARK(BM_FeasibilitySolve)->Unit(benchmark::kMillisecond);

void BM_RealizeExtract(benchmark::State& state) {
    const FlatPair fp = fixture_pair(45, 6);
    for (auto _ : state) {
        const DenseOperatorPair d = realize_dense(fp);
        benchmark::DoNotOptimize(flat_pair_from_dense(d).blocks.size());
    }
}
BENCHMARK(BM_RealizeExtract)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
