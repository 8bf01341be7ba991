#include <benchmark/benchmark.h>

#include "vsb/metrics.hpp"
#include "vsb/ranking.hpp"
#include "vsb/rng.hpp"
#include "vsb/synth.hpp"
#include "vsb/trainer.hpp"

using namespace vsb;

namespace {

SynthData make_data(size_t n, size_t dim) {
    SynthConfig cfg;
    cfg.n_items = n;
    cfg.dim = dim;
    cfg.seed = 17;
    return generate_synthetic(cfg);
}

void BM_pool_corpus(benchmark::State& state) {
    const auto data = make_data(200, 32);
    const PoolSpec spec =
        state.range(0) == 0 ? PoolSpec::uniform() : PoolSpec::ramp();
    for (auto _ : state) {
        benchmark::DoNotOptimize(pool_corpus(data.real, spec, 10));
    }
}
BENCHMARK(BM_pool_corpus)->Arg(0)->Arg(1);

void BM_rank_relevant(benchmark::State& state) {
    const auto n = static_cast<size_t>(state.range(0));
    const auto data = make_data(n, 32);
    const auto pooled = pool_corpus(data.real, PoolSpec::uniform(), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rank_relevant(pooled, data.queries, data.rel));
    }
    state.SetComplexityN(static_cast<int64_t>(n));
}
BENCHMARK(BM_rank_relevant)->Arg(200)->Arg(1000)->Complexity(benchmark::oNSquared);

void BM_rank_mixed(benchmark::State& state) {
    const auto data = make_data(static_cast<size_t>(state.range(0)), 32);
    const auto real = pool_corpus(data.real, PoolSpec::uniform(), 10);
    const auto ai = pool_corpus(data.ai, PoolSpec::uniform(), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rank_mixed(real, ai, data.queries, data.rel));
    }
}
BENCHMARK(BM_rank_mixed)->Arg(200)->Arg(500);

void BM_location_delta(benchmark::State& state) {
    RankTable ranks;
    ranks.corpus_size = 1000;
    Rng gen(5);
    for (size_t i = 0; i < 10000; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "q%05zu", i);
        ranks.ranks[id] = 1 + static_cast<uint32_t>(gen.next_below(1000));
    }
    uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(location_delta(ranks, ranks, seed++));
    }
}
BENCHMARK(BM_location_delta);

void BM_objective_and_gradient(benchmark::State& state) {
    const auto data = make_data(64, 32);
    const auto pooled = pool_corpus(data.real, PoolSpec::uniform(), 10);
    const auto pooled_ai = pool_corpus(data.ai, PoolSpec::uniform(), 10);
    const auto params = ScorerParams::identity(32, 0.1);
    std::vector<BatchItem> batch;
    std::vector<Triplet> triplets;
    for (size_t i = 0; i < 32; ++i) {
        batch.push_back({&pooled[i], &data.queries[i]});
        triplets.push_back({&pooled[i], &pooled_ai[i], &data.queries[i]});
    }
    std::vector<double> grad;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            objective_and_gradient(params, batch, triplets, 1.0, &grad));
    }
}
BENCHMARK(BM_objective_and_gradient);

void BM_train_epoch(benchmark::State& state) {
    const auto data = make_data(200, 32);
    TrainConfig tc;
    tc.epochs = 1;
    tc.batch_size = 32;
    tc.seed = 3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(tc, data.real, data.ai, data.queries, data.rel));
    }
}
BENCHMARK(BM_train_epoch);

void BM_generate_synthetic(benchmark::State& state) {
    SynthConfig cfg;
    cfg.n_items = static_cast<size_t>(state.range(0));
    cfg.dim = 32;
    for (auto _ : state) {
        cfg.seed++;
        benchmark::DoNotOptimize(generate_synthetic(cfg));
    }
}
BENCHMARK(BM_generate_synthetic)->Arg(200);

} // namespace

BENCHMARK_MAIN();
