// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "ethmerge/cleaning.hpp"
#include "ethmerge/fees.hpp"
#include "ethmerge/predictor.hpp"
#include "ethmerge/rng.hpp"
#include "ethmerge/slot_map.hpp"
#include "ethmerge/synth.hpp"

using namespace ethmerge;

namespace {

FeatureMatrix random_rows(Rng& rng, std::size_t n, std::size_t dim, std::vector<double>& y) {
    FeatureMatrix x;
    for (std::size_t j = 0; j < dim; ++j) {
        x.names.push_back("f" + std::to_string(j));
    }
    x.rows.assign(n, std::vector<double>(dim));
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x.rows[i]) {
            v = rng.normal();
        }
        y[i] = x.rows[i][0] * x.rows[i][1] + rng.normal();
    }
    return x;
}

}  // namespace

static void BM_Bsmap(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    std::vector<std::optional<uint64_t>> table(n);
    uint64_t block = 1;
    for (auto& slot : table) {
        if (!rng.bernoulli(0.3)) {
            slot = block++;
        }
    }
    const TableResolver resolver(table);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bsmap(resolver.head(), 1 + rng.below(block - 1), resolver));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Bsmap)->RangeMultiplier(8)->Range(1 << 10, 1 << 22)->Complexity(benchmark::oLogN);

static void BM_DeriveFees(benchmark::State& state) {
    SynthFeeConfig config;
    config.n_txs = 10'000;
    const auto series = gen_fee_series(config);
    const auto& chain = series.chain;
    for (auto _ : state) {
        std::size_t h = 0;
        for (const auto& tx : chain.txs) {
            while (chain.headers[h].number != tx.block_number) {
                ++h;
            }
            benchmark::DoNotOptimize(derive_fees(tx, chain.headers[h]));
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(chain.txs.size()));
}
BENCHMARK(BM_DeriveFees);

static void BM_Clean(benchmark::State& state) {
    Rng rng(2);
    std::vector<ScreenRow> rows(static_cast<std::size_t>(state.range(0)));
    for (auto& row : rows) {
        row = {rng.normal(), rng.normal() * 5.0 + (rng.bernoulli(0.01) ? 100.0 : 0.0)};
    }
    const CleaningPolicy policy{3.0, 1.5, {"a", "b"}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(clean(rows, policy));
    }
}
BENCHMARK(BM_Clean)->Arg(10'000)->Arg(100'000);

static void BM_TrainModel(benchmark::State& state) {
    Rng rng(3);
    std::vector<double> y;
    const FeatureMatrix x = random_rows(rng, 5'000, 10, y);
    ModelSpec spec;
    spec.kind = static_cast<ModelKind>(state.range(0));
    state.SetLabel(std::string(to_string(spec.kind)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(spec, x, y));
    }
}
BENCHMARK(BM_TrainModel)
    ->Arg(static_cast<int>(ModelKind::kLinear))
    ->Arg(static_cast<int>(ModelKind::kTree))
    ->Arg(static_cast<int>(ModelKind::kGradientBoosting))
    ->Unit(benchmark::kMillisecond);

static void BM_KnnPredict(benchmark::State& state) {
    Rng rng(4);
    std::vector<double> y;
    const FeatureMatrix x = random_rows(rng, static_cast<std::size_t>(state.range(0)), 10, y);
    ModelSpec spec;
    spec.kind = ModelKind::kKnn;
    const auto model = train(spec, x, y);
    std::vector<double> query(10);
    for (auto _ : state) {
        for (auto& v : query) {
            v = rng.normal();
        }
        benchmark::DoNotOptimize(predict_row(model, query));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnnPredict)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oN);

BENCHMARK_MAIN();
