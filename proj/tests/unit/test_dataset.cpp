// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ethmerge/cleaning.hpp"
#include "ethmerge/dataset.hpp"
#include "ethmerge/fees.hpp"
#include "ethmerge/rng.hpp"
#include "ethmerge/stats.hpp"
#include "ethmerge/synth.hpp"
#include "test_support.hpp"

using namespace ethmerge;
using Catch::Approx;

namespace {

BlockHeader header_with_base_fee(uint64_t number, uint64_t base_fee_wei) {
    BlockHeader h = test::linked_headers(number, 1).front();
    h.base_fee_per_gas = Wei(base_fee_wei);
    return h;
}

ScreenRow one(double v) { return ScreenRow{v}; }

// 3 blocks, 5 transactions in blocks 101 and 102 (block 100 has no predecessor header, so its
// seconds_since_prev_block would be missing).
ChainData three_block_fixture() {
    ChainData d;
    d.headers = test::linked_headers(100, 3);
    d.txs = {test::make_tx(101, 1, 21'000, 11'000'000'000ULL), test::make_tx(101, 2, 50'000, 12'500'000'000ULL),
             test::make_tx(101, 3, 30'000, 10'400'000'000ULL), test::make_tx(102, 4, 65'000, 13'000'000'000ULL),
             test::make_tx(102, 5, 46'000, 10'900'000'000ULL)};
    d.slots = test::slots_for(d.headers, 30, 2);
    return d;
}

FeatureConfig permissive_config() {
    FeatureConfig c;
    c.lag_windows = {};
    c.baseline_window = 2;
    c.train_fraction = 1.0;
    c.cleaning.z_threshold = 100.0;
    c.cleaning.iqr_fence_multiplier = 100.0;
    return c;
}

}  // namespace

TEST_CASE("derive_fees examples", "[fees]") {
    const BlockHeader block = header_with_base_fee(100, 10'000'000'000ULL);
    const FeeBreakdown f = derive_fees(test::make_tx(100, 1, 21'000, 12'000'000'000ULL), block);
    CHECK(f.base_fee == Wei(210'000'000'000'000ULL));
    CHECK(f.txn_fee == Wei(252'000'000'000'000ULL));
    CHECK(f.priority_fee == Wei(42'000'000'000'000ULL));
    CHECK(fee_identities_hold(f));

    const FeeBreakdown zero = derive_fees(test::make_tx(100, 2, 0, 12'000'000'000ULL), block);
    CHECK(zero.base_fee == 0);
    CHECK(zero.txn_fee == 0);
    CHECK(zero.priority_fee == 0);

    const BlockHeader dear = header_with_base_fee(100, 12'000'000'000ULL);
    CHECK(test::error_code([&] { (void)derive_fees(test::make_tx(100, 3, 21'000, 10'000'000'000ULL), dear); }) ==
          Errc::kInconsistentRecord);
    CHECK(test::error_code([&] { (void)derive_fees(test::make_tx(101, 4, 21'000, 12'000'000'000ULL), block); }) ==
          Errc::kInconsistentRecord);
}

TEST_CASE("fee identities hold for wide integers", "[fees][property]") {
    Rng rng(77);
    for (int i = 0; i < 2000; ++i) {
        BlockHeader block = header_with_base_fee(5, 0);
        block.base_fee_per_gas = Wei(rng.next_u64()) * Wei(rng.below(1000) + 1);
        TxRecord tx = test::make_tx(5, i, rng.below(30'000'000), 0);
        tx.gas_price = block.base_fee_per_gas + Wei(rng.next_u64());
        const FeeBreakdown f = derive_fees(tx, block);
        REQUIRE(fee_identities_hold(f));
        CHECK(f.base_fee + f.priority_fee == f.txn_fee);
        CHECK(f.txn_fee == Wei(tx.gas_used) * tx.gas_price);
    }
}

TEST_CASE("z_scores", "[cleaning]") {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    const auto z = z_scores(v);
    CHECK(z[7] == 2.0);
    CHECK(z[0] == -1.5);
    CHECK(z[4] == 0.0);
    const std::vector<double> flat{3, 3, 3};
    CHECK(test::error_code([&] { (void)z_scores(flat); }) == Errc::kDegenerateDistribution);

    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> xs(2 + rng.below(500));
        for (auto& x : xs) {
            x = rng.normal() * 1e3 + 5e3;
        }
        const auto zs = z_scores(xs);
        CHECK(std::abs(mean(zs)) <= 1e-9);
        const double sd = population_stddev(zs);
        CHECK(std::abs(sd * sd - 1.0) <= 1e-9);
    }
}

TEST_CASE("standardized_iqr", "[cleaning]") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(standardized_iqr(v) == Approx(49.5 / 50.5).margin(1e-12));
    CHECK(std::abs(standardized_iqr(v) - 0.980198) <= 1e-6);
    const std::vector<double> flat(10, 4.0);
    CHECK(standardized_iqr(flat) == 0.0);
    const std::vector<double> symmetric{-3, -1, 0, 1, 3};
    CHECK(test::error_code([&] { (void)standardized_iqr(symmetric); }) == Errc::kZeroMedian);
}

TEST_CASE("clean removes a planted outlier by the z rule", "[cleaning]") {
    Rng rng(4);
    std::vector<ScreenRow> rows;
    for (int i = 0; i < 100; ++i) {
        rows.push_back(one(10.0 + 0.1 * rng.normal()));
    }
    rows[42] = one(10.0 + 50.0 * 0.1);
    CleaningPolicy policy{3.0, 1.5, {"priority_fee"}};
    const auto result = clean(rows, policy);
    CHECK(std::find(result.kept.begin(), result.kept.end(), 42u) == result.kept.end());
    CHECK(result.report.flagged_z >= 1);
    CHECK(result.report.removed_missing == 0);
    CHECK(result.report.input_rows == 100);
    CHECK(result.report.kept_rows == result.kept.size());
    CHECK(std::is_sorted(result.kept.begin(), result.kept.end()));
}

TEST_CASE("clean is a no-op on inlying rows", "[cleaning]") {
    std::vector<ScreenRow> rows;
    for (int i = 0; i < 20; ++i) {
        rows.push_back(ScreenRow{10.0 + i % 5, 3.0 + i % 3});
    }
    const auto result = clean(rows, CleaningPolicy{3.0, 1.5, {"a", "b"}});
    CHECK(result.kept.size() == rows.size());
    CHECK(result.report.removed_outliers == 0);
}

TEST_CASE("missing values are removed before screening", "[cleaning]") {
    std::vector<ScreenRow> rows;
    for (int i = 0; i < 20; ++i) {
        rows.push_back(ScreenRow{10.0 + i % 5, 3.0 + i % 3});
    }
    rows[3][1] = std::nullopt;
    rows[7][0] = std::numeric_limits<double>::quiet_NaN();
    const auto result = clean(rows, CleaningPolicy{3.0, 1.5, {"priority_fee", "gas_price"}});
    CHECK(result.report.removed_missing == 2);
    CHECK(result.kept.size() == 18);
    CHECK(std::find(result.kept.begin(), result.kept.end(), 3u) == result.kept.end());

    std::vector<ScreenRow> flat(10, ScreenRow{1.0});
    CHECK(test::error_code([&] { (void)clean(flat, CleaningPolicy{3.0, 1.5, {"x"}}); }) == Errc::kDegenerateDistribution);
}

TEST_CASE("clean is idempotent", "[cleaning][property]") {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ScreenRow> rows;
        const std::size_t n = 30 + rng.below(300);
        for (std::size_t i = 0; i < n; ++i) {
            const double heavy = std::exp(rng.normal() * 1.2);
            rows.push_back(ScreenRow{heavy, 5.0 + rng.normal()});
        }
        const CleaningPolicy policy{3.0, 1.5, {"a", "b"}};
        const auto first = clean(rows, policy);
        std::vector<ScreenRow> kept;
        for (const auto i : first.kept) {
            kept.push_back(rows[i]);
        }
        const auto second = clean(kept, policy);
        CHECK(second.kept.size() == kept.size());
        CHECK(second.report.removed_outliers == 0);
    }
}

TEST_CASE("build_feature_rows on a three-block fixture", "[dataset]") {
    const ChainData d = three_block_fixture();
    const FeatureConfig config = permissive_config();
    const Dataset ds = build_dataset(d, config);
    CHECK(ds.input_rows == 5);
    CHECK(ds.warmup_rows == 0);
    REQUIRE(ds.train.size() == 5);
    CHECK(ds.test.empty());
    for (const auto& row : ds.train) {
        CHECK(row.features.size() == ds.config.names.size());
        CHECK(row.features.size() == ds.config.means.size());
    }
    CHECK(ds.config.names.size() + ds.config.dropped.size() == config.candidate_names().size());
    // every block is 12 s after its parent, so that column carries no information
    CHECK(std::find(ds.config.dropped.begin(), ds.config.dropped.end(), "seconds_since_prev_block") !=
          ds.config.dropped.end());
    CHECK(ds.train[0].priority_fee == Approx(21'000 * 1.0));
}

TEST_CASE("build_feature_rows errors", "[dataset]") {
    ChainData d = three_block_fixture();
    std::erase_if(d.slots, [](const SlotRecord& s) { return s.block_number == 102u; });
    CHECK(test::error_code([&] { (void)build_dataset(d, permissive_config()); }) == Errc::kUnmappedBlock);

    ChainData no_header = three_block_fixture();
    std::vector<FeeBreakdown> fees;
    for (const auto& tx : no_header.txs) {
        fees.push_back(derive_fees(tx, no_header.headers[tx.block_number - 100]));
    }
    no_header.headers.pop_back();
    CHECK(test::error_code([&] { (void)build_feature_rows(fees, no_header.headers, no_header.slots, permissive_config()); }) ==
          Errc::kUnknownBlock);

    FeatureConfig bad = permissive_config();
    bad.train_fraction = 0.0;
    CHECK(test::error_code([&] { (void)build_dataset(three_block_fixture(), bad); }) == Errc::kInvalidConfig);
}

TEST_CASE("lag warm-up rows are excluded", "[dataset]") {
    SynthFeeConfig sc;
    sc.n_txs = 600;
    const auto series = gen_fee_series(sc);
    FeatureConfig config;
    config.lag_windows = {10, 50};
    config.baseline_window = 50;
    const Dataset ds = build_dataset(series.chain, config);
    CHECK(ds.warmup_rows == 50);
    CHECK(ds.input_rows == series.chain.txs.size());
    CHECK(ds.boundary_index == 50 + static_cast<std::size_t>(std::floor(0.8 * (ds.input_rows - 50))));
    for (const auto& row : ds.train) {
        CHECK(std::isfinite(row.est_txn_fee));
    }
    std::vector<Hash32> warm;
    for (const auto& row : ds.train) {
        warm.push_back(row.tx_hash);
    }
    // first 50 transactions chronologically never appear
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(std::find(warm.begin(), warm.end(), series.chain.txs[i].tx_hash) == warm.end());
    }
}

TEST_CASE("dataset invariants on synthetic data", "[dataset][property]") {
    SynthFeeConfig sc;
    sc.n_txs = 4000;
    const auto series = gen_fee_series(sc);
    const Dataset ds = build_dataset(series.chain, FeatureConfig{});
    REQUIRE(!ds.train.empty());
    REQUIRE(!ds.test.empty());

    SECTION("fee identities hold on every row") {
        for (const auto* part : {&ds.train, &ds.test}) {
            for (const auto& row : *part) {
                CHECK(row.base_fee_wei + row.priority_fee_wei == row.txn_fee_wei);
            }
        }
    }
    SECTION("temporal split") {
        CHECK(ds.train.back().block_number <= ds.test.front().block_number);
        CHECK(std::is_sorted(ds.train.begin(), ds.train.end(),
                             [](const FeatureRow& a, const FeatureRow& b) { return a.block_number < b.block_number; }));
    }
    SECTION("standardization statistics come from the training partition") {
        for (std::size_t c = 0; c < ds.config.names.size(); ++c) {
            std::vector<double> col;
            for (const auto& row : ds.train) {
                col.push_back(row.features[c]);
            }
            CHECK(std::abs(mean(col)) < 1e-9);
            CHECK(population_stddev(col) == Approx(1.0).epsilon(1e-9));
        }
    }
    SECTION("cleaning thresholds come from the training partition") {
        const auto& attrs = ds.config.cleaning.attributes;
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            std::vector<double> col;
            for (const auto& row : ds.train) {
                if (attrs[a] == "base_fee") {
                    col.push_back(row.base_fee);
                } else if (attrs[a] == "priority_fee") {
                    col.push_back(row.priority_fee);
                } else if (attrs[a] == "txn_fee") {
                    col.push_back(row.txn_fee);
                }
            }
            if (col.empty()) {
                continue;
            }
            CHECK(ds.cleaning_stats.columns[a].mean == Approx(mean(col)).epsilon(1e-12));
            CHECK(ds.cleaning_stats.columns[a].stddev == Approx(population_stddev(col)).epsilon(1e-12));
            CHECK(ds.cleaning_stats.columns[a].q50 == Approx(percentile(col, 0.5)).epsilon(1e-12));
            for (const auto& row : ds.test) {
                const double v = attrs[a] == "base_fee" ? row.base_fee
                                 : attrs[a] == "priority_fee" ? row.priority_fee
                                                              : row.txn_fee;
                const auto& s = ds.cleaning_stats.columns[a];
                const double iqr = s.q75 - s.q25;
                CHECK(std::abs(v - s.mean) / s.stddev <= ds.config.cleaning.z_threshold);
                CHECK(v >= s.q25 - ds.config.cleaning.iqr_fence_multiplier * iqr);
                CHECK(v <= s.q75 + ds.config.cleaning.iqr_fence_multiplier * iqr);
            }
        }
    }
    SECTION("CSV round trip") {
        test::TempDir tmp;
        write_dataset(tmp.path(), ds);
        const Dataset back = read_dataset(tmp.path());
        CHECK(back.config.names == ds.config.names);
        CHECK(back.config.means == ds.config.means);
        CHECK(back.config.stds == ds.config.stds);
        CHECK(back.train == ds.train);
        CHECK(back.test == ds.test);
        CHECK(back.boundary_block == ds.boundary_block);
        test::TempDir again;
        write_dataset(again.path(), back);
        CHECK(test::read_text(tmp.path() / std::string(kDatasetCsv)) ==
              test::read_text(again.path() / std::string(kDatasetCsv)));
        CHECK(test::read_text(tmp.path() / std::string(kFeaturesJson)) ==
              test::read_text(again.path() / std::string(kFeaturesJson)));
    }
}
