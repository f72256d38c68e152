// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <bit>
#include <cmath>

#include "ethmerge/rng.hpp"
#include "ethmerge/slot_map.hpp"
#include "ethmerge/sources.hpp"
#include "ethmerge/synth.hpp"
#include "test_support.hpp"

using namespace ethmerge;

namespace {

std::vector<std::optional<uint64_t>> example_table() {
    return {100, 101, std::nullopt, 102, 103, std::nullopt, std::nullopt, 104, 105, 106};
}

//! Counts resolver lookups.
class CountingResolver final : public SlotResolver {
  public:
    explicit CountingResolver(const SlotResolver& inner) : inner_(inner) {}
    [[nodiscard]] uint64_t head() const override { return inner_.head(); }
    [[nodiscard]] SlotLookup lookup(uint64_t slot) const override {
        ++calls_;
        return inner_.lookup(slot);
    }
    [[nodiscard]] std::size_t calls() const { return calls_; }
    void reset() { calls_ = 0; }

  private:
    const SlotResolver& inner_;
    mutable std::size_t calls_{0};
};

//! Random table: strictly increasing block numbers with missed slots at `miss_rate`.
std::vector<std::optional<uint64_t>> random_table(Rng& rng, std::size_t n, double miss_rate, uint64_t first_block) {
    std::vector<std::optional<uint64_t>> t(n);
    uint64_t next = first_block;
    for (auto& s : t) {
        if (rng.uniform() >= miss_rate) {
            s = next++;
        }
    }
    return t;
}

std::size_t longest_missed_run(const std::vector<std::optional<uint64_t>>& t) {
    std::size_t best = 0;
    std::size_t run = 0;
    for (const auto& s : t) {
        run = s ? 0 : run + 1;
        best = std::max(best, run);
    }
    return best;
}

}  // namespace

TEST_CASE("bsmap examples", "[slot_map]") {
    const TableResolver r(example_table());
    CHECK(r.head() == 9);
    CHECK(bsmap(9, 104, r) == 7u);
    CHECK(bsmap(9, 100, r) == 0u);
    CHECK(bsmap(9, 102, r) == 3u);
    CHECK(bsmap(9, 106, r) == 9u);
    CHECK_FALSE(bsmap(9, 999, r));
    CHECK_FALSE(bsmap(9, 99, r));
}

TEST_CASE("resolver walks back over missed slots", "[slot_map]") {
    const TableResolver r(example_table());
    CHECK(r.resolve_block_number(2) == 101u);
    CHECK_FALSE(r.lookup(2).proposed);
    CHECK(r.resolve_block_number(6) == 103u);
    CHECK(r.lookup(7).proposed);
    CHECK_THROWS_AS(r.lookup(10), Error);

    const TableResolver leading({std::nullopt, 50, 51});
    CHECK_FALSE(leading.resolve_block_number(0));
    CHECK_FALSE(leading.lookup(0).proposed);
}

TEST_CASE("table built from records", "[slot_map]") {
    const auto headers = test::linked_headers(200, 6);
    const auto records = test::slots_for(headers, 40, 3);
    const TableResolver r = TableResolver::from_records(records);
    CHECK(r.first_slot() == 40);
    CHECK(r.head() == records.back().slot);
    for (const auto& rec : records) {
        if (rec.block_number) {
            CHECK(bsmap(r.head(), *rec.block_number, r, r.first_slot()) == rec.slot);
        }
    }
    auto bad = records;
    std::swap(bad[0].block_number, bad[1].block_number);
    CHECK_THROWS_AS(TableResolver::from_records(bad), Error);
}

TEST_CASE("source resolver over a fixture matches the table", "[slot_map]") {
    const auto chain = gen_producer_sequence(SynthChainConfig{.n_blocks = 300, .missed_slot_rate = 0.2, .seed = 3});
    ChainData d;
    d.headers = chain.headers;
    d.slots = chain.slots;
    FixtureSource src(d);
    const SourceResolver remote(src);
    const TableResolver table = TableResolver::from_records(chain.slots);
    for (const auto& h : chain.headers) {
        CHECK(bsmap(remote.head(), h.number, remote) == bsmap(table.head(), h.number, table));
    }
    CHECK_FALSE(remote.fetched().empty());
}

TEST_CASE("bsmap agrees with a linear scan and respects the query bound", "[slot_map][property]") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(400);
        const double miss = rng.uniform() * 0.6;
        const auto table = random_table(rng, n, miss, 1000 + rng.below(1000));
        const TableResolver inner(table);
        CountingResolver r(inner);
        const uint64_t head = n - 1;
        const double bound =
            std::ceil(std::log2(static_cast<double>(head) + 1.0)) + static_cast<double>(longest_missed_run(table)) + 1.0;
        for (int q = 0; q < 20; ++q) {
            const uint64_t block = 990 + rng.below(static_cast<uint64_t>(n) + 1020);
            std::optional<uint64_t> expected;
            for (std::size_t s = 0; s < table.size(); ++s) {
                if (table[s] == block) {
                    expected = s;
                }
            }
            r.reset();
            CHECK(bsmap(head, block, r) == expected);
            CHECK(static_cast<double>(r.calls()) <= bound);
        }
    }
}
