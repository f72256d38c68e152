// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>
#include <httplib.h>

#include <atomic>
#include <map>
#include <nlohmann/json.hpp>
#include <thread>

#include "ethmerge/chain.hpp"
#include "ethmerge/ingest.hpp"
#include "ethmerge/sources.hpp"
#include "ethmerge/synth.hpp"
#include "test_support.hpp"

using namespace ethmerge;
using ethmerge::test::TempDir;
using nlohmann::json;

namespace {

ChainData small_chain() {
    ChainData d;
    d.headers = test::linked_headers(100, 3);
    d.txs = {test::make_tx(100, 1, 21'000, 12'000'000'000ULL), test::make_tx(100, 2, 50'000, 11'000'000'000ULL),
             test::make_tx(101, 3, 21'000, 10'500'000'000ULL), test::make_tx(102, 4, 65'000, 13'000'000'000ULL),
             test::make_tx(102, 5, 30'000, 10'000'000'000ULL)};
    d.slots = test::slots_for(d.headers, 5, 2);
    return d;
}

RetryPolicy fast_retry() {
    RetryPolicy p;
    p.initial_backoff = std::chrono::milliseconds(1);
    return p;
}

//! Serves a chain over JSON-RPC and the Beacon API. The first `fail_first` requests get 503.
class MockNode {
  public:
    MockNode(ChainData data, int fail_first = 0) : data_(std::move(data)), fail_left_(fail_first) {
        server_.Post("/", [this](const httplib::Request& req, httplib::Response& res) { rpc(req, res); });
        server_.Get(R"(/eth/v1/beacon/headers/(\w+))",
                    [this](const httplib::Request& req, httplib::Response& res) { beacon_header(req, res); });
        server_.Get(R"(/eth/v2/beacon/blocks/(\d+))",
                    [this](const httplib::Request& req, httplib::Response& res) { beacon_block(req, res); });
        server_.Get(R"(/eth/v1/beacon/states/(\d+)/validators)",
                    [](const httplib::Request&, httplib::Response& res) {
                        res.set_content(json{{"data", json::array({json::object(), json::object(), json::object()})}}.dump(),
                                        "application/json");
                    });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockNode() {
        server_.stop();
        thread_.join();
    }

    [[nodiscard]] std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    [[nodiscard]] int requests() const { return requests_.load(); }
    //! Drops gasUsed from receipts.
    void break_receipts() { break_receipts_ = true; }

  private:
    bool take_failure(httplib::Response& res) {
        ++requests_;
        if (fail_left_ > 0) {
            --fail_left_;
            res.status = 503;
            return true;
        }
        return false;
    }

    void rpc(const httplib::Request& req, httplib::Response& res) {
        if (take_failure(res)) {
            return;
        }
        const json call = json::parse(req.body);
        json result = nullptr;
        if (call["method"] == "eth_getBlockByNumber") {
            const uint64_t n = *parse_hex_u64(call["params"][0].get<std::string>());
            for (const auto& h : data_.headers) {
                if (h.number != n) {
                    continue;
                }
                json txs = json::array();
                for (const auto& tx : data_.txs) {
                    if (tx.block_number == n) {
                        txs.push_back(tx.tx_hash.to_hex());
                    }
                }
                result = json{{"number", to_hex_quantity(h.number)},
                              {"hash", h.hash.to_hex()},
                              {"parentHash", h.parent_hash.to_hex()},
                              {"miner", h.producer.to_hex()},
                              {"timestamp", to_hex_quantity(h.timestamp)},
                              {"gasUsed", to_hex_quantity(h.gas_used)},
                              {"gasLimit", to_hex_quantity(h.gas_limit)},
                              {"baseFeePerGas", "0x" + h.base_fee_per_gas.str(0, std::ios_base::hex)},
                              {"transactions", txs}};
            }
        } else if (call["method"] == "eth_getTransactionReceipt") {
            const std::string hash = call["params"][0];
            for (const auto& tx : data_.txs) {
                if (tx.tx_hash.to_hex() == hash) {
                    result = json{{"transactionHash", hash},
                                  {"blockNumber", to_hex_quantity(tx.block_number)},
                                  {"effectiveGasPrice", "0x" + tx.gas_price.str(0, std::ios_base::hex)}};
                    if (!break_receipts_) {
                        result["gasUsed"] = to_hex_quantity(tx.gas_used);
                    }
                }
            }
        }
        res.set_content(json{{"jsonrpc", "2.0"}, {"id", call["id"]}, {"result", result}}.dump(), "application/json");
    }

    const SlotRecord* find_slot(uint64_t slot) const {
        for (const auto& s : data_.slots) {
            if (s.slot == slot) {
                return &s;
            }
        }
        return nullptr;
    }

    void beacon_header(const httplib::Request& req, httplib::Response& res) {
        if (take_failure(res)) {
            return;
        }
        const std::string id = req.matches[1];
        const SlotRecord* s = id == "head" ? &data_.slots.back() : find_slot(std::stoull(id));
        if (s == nullptr) {
            res.status = 404;
            return;
        }
        json message{{"slot", std::to_string(s->slot)}, {"proposer_index", std::to_string(s->proposer_index)}};
        res.set_content(json{{"data", {{"header", {{"message", message}}}}}}.dump(), "application/json");
    }

    void beacon_block(const httplib::Request& req, httplib::Response& res) {
        if (take_failure(res)) {
            return;
        }
        const SlotRecord* s = find_slot(std::stoull(std::string(req.matches[1])));
        if (s == nullptr || !s->block_number) {
            res.status = 404;
            return;
        }
        json body{{"execution_payload", {{"block_number", std::to_string(*s->block_number)},
                                         {"block_hash", test::tagged_hash(*s->block_number, 1).to_hex()}}},
                  {"attestations", json::array({json{{"aggregation_bits", "0xff01"}}, json{{"aggregation_bits", "0x03"}}})}};
        res.set_content(json{{"data", {{"message", {{"body", body}}}}}}.dump(), "application/json");
    }

    ChainData data_;
    std::atomic<int> fail_left_;
    std::atomic<int> requests_{0};
    bool break_receipts_{false};
    httplib::Server server_;
    int port_{0};
    std::thread thread_;
};

}  // namespace

TEST_CASE("jsonl codecs round-trip with decimal strings", "[chain]") {
    const ChainData d = small_chain();
    for (const auto& h : d.headers) {
        CHECK(parse_header_line(to_jsonl(h)) == h);
    }
    for (const auto& tx : d.txs) {
        CHECK(parse_tx_line(to_jsonl(tx)) == tx);
    }
    for (const auto& s : d.slots) {
        CHECK(parse_slot_line(to_jsonl(s)) == s);
    }
    BlockHeader big = d.headers.front();
    big.base_fee_per_gas = *parse_decimal_wei("340282366920938463463374607431768211457");
    const std::string line = to_jsonl(big);
    CHECK(line.find("\"340282366920938463463374607431768211457\"") != std::string::npos);
    CHECK(parse_header_line(line) == big);
}

TEST_CASE("malformed fixture lines are rejected", "[chain]") {
    const std::string tx = to_jsonl(test::make_tx(100, 1, 21'000, 1));
    json j = json::parse(tx);
    j.erase("gas_used");
    CHECK_THROWS_MATCHES(parse_tx_line(j.dump()), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == Errc::kMalformedResponse; }));
    j = json::parse(tx);
    j["gas_used"] = "12x";
    CHECK_THROWS_AS(parse_tx_line(j.dump()), Error);
    CHECK_THROWS_AS(parse_header_line("{not json"), Error);
    json h = json::parse(to_jsonl(test::linked_headers(1, 1).front()));
    h["gas_used"] = "40000000";  // above gas_limit
    CHECK_THROWS_AS(parse_header_line(h.dump()), Error);
}

TEST_CASE("fetch_headers over a fixture", "[chain]") {
    ChainData d;
    d.headers = test::linked_headers(100, 3);
    FixtureSource full(d);
    SECTION("inverted range") {
        try {
            fetch_headers({5, 4}, full);
            FAIL("expected InvalidRange");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::kInvalidRange);
        }
    }
    SECTION("contiguous fixture") {
        const auto headers = fetch_headers({100, 102}, full);
        REQUIRE(headers.size() == 3);
        CHECK(headers[0].number == 100);
        CHECK(headers[1].number == 101);
        CHECK(headers[2].number == 102);
        CHECK_NOTHROW(verify_header_chain(headers));
    }
    SECTION("gap") {
        ChainData holey = d;
        holey.headers.erase(holey.headers.begin() + 1);
        FixtureSource src(holey);
        try {
            fetch_headers({100, 102}, src);
            FAIL("expected GapDetected");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::kGapDetected);
            REQUIRE(e.gaps().size() == 1);
            CHECK(e.gaps()[0] == BlockRange{101, 101});
        }
    }
}

TEST_CASE("fetch_block_transactions over a fixture", "[chain]") {
    ChainData d;
    d.headers = test::linked_headers(100, 2);
    d.txs = {test::make_tx(100, 1, 21'000, 11'000'000'000ULL), test::make_tx(100, 2, 50'000, 12'000'000'000ULL)};
    FixtureSource src(d);
    const auto txs = fetch_block_transactions(100, src);
    REQUIRE(txs.size() == 2);
    CHECK(txs[0].gas_used == 21'000);
    CHECK(txs[1].gas_used == 50'000);
    CHECK(fetch_block_transactions(101, src).empty());
    try {
        fetch_block_transactions(555, src);
        FAIL("expected UnknownBlock");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kUnknownBlock);
    }
}

TEST_CASE("fetch_slot_record over a fixture", "[chain]") {
    ChainData d;
    d.slots = {SlotRecord{6, 1, std::nullopt, 0, 10}, SlotRecord{7, 2, 104, 30, 10}, SlotRecord{8, 3, 105, 30, 10}};
    FixtureSource src(d);
    CHECK(fetch_slot_record(6, src).missed());
    const SlotRecord s7 = fetch_slot_record(7, src);
    CHECK(s7.slot == 7);
    CHECK(s7.block_number == 104u);
    try {
        fetch_slot_record(9, src);
        FAIL("expected SlotOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kSlotOutOfRange);
    }
}

TEST_CASE("header chain and slot monotonicity checks", "[chain]") {
    auto headers = test::linked_headers(10, 5);
    CHECK_NOTHROW(verify_header_chain(headers));
    headers[3].parent_hash = test::tagged_hash(999);
    CHECK_THROWS_AS(verify_header_chain(headers), Error);

    const auto chain = gen_producer_sequence(SynthChainConfig{.n_blocks = 2000, .missed_slot_rate = 0.3, .seed = 11});
    CHECK_NOTHROW(verify_slot_monotonicity(chain.slots));
    auto bad = chain.slots;
    std::swap(bad[10].block_number, bad[20].block_number);
    if (bad[10].block_number != bad[20].block_number) {
        CHECK_THROWS_AS(verify_slot_monotonicity(bad), Error);
    }
}

TEST_CASE("ingest persists a range and is idempotent", "[ingest]") {
    TempDir tmp;
    const ChainData d = small_chain();
    FixtureSource src(d);
    IngestSources sources{&src, &src, 5};
    const IngestSummary first = ingest({100, 102}, sources, tmp.path(), fast_retry());
    CHECK(first.blocks_fetched == 3);
    CHECK(first.txs_fetched == 5);
    CHECK(first.slots_fetched == 4);  // 3 proposed plus one missed between them
    CHECK(first.gaps.empty());

    const auto dir = range_dir(tmp.path(), {100, 102});
    std::map<std::string, std::string> before;
    for (const std::string_view name : {kHeadersFile, kTxsFile, kSlotsFile, kSummaryFile}) {
        before[std::string(name)] = test::read_text(dir / std::string(name));
    }
    const IngestSummary second = ingest({100, 102}, sources, tmp.path(), fast_retry());
    CHECK(second.blocks_fetched == 0);
    CHECK(second.txs_fetched == 0);
    CHECK(second.slots_fetched == 0);
    for (const auto& [name, text] : before) {
        CHECK(test::read_text(dir / name) == text);
    }

    const ChainData loaded = load_chain_data(tmp.path());
    CHECK(loaded.headers == d.headers);
    CHECK(loaded.txs == d.txs);
    CHECK(loaded.slots.size() == 4);
}

TEST_CASE("two ingests of the same fixture are byte-identical", "[ingest]") {
    TempDir a;
    TempDir b;
    const ChainData d = small_chain();
    FixtureSource src(d);
    IngestSources sources{&src, &src, 5};
    ingest({100, 102}, sources, a.path(), fast_retry());
    ingest({100, 102}, sources, b.path(), fast_retry());
    for (const std::string_view name : {kHeadersFile, kTxsFile, kSlotsFile, kSummaryFile}) {
        CHECK(test::read_text(range_dir(a.path(), {100, 102}) / std::string(name)) ==
              test::read_text(range_dir(b.path(), {100, 102}) / std::string(name)));
    }
}

TEST_CASE("ingest records gaps in the summary", "[ingest]") {
    TempDir tmp;
    ChainData d = small_chain();
    d.headers.erase(d.headers.begin() + 1);
    std::erase_if(d.txs, [](const TxRecord& tx) { return tx.block_number == 101; });
    FixtureSource src(d);
    const IngestSummary s = ingest({100, 102}, IngestSources{&src, nullptr, 0}, tmp.path(), fast_retry());
    CHECK(s.blocks_fetched == 2);
    REQUIRE(s.gaps.size() == 1);
    CHECK(s.gaps[0] == BlockRange{101, 101});
    CHECK(parse_ingest_summary(to_json(s)) == s);
}

TEST_CASE("unreachable endpoint exhausts three attempts", "[ingest][http]") {
    TempDir tmp;
    RpcExecutionSource dead("http://127.0.0.1:1", std::chrono::milliseconds(500));
    IngestSummary summary;
    try {
        ingest({1, 1}, IngestSources{&dead, nullptr, 0}, tmp.path(), fast_retry(), &summary);
        FAIL("expected EndpointUnreachable");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kEndpointUnreachable);
    }
    CHECK(summary.retries == 3);
}

TEST_CASE("JSON-RPC and Beacon API sources against a mock node", "[http]") {
    const ChainData d = small_chain();
    SECTION("headers, receipts and slots decode") {
        MockNode node(d);
        RpcExecutionSource rpc(node.url());
        BeaconApiSource beacon(node.url());
        const auto h = rpc.header(101);
        REQUIRE(h);
        CHECK(*h == d.headers[1]);
        CHECK_FALSE(rpc.header(999));
        const auto txs = rpc.block_transactions(100);
        REQUIRE(txs.size() == 2);
        CHECK(txs[0].tx_hash == d.txs[0].tx_hash);
        CHECK(txs[0].gas_price == d.txs[0].gas_price);
        CHECK(txs[1].gas_used == 50'000);

        CHECK(beacon.head_slot() == d.slots.back().slot);
        const SlotRecord s = beacon.slot(d.slots.front().slot);
        CHECK(s.block_number == d.slots.front().block_number);
        CHECK(s.total_votes == 8 + 1);  // 0xff01 carries 8 votes, 0x03 one
        CHECK(s.active_validators == 3);
        CHECK(beacon.slot(d.slots[2].slot).missed());
        CHECK_THROWS_AS(beacon.slot(d.slots.back().slot + 1), Error);
    }
    SECTION("transient 503s are retried") {
        MockNode node(d, 2);
        RpcExecutionSource rpc(node.url());
        uint64_t failures = 0;
        const auto headers = fetch_headers({100, 102}, rpc, FetchOptions{fast_retry(), &failures});
        CHECK(headers.size() == 3);
        CHECK(failures == 2);
    }
    SECTION("receipt without gasUsed is malformed") {
        MockNode node(d);
        node.break_receipts();
        RpcExecutionSource rpc(node.url());
        try {
            rpc.block_transactions(100);
            FAIL("expected MalformedResponse");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::kMalformedResponse);
        }
    }
    SECTION("ingest through HTTP matches the fixture ingest") {
        MockNode node(d);
        RpcExecutionSource rpc(node.url());
        BeaconApiSource beacon(node.url());
        TempDir http_store;
        TempDir fixture_store;
        FixtureSource src(d);
        const auto a = ingest({100, 102}, IngestSources{&rpc, &beacon, 5}, http_store.path(), fast_retry());
        const auto b = ingest({100, 102}, IngestSources{&src, &src, 5}, fixture_store.path(), fast_retry());
        CHECK(a.blocks_fetched == b.blocks_fetched);
        CHECK(a.txs_fetched == b.txs_fetched);
        CHECK(test::read_text(range_dir(http_store.path(), {100, 102}) / std::string(kHeadersFile)) ==
              test::read_text(range_dir(fixture_store.path(), {100, 102}) / std::string(kHeadersFile)));
        CHECK(test::read_text(range_dir(http_store.path(), {100, 102}) / std::string(kTxsFile)) ==
              test::read_text(range_dir(fixture_store.path(), {100, 102}) / std::string(kTxsFile)));
    }
}
