// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/sources.hpp"

#include <bit>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace ethmerge {

using nlohmann::json;

void retry_sleep(std::chrono::milliseconds delay) {
    if (delay.count() > 0) {
        std::this_thread::sleep_for(delay);
    }
}

std::vector<BlockRange> to_ranges(const std::vector<uint64_t>& numbers) {
    std::vector<BlockRange> out;
    for (const uint64_t n : numbers) {
        if (!out.empty() && out.back().last + 1 == n) {
            out.back().last = n;
        } else {
            out.push_back({n, n});
        }
    }
    return out;
}

HeaderScan scan_headers(BlockRange range, ExecutionSource& source, const FetchOptions& options) {
    if (range.first > range.last) {
        fail(Errc::kInvalidRange, "inverted range [" + std::to_string(range.first) + "," +
                                      std::to_string(range.last) + "]");
    }
    uint64_t scratch = 0;
    uint64_t& failures = options.failed_attempts ? *options.failed_attempts : scratch;
    HeaderScan scan;
    std::vector<uint64_t> missing;
    for (uint64_t n = range.first;; ++n) {
        auto h = with_retries(options.retry, failures, [&] { return source.header(n); });
        if (!h) {
            missing.push_back(n);
        } else if (h->number != n) {
            fail(Errc::kMalformedResponse, "asked for block " + std::to_string(n) + ", got " +
                                               std::to_string(h->number));
        } else {
            scan.headers.push_back(std::move(*h));
        }
        if (n == range.last) {
            break;
        }
    }
    scan.gaps = to_ranges(missing);
    return scan;
}

std::vector<BlockHeader> fetch_headers(BlockRange range, ExecutionSource& source, const FetchOptions& options) {
    HeaderScan scan = scan_headers(range, source, options);
    if (!scan.gaps.empty()) {
        std::string message = "missing blocks:";
        for (const auto& g : scan.gaps) {
            message += " [" + std::to_string(g.first) + "," + std::to_string(g.last) + "]";
        }
        throw Error(Errc::kGapDetected, message, std::move(scan.gaps));
    }
    return std::move(scan.headers);
}

std::vector<TxRecord> fetch_block_transactions(uint64_t block_number, ExecutionSource& source,
                                               const FetchOptions& options) {
    uint64_t scratch = 0;
    uint64_t& failures = options.failed_attempts ? *options.failed_attempts : scratch;
    return with_retries(options.retry, failures, [&] { return source.block_transactions(block_number); });
}

SlotRecord fetch_slot_record(uint64_t slot, ConsensusSource& source, const FetchOptions& options) {
    uint64_t scratch = 0;
    uint64_t& failures = options.failed_attempts ? *options.failed_attempts : scratch;
    return with_retries(options.retry, failures, [&] { return source.slot(slot); });
}

// ---- fixture --------------------------------------------------------------------------------

FixtureSource::FixtureSource(const std::filesystem::path& dir) : FixtureSource(load_chain_data(dir)) {}

FixtureSource::FixtureSource(ChainData data) {
    for (auto& h : data.headers) {
        const uint64_t n = h.number;
        headers_.emplace(n, std::move(h));
    }
    for (auto& tx : data.txs) {
        txs_[tx.block_number].push_back(std::move(tx));
    }
    for (auto& s : data.slots) {
        const uint64_t slot = s.slot;
        slots_.emplace(slot, std::move(s));
    }
}

std::optional<BlockHeader> FixtureSource::header(uint64_t number) {
    const auto it = headers_.find(number);
    if (it == headers_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<TxRecord> FixtureSource::block_transactions(uint64_t number) {
    if (!headers_.contains(number)) {
        fail(Errc::kUnknownBlock, "block " + std::to_string(number) + " not in fixture");
    }
    const auto it = txs_.find(number);
    return it == txs_.end() ? std::vector<TxRecord>{} : it->second;
}

uint64_t FixtureSource::head_slot() {
    if (slots_.empty()) {
        fail(Errc::kSlotOutOfRange, "fixture has no slots");
    }
    return slots_.rbegin()->first;
}

SlotRecord FixtureSource::slot(uint64_t slot) {
    if (slots_.empty() || slot > slots_.rbegin()->first) {
        fail(Errc::kSlotOutOfRange, "slot " + std::to_string(slot) + " beyond fixture head");
    }
    const auto it = slots_.find(slot);
    if (it == slots_.end()) {
        SlotRecord missed;
        missed.slot = slot;
        return missed;
    }
    return it->second;
}

// ---- HTTP plumbing --------------------------------------------------------------------------

namespace {

    struct Endpoint {
        std::string scheme_host_port;
        std::string base_path;
    };

    Endpoint split_url(const std::string& url) {
        const auto scheme_end = url.find("://");
        const auto host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
        const auto path_begin = url.find('/', host_begin);
        if (path_begin == std::string::npos) {
            return {url, ""};
        }
        std::string path = url.substr(path_begin);
        while (!path.empty() && path.back() == '/') {
            path.pop_back();
        }
        return {url.substr(0, path_begin), path};
    }

    [[noreturn]] void bad_field(const char* key) {
        fail(Errc::kMalformedResponse, std::string("response field '") + key + "' missing or malformed");
    }

    const std::string& str_at(const json& j, const char* key) {
        if (!j.is_object()) {
            bad_field(key);
        }
        const auto it = j.find(key);
        if (it == j.end() || !it->is_string()) {
            bad_field(key);
        }
        return it->get_ref<const std::string&>();
    }

    uint64_t hex_u64_at(const json& j, const char* key) {
        const auto v = parse_hex_u64(str_at(j, key));
        if (!v) bad_field(key);
        return *v;
    }

    Wei hex_wei_at(const json& j, const char* key) {
        const auto v = parse_hex_wei(str_at(j, key));
        if (!v) bad_field(key);
        return *v;
    }

    uint64_t dec_u64_at(const json& j, const char* key) {
        const auto v = parse_decimal_u64(str_at(j, key));
        if (!v) bad_field(key);
        return *v;
    }

    template <class Bytes>
    Bytes bytes_at(const json& j, const char* key) {
        const auto v = Bytes::from_hex(str_at(j, key));
        if (!v) bad_field(key);
        return *v;
    }

    const json& object_at(const json& j, const char* key) {
        if (!j.is_object()) bad_field(key);
        const auto it = j.find(key);
        if (it == j.end() || !it->is_object()) bad_field(key);
        return *it;
    }

    json parse_body(const std::string& body) {
        json j = json::parse(body, nullptr, false);
        if (j.is_discarded()) {
            fail(Errc::kMalformedResponse, "response is not JSON");
        }
        return j;
    }

    uint64_t count_aggregation_bits(const std::string& hex) {
        std::string_view digits = hex;
        if (digits.starts_with("0x")) digits.remove_prefix(2);
        uint64_t bits = 0;
        for (const char c : digits) {
            const int d = detail::hex_digit(c);
            if (d < 0) {
                fail(Errc::kMalformedResponse, "bad aggregation_bits");
            }
            bits += static_cast<uint64_t>(std::popcount(static_cast<unsigned>(d)));
        }
        // SSZ bitlists carry one length-delimiter bit
        return bits > 0 ? bits - 1 : 0;
    }

}  // namespace

struct RpcExecutionSource::Impl {
    Impl(const std::string& url, std::chrono::milliseconds timeout) : endpoint(split_url(url)), client(endpoint.scheme_host_port) {
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
    }

    json call(const std::string& method, json params) {
        std::lock_guard lock(mutex);
        json request = {{"jsonrpc", "2.0"}, {"id", ++next_id}, {"method", method}, {"params", std::move(params)}};
        const std::string path = endpoint.base_path.empty() ? "/" : endpoint.base_path;
        auto res = client.Post(path, request.dump(), "application/json");
        if (!res) {
            fail(Errc::kEndpointUnreachable, method + ": " + httplib::to_string(res.error()));
        }
        if (res->status >= 500 || res->status == 429) {
            fail(Errc::kEndpointUnreachable, method + ": HTTP " + std::to_string(res->status));
        }
        if (res->status != 200) {
            fail(Errc::kMalformedResponse, method + ": HTTP " + std::to_string(res->status));
        }
        json reply = parse_body(res->body);
        if (!reply.is_object()) {
            fail(Errc::kMalformedResponse, method + ": reply is not an object");
        }
        if (reply.contains("error")) {
            fail(Errc::kMalformedResponse, method + ": " + reply["error"].dump());
        }
        if (!reply.contains("result")) {
            fail(Errc::kMalformedResponse, method + ": no result");
        }
        return reply["result"];
    }

    Endpoint endpoint;
    httplib::Client client;
    std::mutex mutex;
    int64_t next_id{0};
};

RpcExecutionSource::RpcExecutionSource(std::string url, std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(url, timeout)) {}

RpcExecutionSource::~RpcExecutionSource() = default;

std::optional<BlockHeader> RpcExecutionSource::header(uint64_t number) {
    const json block = impl_->call("eth_getBlockByNumber", json::array({to_hex_quantity(number), false}));
    if (block.is_null()) {
        return std::nullopt;
    }
    BlockHeader h;
    h.number = hex_u64_at(block, "number");
    h.hash = bytes_at<Hash32>(block, "hash");
    h.parent_hash = bytes_at<Hash32>(block, "parentHash");
    h.producer = bytes_at<Address>(block, "miner");
    h.timestamp = hex_u64_at(block, "timestamp");
    h.gas_used = hex_u64_at(block, "gasUsed");
    h.gas_limit = hex_u64_at(block, "gasLimit");
    h.base_fee_per_gas = hex_wei_at(block, "baseFeePerGas");
    if (h.gas_used > h.gas_limit) {
        fail(Errc::kMalformedResponse, "gasUsed exceeds gasLimit in block " + std::to_string(number));
    }
    return h;
}

std::vector<TxRecord> RpcExecutionSource::block_transactions(uint64_t number) {
    const json block = impl_->call("eth_getBlockByNumber", json::array({to_hex_quantity(number), false}));
    if (block.is_null()) {
        fail(Errc::kUnknownBlock, "block " + std::to_string(number) + " unknown to endpoint");
    }
    const auto it = block.find("transactions");
    if (it == block.end() || !it->is_array()) {
        bad_field("transactions");
    }
    std::vector<TxRecord> out;
    out.reserve(it->size());
    for (const auto& hash : *it) {
        if (!hash.is_string()) {
            bad_field("transactions");
        }
        const json receipt = impl_->call("eth_getTransactionReceipt", json::array({hash}));
        if (receipt.is_null()) {
            fail(Errc::kMalformedResponse, "no receipt for " + hash.get<std::string>());
        }
        TxRecord tx;
        tx.tx_hash = bytes_at<Hash32>(receipt, "transactionHash");
        tx.block_number = hex_u64_at(receipt, "blockNumber");
        tx.gas_used = hex_u64_at(receipt, "gasUsed");
        tx.gas_price = hex_wei_at(receipt, "effectiveGasPrice");
        // receipts do not carry the transferred value
        tx.value = 0;
        if (tx.block_number != number) {
            fail(Errc::kMalformedResponse, "receipt block number mismatch for " + hash.get<std::string>());
        }
        out.push_back(std::move(tx));
    }
    return out;
}

struct BeaconApiSource::Impl {
    Impl(const std::string& url, std::chrono::milliseconds timeout) : endpoint(split_url(url)), client(endpoint.scheme_host_port) {
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
    }

    //! nullopt on 404.
    std::optional<json> get(const std::string& path) {
        std::lock_guard lock(mutex);
        auto res = client.Get(endpoint.base_path + path);
        if (!res) {
            fail(Errc::kEndpointUnreachable, path + ": " + httplib::to_string(res.error()));
        }
        if (res->status == 404) {
            return std::nullopt;
        }
        if (res->status >= 500 || res->status == 429) {
            fail(Errc::kEndpointUnreachable, path + ": HTTP " + std::to_string(res->status));
        }
        if (res->status != 200) {
            fail(Errc::kMalformedResponse, path + ": HTTP " + std::to_string(res->status));
        }
        return parse_body(res->body);
    }

    uint64_t active_validators(uint64_t slot) {
        const uint64_t epoch = slot / 32;
        if (const auto it = active_by_epoch.find(epoch); it != active_by_epoch.end()) {
            return it->second;
        }
        uint64_t count = 0;
        try {
            const auto reply = get("/eth/v1/beacon/states/" + std::to_string(slot) + "/validators?status=active");
            if (reply && reply->contains("data") && (*reply)["data"].is_array()) {
                count = (*reply)["data"].size();
            }
        } catch (const Error& e) {
            if (e.code() == Errc::kEndpointUnreachable) {
                throw;
            }
        }
        active_by_epoch.emplace(epoch, count);
        return count;
    }

    Endpoint endpoint;
    httplib::Client client;
    std::mutex mutex;
    std::map<uint64_t, uint64_t> active_by_epoch;
    std::optional<uint64_t> head;
};

BeaconApiSource::BeaconApiSource(std::string url, std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(url, timeout)) {}

BeaconApiSource::~BeaconApiSource() = default;

uint64_t BeaconApiSource::head_slot() {
    const auto reply = impl_->get("/eth/v1/beacon/headers/head");
    if (!reply) {
        fail(Errc::kMalformedResponse, "beacon head not available");
    }
    const json& message = object_at(object_at(object_at(*reply, "data"), "header"), "message");
    impl_->head = dec_u64_at(message, "slot");
    return *impl_->head;
}

SlotRecord BeaconApiSource::slot(uint64_t slot) {
    if (!impl_->head || slot > *impl_->head) {
        head_slot();
    }
    if (slot > *impl_->head) {
        fail(Errc::kSlotOutOfRange, "slot " + std::to_string(slot) + " beyond beacon head");
    }
    SlotRecord record;
    record.slot = slot;
    const auto header = impl_->get("/eth/v1/beacon/headers/" + std::to_string(slot));
    if (!header) {
        return record;
    }
    const json& message = object_at(object_at(object_at(*header, "data"), "header"), "message");
    record.proposer_index = dec_u64_at(message, "proposer_index");

    const auto block = impl_->get("/eth/v2/beacon/blocks/" + std::to_string(slot));
    if (!block) {
        return record;
    }
    const json& body = object_at(object_at(object_at(*block, "data"), "message"), "body");
    if (const auto payload = body.find("execution_payload"); payload != body.end() && payload->is_object()) {
        // pre-merge payloads are zero-filled and carry no execution block
        const auto hash = payload->find("block_hash");
        const bool empty = hash != payload->end() && hash->is_string() &&
                           hash->get<std::string>().find_first_not_of("0x") == std::string::npos;
        if (!empty) {
            record.block_number = dec_u64_at(*payload, "block_number");
        }
    }
    if (const auto atts = body.find("attestations"); atts != body.end() && atts->is_array()) {
        for (const auto& att : *atts) {
            record.total_votes += count_aggregation_bits(str_at(att, "aggregation_bits"));
        }
    }
    record.active_validators = impl_->active_validators(slot);
    return record;
}

}  // namespace ethmerge
