// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/chain.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "ethmerge/error.hpp"

namespace ethmerge {

using nlohmann::json;

namespace {

    [[noreturn]] void malformed(std::string_view what, std::string_view line) {
        std::string excerpt{line.substr(0, 120)};
        fail(Errc::kMalformedResponse, std::string(what) + ": " + excerpt);
    }

    json parse_object(std::string_view line) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            malformed("not a JSON object", line);
        }
        return j;
    }

    const std::string& field(const json& j, const char* key, std::string_view line) {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_string()) {
            malformed(std::string("missing or non-string field '") + key + "'", line);
        }
        return it->get_ref<const std::string&>();
    }

    uint64_t u64_field(const json& j, const char* key, std::string_view line) {
        const auto value = parse_decimal_u64(field(j, key, line));
        if (!value) {
            malformed(std::string("non-numeric field '") + key + "'", line);
        }
        return *value;
    }

    Wei wei_field(const json& j, const char* key, std::string_view line) {
        const auto value = parse_decimal_wei(field(j, key, line));
        if (!value) {
            malformed(std::string("non-numeric field '") + key + "'", line);
        }
        return *value;
    }

    template <class Bytes>
    Bytes bytes_field(const json& j, const char* key, std::string_view line) {
        const auto value = Bytes::from_hex(field(j, key, line));
        if (!value) {
            malformed(std::string("bad hex field '") + key + "'", line);
        }
        return *value;
    }

    template <class Record, class Parse>
    std::vector<Record> read_lines(const std::filesystem::path& file, Parse parse) {
        std::ifstream in(file);
        if (!in) {
            fail(Errc::kIoFailure, "cannot open " + file.string());
        }
        std::vector<Record> out;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            out.push_back(parse(line));
        }
        return out;
    }

    template <class Record>
    void write_lines(const std::filesystem::path& file, std::span<const Record> records) {
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(Errc::kStoreWriteFailure, "cannot write " + file.string());
        }
        for (const auto& r : records) {
            out << to_jsonl(r) << '\n';
        }
        if (!out) {
            fail(Errc::kStoreWriteFailure, "write failed for " + file.string());
        }
    }

}  // namespace

std::string to_jsonl(const BlockHeader& h) {
    json j;
    j["number"] = std::to_string(h.number);
    j["hash"] = h.hash.to_hex();
    j["parent_hash"] = h.parent_hash.to_hex();
    j["producer"] = h.producer.to_hex();
    j["timestamp"] = std::to_string(h.timestamp);
    j["gas_used"] = std::to_string(h.gas_used);
    j["gas_limit"] = std::to_string(h.gas_limit);
    j["base_fee_per_gas"] = to_decimal(h.base_fee_per_gas);
    return j.dump();
}

std::string to_jsonl(const TxRecord& tx) {
    json j;
    j["tx_hash"] = tx.tx_hash.to_hex();
    j["block_number"] = std::to_string(tx.block_number);
    j["gas_used"] = std::to_string(tx.gas_used);
    j["gas_price"] = to_decimal(tx.gas_price);
    j["value"] = to_decimal(tx.value);
    return j.dump();
}

std::string to_jsonl(const SlotRecord& s) {
    json j;
    j["slot"] = std::to_string(s.slot);
    j["proposer_index"] = std::to_string(s.proposer_index);
    j["block_number"] = s.block_number ? json(std::to_string(*s.block_number)) : json(nullptr);
    j["total_votes"] = std::to_string(s.total_votes);
    j["active_validators"] = std::to_string(s.active_validators);
    return j.dump();
}

BlockHeader parse_header_line(std::string_view line) {
    const json j = parse_object(line);
    BlockHeader h;
    h.number = u64_field(j, "number", line);
    h.hash = bytes_field<Hash32>(j, "hash", line);
    h.parent_hash = bytes_field<Hash32>(j, "parent_hash", line);
    h.producer = bytes_field<Address>(j, "producer", line);
    h.timestamp = u64_field(j, "timestamp", line);
    h.gas_used = u64_field(j, "gas_used", line);
    h.gas_limit = u64_field(j, "gas_limit", line);
    h.base_fee_per_gas = wei_field(j, "base_fee_per_gas", line);
    if (h.gas_used > h.gas_limit) {
        malformed("gas_used exceeds gas_limit", line);
    }
    return h;
}

TxRecord parse_tx_line(std::string_view line) {
    const json j = parse_object(line);
    TxRecord tx;
    tx.tx_hash = bytes_field<Hash32>(j, "tx_hash", line);
    tx.block_number = u64_field(j, "block_number", line);
    tx.gas_used = u64_field(j, "gas_used", line);
    tx.gas_price = wei_field(j, "gas_price", line);
    tx.value = wei_field(j, "value", line);
    return tx;
}

SlotRecord parse_slot_line(std::string_view line) {
    const json j = parse_object(line);
    SlotRecord s;
    s.slot = u64_field(j, "slot", line);
    s.proposer_index = u64_field(j, "proposer_index", line);
    const auto it = j.find("block_number");
    if (it != j.end() && !it->is_null()) {
        s.block_number = u64_field(j, "block_number", line);
    }
    s.total_votes = u64_field(j, "total_votes", line);
    s.active_validators = u64_field(j, "active_validators", line);
    return s;
}

std::vector<BlockHeader> read_headers(const std::filesystem::path& file) {
    return read_lines<BlockHeader>(file, parse_header_line);
}

std::vector<TxRecord> read_txs(const std::filesystem::path& file) { return read_lines<TxRecord>(file, parse_tx_line); }

std::vector<SlotRecord> read_slots(const std::filesystem::path& file) {
    return read_lines<SlotRecord>(file, parse_slot_line);
}

void write_headers(const std::filesystem::path& file, std::span<const BlockHeader> headers) {
    write_lines(file, headers);
}

void write_txs(const std::filesystem::path& file, std::span<const TxRecord> txs) { write_lines(file, txs); }

void write_slots(const std::filesystem::path& file, std::span<const SlotRecord> slots) { write_lines(file, slots); }

void verify_header_chain(std::span<const BlockHeader> headers) {
    for (std::size_t i = 1; i < headers.size(); ++i) {
        const auto& prev = headers[i - 1];
        const auto& cur = headers[i];
        if (cur.number != prev.number + 1) {
            fail(Errc::kMalformedResponse, "header numbers not consecutive at " + std::to_string(cur.number));
        }
        if (cur.parent_hash != prev.hash) {
            fail(Errc::kMalformedResponse, "parent hash mismatch at block " + std::to_string(cur.number));
        }
    }
}

void verify_slot_monotonicity(std::span<const SlotRecord> slots) {
    std::optional<uint64_t> last_slot;
    std::optional<uint64_t> last_block;
    for (const auto& s : slots) {
        if (last_slot && s.slot <= *last_slot) {
            fail(Errc::kInvalidConfig, "slots not strictly increasing at " + std::to_string(s.slot));
        }
        last_slot = s.slot;
        if (!s.block_number) {
            continue;
        }
        if (last_block && *s.block_number <= *last_block) {
            fail(Errc::kInvalidConfig, "block numbers not increasing with slot at " + std::to_string(s.slot));
        }
        last_block = s.block_number;
    }
}

ChainData load_chain_data(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        fail(Errc::kIoFailure, "not a directory: " + dir.string());
    }
    std::vector<fs::path> parts;
    if (fs::exists(dir / kHeadersFile)) {
        parts.push_back(dir);
    } else {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_directory() && fs::exists(entry.path() / kHeadersFile)) {
                parts.push_back(entry.path());
            }
        }
        std::sort(parts.begin(), parts.end());
    }
    if (parts.empty()) {
        fail(Errc::kIoFailure, "no " + std::string(kHeadersFile) + " under " + dir.string());
    }

    std::map<uint64_t, BlockHeader> headers;
    std::map<uint64_t, SlotRecord> slots;
    std::map<Hash32, TxRecord> seen_txs;
    std::vector<TxRecord> txs;
    for (const auto& part : parts) {
        for (auto& h : read_headers(part / kHeadersFile)) {
            headers.insert_or_assign(h.number, std::move(h));
        }
        if (fs::exists(part / kTxsFile)) {
            for (auto& tx : read_txs(part / kTxsFile)) {
                if (seen_txs.emplace(tx.tx_hash, tx).second) {
                    txs.push_back(std::move(tx));
                }
            }
        }
        if (fs::exists(part / kSlotsFile)) {
            for (auto& s : read_slots(part / kSlotsFile)) {
                slots.insert_or_assign(s.slot, std::move(s));
            }
        }
    }

    ChainData data;
    data.headers.reserve(headers.size());
    for (auto& [_, h] : headers) {
        data.headers.push_back(std::move(h));
    }
    // stable: keeps in-block order of transactions
    std::stable_sort(txs.begin(), txs.end(),
                     [](const TxRecord& a, const TxRecord& b) { return a.block_number < b.block_number; });
    data.txs = std::move(txs);
    data.slots.reserve(slots.size());
    for (auto& [_, s] : slots) {
        data.slots.push_back(std::move(s));
    }
    return data;
}

}  // namespace ethmerge
