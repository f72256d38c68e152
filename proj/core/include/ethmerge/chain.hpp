// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ethmerge/types.hpp"

namespace ethmerge {

//! Execution-layer block metadata. `producer` is the header fee recipient ("miner").
struct BlockHeader {
    uint64_t number{0};
    Hash32 hash;
    Hash32 parent_hash;
    Address producer;
    uint64_t timestamp{0};
    uint64_t gas_used{0};
    uint64_t gas_limit{0};
    Wei base_fee_per_gas{0};

    friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

//! One executed transaction with receipt-derived gas figures.
struct TxRecord {
    Hash32 tx_hash;
    uint64_t block_number{0};
    uint64_t gas_used{0};
    Wei gas_price{0};  // effective gas price
    Wei value{0};

    friend bool operator==(const TxRecord&, const TxRecord&) = default;
};

//! Beacon-chain slot. A missed slot has no block_number.
struct SlotRecord {
    uint64_t slot{0};
    uint64_t proposer_index{0};
    std::optional<uint64_t> block_number;
    uint64_t total_votes{0};
    uint64_t active_validators{0};

    [[nodiscard]] bool missed() const noexcept { return !block_number.has_value(); }
    friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

inline constexpr std::string_view kHeadersFile = "headers.jsonl";
inline constexpr std::string_view kTxsFile = "txs.jsonl";
inline constexpr std::string_view kSlotsFile = "slots.jsonl";
inline constexpr std::string_view kSummaryFile = "summary.json";

// Line codecs. Integers are decimal strings; keys are emitted in sorted order so that
// output bytes depend only on the record. Parsing throws Error{kMalformedResponse}.
std::string to_jsonl(const BlockHeader& header);
std::string to_jsonl(const TxRecord& tx);
std::string to_jsonl(const SlotRecord& slot);

BlockHeader parse_header_line(std::string_view line);
TxRecord parse_tx_line(std::string_view line);
SlotRecord parse_slot_line(std::string_view line);

std::vector<BlockHeader> read_headers(const std::filesystem::path& file);
std::vector<TxRecord> read_txs(const std::filesystem::path& file);
std::vector<SlotRecord> read_slots(const std::filesystem::path& file);

void write_headers(const std::filesystem::path& file, std::span<const BlockHeader> headers);
void write_txs(const std::filesystem::path& file, std::span<const TxRecord> txs);
void write_slots(const std::filesystem::path& file, std::span<const SlotRecord> slots);

//! Throws kMalformedResponse unless numbers are consecutive and parent_hash(n+1) == hash(n).
void verify_header_chain(std::span<const BlockHeader> headers);

//! Throws kInvalidConfig unless present block numbers strictly increase with slot.
void verify_slot_monotonicity(std::span<const SlotRecord> slots);

//! Everything loaded from a store or fixture directory, sorted by block number / slot.
struct ChainData {
    std::vector<BlockHeader> headers;
    std::vector<TxRecord> txs;
    std::vector<SlotRecord> slots;
};

//! Loads a directory holding the three jsonl files, or a store root whose subdirectories
//! each hold them (merged and de-duplicated). Missing txs/slots files are treated as empty.
ChainData load_chain_data(const std::filesystem::path& dir);

}  // namespace ethmerge
