// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ethmerge/chain.hpp"
#include "ethmerge/error.hpp"

namespace ethmerge {

//! Execution-layer data provider.
class ExecutionSource {
  public:
    virtual ~ExecutionSource() = default;

    //! nullopt when the source does not know the block.
    virtual std::optional<BlockHeader> header(uint64_t number) = 0;

    //! Throws kUnknownBlock when the block is not known.
    virtual std::vector<TxRecord> block_transactions(uint64_t number) = 0;
};

//! Consensus-layer data provider.
class ConsensusSource {
  public:
    virtual ~ConsensusSource() = default;

    virtual uint64_t head_slot() = 0;

    //! Missed slots come back with block_number absent. Throws kSlotOutOfRange beyond head.
    virtual SlotRecord slot(uint64_t slot) = 0;
};

//! Both layers served from a directory of jsonl fixture files.
class FixtureSource final : public ExecutionSource, public ConsensusSource {
  public:
    explicit FixtureSource(const std::filesystem::path& dir);
    explicit FixtureSource(ChainData data);

    std::optional<BlockHeader> header(uint64_t number) override;
    std::vector<TxRecord> block_transactions(uint64_t number) override;
    uint64_t head_slot() override;
    SlotRecord slot(uint64_t slot) override;

  private:
    std::map<uint64_t, BlockHeader> headers_;
    std::map<uint64_t, std::vector<TxRecord>> txs_;
    std::map<uint64_t, SlotRecord> slots_;
};

//! Ethereum JSON-RPC 2.0 over HTTP: eth_getBlockByNumber (full-tx flag false) and
//! eth_getTransactionReceipt. Transport failures raise kEndpointUnreachable.
class RpcExecutionSource final : public ExecutionSource {
  public:
    explicit RpcExecutionSource(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(30));
    ~RpcExecutionSource() override;

    std::optional<BlockHeader> header(uint64_t number) override;
    std::vector<TxRecord> block_transactions(uint64_t number) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

//! Beacon REST API: /eth/v1/beacon/headers/{slot} and /eth/v2/beacon/blocks/{slot}; 404 marks
//! a missed slot. Total votes count the set aggregation bits over the block's attestations.
//! Active validators come from /eth/v1/beacon/states/{slot}/validators?status=active, fetched
//! once per epoch (0 when the node refuses the query).
class BeaconApiSource final : public ConsensusSource {
  public:
    explicit BeaconApiSource(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(30));
    ~BeaconApiSource() override;

    uint64_t head_slot() override;
    SlotRecord slot(uint64_t slot) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct RetryPolicy {
    int attempts{3};
    std::chrono::milliseconds initial_backoff{200};
    double multiplier{2.0};
};

//! Runs `call`, retrying kEndpointUnreachable with exponential backoff. Each failed attempt
//! increments `failures`. The last error is rethrown once attempts are exhausted.
template <class F>
auto with_retries(const RetryPolicy& policy, uint64_t& failures, F&& call) -> decltype(call());

//! Sleeps between attempts.
void retry_sleep(std::chrono::milliseconds delay);

struct FetchOptions {
    RetryPolicy retry;
    uint64_t* failed_attempts{nullptr};  // optional counter
};

struct HeaderScan {
    std::vector<BlockHeader> headers;  // ascending
    std::vector<BlockRange> gaps;
};

//! Every header the source knows in [first, last], plus the ranges it does not know.
HeaderScan scan_headers(BlockRange range, ExecutionSource& source, const FetchOptions& options = {});

//! Headers for [first, last] in ascending order. Throws kInvalidRange for an inverted range and
//! kGapDetected (with the missing ranges) when any block is unknown.
std::vector<BlockHeader> fetch_headers(BlockRange range, ExecutionSource& source, const FetchOptions& options = {});

std::vector<TxRecord> fetch_block_transactions(uint64_t block_number, ExecutionSource& source,
                                               const FetchOptions& options = {});

SlotRecord fetch_slot_record(uint64_t slot, ConsensusSource& source, const FetchOptions& options = {});

//! Collapses a sorted list of missing block numbers into ranges.
std::vector<BlockRange> to_ranges(const std::vector<uint64_t>& numbers);

// ---------------------------------------------------------------------------------------------

template <class F>
auto with_retries(const RetryPolicy& policy, uint64_t& failures, F&& call) -> decltype(call()) {
    auto delay = policy.initial_backoff;
    const int attempts = policy.attempts < 1 ? 1 : policy.attempts;
    for (int attempt = 1;; ++attempt) {
        try {
            return call();
        } catch (const Error& e) {
            if (e.code() != Errc::kEndpointUnreachable) {
                throw;
            }
            ++failures;
            if (attempt >= attempts) {
                throw Error(Errc::kEndpointUnreachable,
                            std::string(e.what()) + " (after " + std::to_string(attempts) + " attempts)");
            }
        }
        retry_sleep(delay);
        delay = std::chrono::milliseconds(static_cast<int64_t>(static_cast<double>(delay.count()) * policy.multiplier));
    }
}

}  // namespace ethmerge
