// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ethmerge/sources.hpp"

namespace ethmerge {

struct IngestSummary {
    uint64_t blocks_fetched{0};
    uint64_t txs_fetched{0};
    uint64_t slots_fetched{0};
    std::vector<BlockRange> gaps;
    //! Failed endpoint attempts that were retried (or that exhausted the policy).
    uint64_t retries{0};

    friend bool operator==(const IngestSummary&, const IngestSummary&) = default;
};

std::string to_json(const IngestSummary& summary);
IngestSummary parse_ingest_summary(const std::string& text);

struct IngestSources {
    ExecutionSource* execution{nullptr};
    //! Optional. When present the slot span covering the range is located with bsmap and stored.
    ConsensusSource* consensus{nullptr};
    //! Lower bound for the slot search (slot 0 unless configured).
    uint64_t slot_floor{0};
};

//! Directory holding one ingested range: <store>/<first>-<last>.
std::filesystem::path range_dir(const std::filesystem::path& store, BlockRange range);

//! Fetches headers, transactions and slots for the range and persists them under
//! range_dir(store, range). Blocks the source does not know are reported as gaps rather than
//! failing the run. Idempotent: an existing range directory is left untouched and the returned
//! summary carries zero fetch counts with the stored gaps. Endpoint errors propagate once the
//! retry policy is exhausted; `summary_out`, when given, records the retries even then.
IngestSummary ingest(BlockRange range, const IngestSources& sources, const std::filesystem::path& store,
                     const RetryPolicy& retry = {}, IngestSummary* summary_out = nullptr);

}  // namespace ethmerge
