// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "ethmerge/chain.hpp"

namespace ethmerge {

class ConsensusSource;

//! Result of looking up one slot.
struct SlotLookup {
    //! Block number of this slot if proposed, else of the nearest earlier proposed slot.
    //! Absent when no proposed slot exists at or before the queried one.
    std::optional<uint64_t> block;
    //! True iff the queried slot itself carries a block.
    bool proposed{false};
};

//! Slot -> block-number provider. Resolved block numbers are monotone non-decreasing in
//! slot, which is what makes binary search over slots valid when slots are missed.
class SlotResolver {
  public:
    virtual ~SlotResolver() = default;

    [[nodiscard]] virtual uint64_t head() const = 0;

    //! Throws Error{kSlotOutOfRange} when slot > head().
    [[nodiscard]] virtual SlotLookup lookup(uint64_t slot) const = 0;

    [[nodiscard]] std::optional<uint64_t> resolve_block_number(uint64_t slot) const { return lookup(slot).block; }
};

//! In-memory resolver over a dense table starting at `first_slot`. Slots below first_slot
//! resolve to absent.
class TableResolver final : public SlotResolver {
  public:
    explicit TableResolver(std::vector<std::optional<uint64_t>> table, uint64_t first_slot = 0);

    //! Builds the table from records; slots between records count as missed. Throws
    //! kInvalidConfig when present block numbers are not strictly increasing.
    static TableResolver from_records(std::span<const SlotRecord> records);

    [[nodiscard]] uint64_t head() const override { return first_slot_ + table_.size() - 1; }
    [[nodiscard]] SlotLookup lookup(uint64_t slot) const override;
    [[nodiscard]] uint64_t first_slot() const noexcept { return first_slot_; }

  private:
    std::vector<std::optional<uint64_t>> table_;
    std::vector<std::optional<uint64_t>> resolved_;
    uint64_t first_slot_;
};

//! Resolver backed by a consensus source. Fetched slots are cached; a missed slot is resolved
//! by walking back until a proposed slot (or `floor_slot`) is reached. Internally synchronized.
class SourceResolver final : public SlotResolver {
  public:
    SourceResolver(ConsensusSource& source, uint64_t floor_slot = 0);

    [[nodiscard]] uint64_t head() const override { return head_; }
    [[nodiscard]] SlotLookup lookup(uint64_t slot) const override;

    //! Slot records fetched so far, ordered by slot.
    [[nodiscard]] std::vector<SlotRecord> fetched() const;
    [[nodiscard]] const SlotRecord& record(uint64_t slot) const;

  private:
    const SlotRecord& fetch_locked(uint64_t slot) const;

    ConsensusSource& source_;
    uint64_t floor_slot_;
    uint64_t head_;
    mutable std::mutex mutex_;
    mutable std::map<uint64_t, SlotRecord> cache_;
};

//! Block-slot mapping: binary search over [lower_slot, beacon_head] for the proposed slot whose
//! block number equals `block_number`. A hit on a missed slot walks back to the proposed slot
//! carrying the block. Returns nullopt when no slot carries it.
std::optional<uint64_t> bsmap(uint64_t beacon_head, uint64_t block_number, const SlotResolver& resolver,
                              uint64_t lower_slot = 0);

}  // namespace ethmerge
