// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/slot_map.hpp"

#include <string>

#include "ethmerge/error.hpp"
#include "ethmerge/sources.hpp"

namespace ethmerge {

TableResolver::TableResolver(std::vector<std::optional<uint64_t>> table, uint64_t first_slot)
    : table_(std::move(table)), first_slot_(first_slot) {
    if (table_.empty()) {
        fail(Errc::kInvalidConfig, "slot table is empty");
    }
    resolved_.resize(table_.size());
    std::optional<uint64_t> last;
    for (std::size_t i = 0; i < table_.size(); ++i) {
        if (table_[i]) {
            if (last && *table_[i] <= *last) {
                fail(Errc::kInvalidConfig, "slot table not monotone at slot " + std::to_string(first_slot_ + i));
            }
            last = table_[i];
        }
        resolved_[i] = last;
    }
}

TableResolver TableResolver::from_records(std::span<const SlotRecord> records) {
    if (records.empty()) {
        fail(Errc::kInvalidConfig, "no slot records");
    }
    verify_slot_monotonicity(records);
    const uint64_t first = records.front().slot;
    std::vector<std::optional<uint64_t>> table(records.back().slot - first + 1);
    for (const auto& r : records) {
        table[r.slot - first] = r.block_number;
    }
    return TableResolver(std::move(table), first);
}

SlotLookup TableResolver::lookup(uint64_t slot) const {
    if (slot > head()) {
        fail(Errc::kSlotOutOfRange, "slot " + std::to_string(slot) + " beyond head " + std::to_string(head()));
    }
    if (slot < first_slot_) {
        return {};
    }
    const std::size_t i = slot - first_slot_;
    return {resolved_[i], table_[i].has_value()};
}

SourceResolver::SourceResolver(ConsensusSource& source, uint64_t floor_slot)
    : source_(source), floor_slot_(floor_slot), head_(source.head_slot()) {}

const SlotRecord& SourceResolver::fetch_locked(uint64_t slot) const {
    auto it = cache_.find(slot);
    if (it == cache_.end()) {
        it = cache_.emplace(slot, source_.slot(slot)).first;
    }
    return it->second;
}

SlotLookup SourceResolver::lookup(uint64_t slot) const {
    if (slot > head_) {
        fail(Errc::kSlotOutOfRange, "slot " + std::to_string(slot) + " beyond head " + std::to_string(head_));
    }
    std::lock_guard lock(mutex_);
    const SlotRecord& own = fetch_locked(slot);
    if (own.block_number) {
        return {own.block_number, true};
    }
    for (uint64_t s = slot; s > floor_slot_;) {
        --s;
        const SlotRecord& earlier = fetch_locked(s);
        if (earlier.block_number) {
            return {earlier.block_number, false};
        }
    }
    return {std::nullopt, false};
}

std::vector<SlotRecord> SourceResolver::fetched() const {
    std::lock_guard lock(mutex_);
    std::vector<SlotRecord> out;
    out.reserve(cache_.size());
    for (const auto& [_, r] : cache_) {
        out.push_back(r);
    }
    return out;
}

const SlotRecord& SourceResolver::record(uint64_t slot) const {
    if (slot > head_) {
        fail(Errc::kSlotOutOfRange, "slot " + std::to_string(slot) + " beyond head " + std::to_string(head_));
    }
    std::lock_guard lock(mutex_);
    return fetch_locked(slot);
}

std::optional<uint64_t> bsmap(uint64_t beacon_head, uint64_t block_number, const SlotResolver& resolver,
                              uint64_t lower_slot) {
    if (beacon_head > resolver.head()) {
        fail(Errc::kSlotOutOfRange, "beacon head " + std::to_string(beacon_head) + " beyond resolver head");
    }
    if (lower_slot > beacon_head) {
        return std::nullopt;
    }
    // signed bounds so that mid - 1 below slot 0 terminates the loop
    int64_t m = static_cast<int64_t>(lower_slot);
    int64_t n = static_cast<int64_t>(beacon_head);
    while (m <= n) {
        const int64_t mid = m + (n - m) / 2;
        const SlotLookup hit = resolver.lookup(static_cast<uint64_t>(mid));
        if (hit.block && *hit.block == block_number) {
            if (hit.proposed) {
                return static_cast<uint64_t>(mid);
            }
            // missed slot inheriting the target: the carrying slot is the nearest proposed one before it
            for (uint64_t s = static_cast<uint64_t>(mid); s > 0;) {
                --s;
                if (resolver.lookup(s).proposed) {
                    return s;
                }
            }
            return std::nullopt;
        }
        if (!hit.block || block_number > *hit.block) {
            m = mid + 1;
        } else {
            n = mid - 1;
        }
    }
    return std::nullopt;
}

}  // namespace ethmerge
