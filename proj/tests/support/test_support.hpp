// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ethmerge/chain.hpp"
#include "ethmerge/error.hpp"

namespace ethmerge::test {

//! Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

//! Deterministic 32-byte value with `tag` in the low bytes and `domain` in the first byte.
Hash32 tagged_hash(uint64_t tag, uint8_t domain = 0);
Address tagged_address(uint64_t tag);

//! Linked headers first..first+n-1 with base fee 10 gwei and producers cycling over
//! `producers` addresses.
std::vector<BlockHeader> linked_headers(uint64_t first, std::size_t n, std::size_t producers = 3);

//! One transaction with the given gas figures.
TxRecord make_tx(uint64_t block, uint64_t tag, uint64_t gas_used, uint64_t gas_price_wei);

//! Slot records start_slot.. carrying the headers' block numbers, one per slot, with a missed
//! slot inserted before every `missed_every`-th block (0 for none).
std::vector<SlotRecord> slots_for(const std::vector<BlockHeader>& headers, uint64_t start_slot,
                                  std::size_t missed_every = 0);

//! Writes the three fixture files into dir.
void write_fixture(const std::filesystem::path& dir, const ChainData& data);

std::string read_text(const std::filesystem::path& file);

//! Code of the ethmerge::Error thrown by fn, or nullopt when it returns normally.
std::optional<Errc> error_code(const std::function<void()>& fn);

}  // namespace ethmerge::test
