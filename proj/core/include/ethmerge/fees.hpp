// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "ethmerge/chain.hpp"

namespace ethmerge {

//! Per-transaction fee split, exact in wei:
//!   base_fee     = gas_used * base_fee_per_gas   (burned)
//!   txn_fee      = gas_used * gas_price          (paid)
//!   priority_fee = txn_fee - base_fee            (tip to the producer)
struct FeeBreakdown {
    Hash32 tx_hash;
    uint64_t block_number{0};
    Wei base_fee{0};
    Wei txn_fee{0};
    Wei priority_fee{0};
    uint64_t gas_used{0};
    Wei gas_price{0};
    Wei base_fee_per_gas{0};

    friend bool operator==(const FeeBreakdown&, const FeeBreakdown&) = default;
};

//! Throws kInconsistentRecord if the tx is not from `block` or pays below the base fee.
FeeBreakdown derive_fees(const TxRecord& tx, const BlockHeader& block);

//! True iff the three identities hold exactly for the stored gas figures.
bool fee_identities_hold(const FeeBreakdown& fees) noexcept;

}  // namespace ethmerge
