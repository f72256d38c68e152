// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/fees.hpp"

#include <string>

#include "ethmerge/error.hpp"

namespace ethmerge {

FeeBreakdown derive_fees(const TxRecord& tx, const BlockHeader& block) {
    if (tx.block_number != block.number) {
        fail(Errc::kInconsistentRecord, "tx " + tx.tx_hash.to_hex() + " is not in block " + std::to_string(block.number));
    }
    if (tx.gas_price < block.base_fee_per_gas) {
        fail(Errc::kInconsistentRecord, "tx " + tx.tx_hash.to_hex() + " gas price below base fee per gas");
    }
    FeeBreakdown out;
    out.tx_hash = tx.tx_hash;
    out.block_number = tx.block_number;
    out.gas_used = tx.gas_used;
    out.gas_price = tx.gas_price;
    out.base_fee_per_gas = block.base_fee_per_gas;
    out.base_fee = Wei(tx.gas_used) * block.base_fee_per_gas;
    out.txn_fee = Wei(tx.gas_used) * tx.gas_price;
    out.priority_fee = out.txn_fee - out.base_fee;
    return out;
}

bool fee_identities_hold(const FeeBreakdown& f) noexcept {
    const Wei gas(f.gas_used);
    return f.base_fee == gas * f.base_fee_per_gas && f.txn_fee == gas * f.gas_price &&
           f.priority_fee == f.txn_fee - f.base_fee && f.priority_fee >= 0;
}

}  // namespace ethmerge
