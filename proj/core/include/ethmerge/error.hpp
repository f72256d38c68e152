// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ethmerge {

enum class Errc {
    kInvalidRange,
    kEndpointUnreachable,
    kMalformedResponse,
    kGapDetected,
    kUnknownBlock,
    kSlotOutOfRange,
    kStoreWriteFailure,
    kInconsistentRecord,
    kDegenerateDistribution,
    kZeroMedian,
    kUnmappedBlock,
    kInsufficientProducers,
    kSampleTooShort,
    kInvalidConfig,
    kInsufficientHistory,
    kInvalidSpec,
    kFeatureMismatch,
    kTargetMismatch,
    kUncalibratedModel,
    kEmptyHorizon,
    kVersionMismatch,
    kCorruptModelFile,
    kLengthMismatch,
    kIoFailure,
};

std::string_view to_string(Errc code) noexcept;

//! Inclusive block-number range [first, last].
struct BlockRange {
    uint64_t first{0};
    uint64_t last{0};

    [[nodiscard]] uint64_t size() const noexcept { return last - first + 1; }
    friend bool operator==(const BlockRange&, const BlockRange&) = default;
};

//! The single exception type raised by the library. Callers switch on code().
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    Error(Errc code, const std::string& message, std::vector<BlockRange> gaps)
        : std::runtime_error(message), code_(code), gaps_(std::move(gaps)) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

    //! Missing ranges, populated for kGapDetected only.
    [[nodiscard]] const std::vector<BlockRange>& gaps() const noexcept { return gaps_; }

  private:
    Errc code_;
    std::vector<BlockRange> gaps_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace ethmerge
