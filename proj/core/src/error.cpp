// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/error.hpp"

namespace ethmerge {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::kInvalidRange: return "InvalidRange";
        case Errc::kEndpointUnreachable: return "EndpointUnreachable";
        case Errc::kMalformedResponse: return "MalformedResponse";
        case Errc::kGapDetected: return "GapDetected";
        case Errc::kUnknownBlock: return "UnknownBlock";
        case Errc::kSlotOutOfRange: return "SlotOutOfRange";
        case Errc::kStoreWriteFailure: return "StoreWriteFailure";
        case Errc::kInconsistentRecord: return "InconsistentRecord";
        case Errc::kDegenerateDistribution: return "DegenerateDistribution";
        case Errc::kZeroMedian: return "ZeroMedian";
        case Errc::kUnmappedBlock: return "UnmappedBlock";
        case Errc::kInsufficientProducers: return "InsufficientProducers";
        case Errc::kSampleTooShort: return "SampleTooShort";
        case Errc::kInvalidConfig: return "InvalidConfig";
        case Errc::kInsufficientHistory: return "InsufficientHistory";
        case Errc::kInvalidSpec: return "InvalidSpec";
        case Errc::kFeatureMismatch: return "FeatureMismatch";
        case Errc::kTargetMismatch: return "TargetMismatch";
        case Errc::kUncalibratedModel: return "UncalibratedModel";
        case Errc::kEmptyHorizon: return "EmptyHorizon";
        case Errc::kVersionMismatch: return "VersionMismatch";
        case Errc::kCorruptModelFile: return "CorruptModelFile";
        case Errc::kLengthMismatch: return "LengthMismatch";
        case Errc::kIoFailure: return "IoFailure";
    }
    return "Unknown";
}

}  // namespace ethmerge
