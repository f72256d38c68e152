// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>

#include "ethmerge/evaluation.hpp"
#include "ethmerge/ingest.hpp"
#include "ethmerge/metrics.hpp"
#include "ethmerge/miner_dynamics.hpp"
#include "ethmerge/synth.hpp"

// JSON codecs for the documents the command-line tool reads and writes.

namespace ethmerge::cli {

using nlohmann::json;

//! Keys mirror the struct fields. Missing keys keep their defaults; unknown keys and wrongly
//! typed values throw kInvalidConfig. For chains, "n_producers" is shorthand for that many
//! equal producer weights.
SynthChainConfig parse_chain_config(const json& j);
SynthFeeConfig parse_fee_config(const json& j);
json to_json(const SynthChainConfig& config);
json to_json(const SynthFeeConfig& config);

//! r2 is null when undefined.
json to_json(const EvalReport& report);
EvalReport parse_eval_report(const json& j);

//! The model's report at top level, plus "baseline" (report or null) and "series".
//! Non-finite series values are written as null.
json to_json(const Evaluation& evaluation);
//! Throws kIoFailure on a malformed document.
Evaluation parse_evaluation(const json& j);

json to_json(const CategoryReport& report);
json to_json(const RandomnessReport& report);
json to_json(const WindowAnalysis& analysis);

}  // namespace ethmerge::cli
