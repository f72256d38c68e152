// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ethmerge::cli {

inline constexpr int kExitOk = 0;
//! Operational failure; stderr carries one line "error: code=<Errc> message=<text>".
inline constexpr int kExitFailure = 1;
//! Unknown subcommand or flag, missing or invalid argument.
inline constexpr int kExitUsage = 2;

//! First beacon slot carrying an execution payload; default lower bound of slot searches
//! against a remote beacon node.
inline constexpr uint64_t kMergeSlot = 4'700'013;

//! Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ethmerge::cli
