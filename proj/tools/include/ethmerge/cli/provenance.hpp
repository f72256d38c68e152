// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ethmerge::cli {

inline constexpr std::string_view kRunRecordFile = "run.json";

//! Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
//! Throws kIoFailure when the file cannot be read.
std::string sha256_file(const std::filesystem::path& file);

//! Digests keyed by path: the file itself, or every regular file below a directory (relative
//! paths, sorted). run.json files are skipped since later runs may rewrite them.
nlohmann::json digest_paths(const std::filesystem::path& path);

//! What one subcommand invocation needs to be repeated: its arguments, resolved configuration,
//! seeds and the digests of what it read and wrote.
struct RunRecord {
    std::string command;
    std::vector<std::string> arguments;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json seeds = nlohmann::json::object();
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json outputs = nlohmann::json::object();
};

//! Adds or replaces the record for `record.command` in dir/run.json, keeping the records of
//! other subcommands, so one artifact directory can hold a whole pipeline.
void write_run_record(const std::filesystem::path& dir, const RunRecord& record);

}  // namespace ethmerge::cli
