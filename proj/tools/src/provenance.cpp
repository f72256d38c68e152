// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/cli/provenance.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include "ethmerge/error.hpp"

namespace ethmerge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

    constexpr std::string_view kToolVersion = "0.1.0";

    class Sha256 {
      public:
        Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
            if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
                fail(Errc::kIoFailure, "cannot initialise SHA-256");
            }
        }

        void update(const void* data, std::size_t size) { EVP_DigestUpdate(ctx_.get(), data, size); }

        std::string hex() {
            std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
            unsigned int len = 0;
            EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
            static constexpr char kDigits[] = "0123456789abcdef";
            std::string out;
            out.reserve(2 * len);
            for (unsigned int i = 0; i < len; ++i) {
                out.push_back(kDigits[md[i] >> 4]);
                out.push_back(kDigits[md[i] & 0xf]);
            }
            return out;
        }

      private:
        std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
    };

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string sha256_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        fail(Errc::kIoFailure, "cannot read " + file.string());
    }
    Sha256 h;
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        h.update(buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

json digest_paths(const fs::path& path) {
    json out = json::object();
    if (fs::is_regular_file(path)) {
        out[path.generic_string()] = sha256_file(path);
        return out;
    }
    if (!fs::is_directory(path)) {
        return out;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().filename() != kRunRecordFile) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
        out[(path / fs::relative(f, path)).generic_string()] = sha256_file(f);
    }
    return out;
}

void write_run_record(const fs::path& dir, const RunRecord& record) {
    const fs::path file = dir / kRunRecordFile;
    json doc;
    if (std::ifstream in(file); in) {
        std::stringstream ss;
        ss << in.rdbuf();
        doc = json::parse(ss.str(), nullptr, /*allow_exceptions=*/false);
    }
    if (!doc.is_object() || !doc.contains("runs") || !doc["runs"].is_object()) {
        doc = json::object();
        doc["runs"] = json::object();
    }
    doc["tool"] = "ethmerge";
    doc["version"] = kToolVersion;
    doc["runs"][record.command] = json{{"arguments", record.arguments},
                                       {"config", record.config},
                                       {"seeds", record.seeds},
                                       {"inputs", record.inputs},
                                       {"outputs", record.outputs}};
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
    if (!out) {
        fail(Errc::kIoFailure, "cannot write " + file.string());
    }
}

}  // namespace ethmerge::cli
