// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/ingest.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "ethmerge/slot_map.hpp"

namespace ethmerge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_json(const IngestSummary& summary) {
    json gaps = json::array();
    for (const auto& g : summary.gaps) {
        gaps.push_back({{"first", std::to_string(g.first)}, {"last", std::to_string(g.last)}});
    }
    json j = {{"blocks_fetched", summary.blocks_fetched},
              {"txs_fetched", summary.txs_fetched},
              {"slots_fetched", summary.slots_fetched},
              {"gaps", gaps},
              {"retries", summary.retries}};
    return j.dump(2) + "\n";
}

IngestSummary parse_ingest_summary(const std::string& text) {
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        fail(Errc::kMalformedResponse, "summary is not a JSON object");
    }
    try {
        IngestSummary s;
        s.blocks_fetched = j.at("blocks_fetched").get<uint64_t>();
        s.txs_fetched = j.at("txs_fetched").get<uint64_t>();
        s.slots_fetched = j.at("slots_fetched").get<uint64_t>();
        s.retries = j.at("retries").get<uint64_t>();
        for (const auto& g : j.at("gaps")) {
            const auto first = parse_decimal_u64(g.at("first").get<std::string>());
            const auto last = parse_decimal_u64(g.at("last").get<std::string>());
            if (!first || !last) {
                fail(Errc::kMalformedResponse, "bad gap entry in summary");
            }
            s.gaps.push_back({*first, *last});
        }
        return s;
    } catch (const json::exception& e) {
        fail(Errc::kMalformedResponse, std::string("summary: ") + e.what());
    }
}

fs::path range_dir(const fs::path& store, BlockRange range) {
    return store / (std::to_string(range.first) + "-" + std::to_string(range.last));
}

namespace {

    //! Applies the retry policy to every slot fetch made through the resolver.
    class RetryingConsensus final : public ConsensusSource {
      public:
        RetryingConsensus(ConsensusSource& inner, const RetryPolicy& policy, uint64_t& failures)
            : inner_(inner), policy_(policy), failures_(failures) {}

        uint64_t head_slot() override {
            return with_retries(policy_, failures_, [&] { return inner_.head_slot(); });
        }
        SlotRecord slot(uint64_t slot) override {
            ++fetched_;
            return with_retries(policy_, failures_, [&] { return inner_.slot(slot); });
        }
        [[nodiscard]] uint64_t fetched() const noexcept { return fetched_; }

      private:
        ConsensusSource& inner_;
        const RetryPolicy& policy_;
        uint64_t& failures_;
        uint64_t fetched_{0};
    };

    std::vector<SlotRecord> fetch_slot_span(const std::vector<BlockHeader>& headers, const IngestSources& sources,
                                            const RetryPolicy& retry, uint64_t& failures) {
        RetryingConsensus consensus(*sources.consensus, retry, failures);
        SourceResolver resolver(consensus, sources.slot_floor);
        const uint64_t head = resolver.head();
        const auto first = bsmap(head, headers.front().number, resolver, sources.slot_floor);
        const auto last = bsmap(head, headers.back().number, resolver, sources.slot_floor);
        if (!first || !last) {
            fail(Errc::kUnmappedBlock, "no beacon slot carries block " +
                                           std::to_string(first ? headers.back().number : headers.front().number));
        }
        std::vector<SlotRecord> slots;
        slots.reserve(*last - *first + 1);
        for (uint64_t s = *first; s <= *last; ++s) {
            slots.push_back(resolver.record(s));
        }
        return slots;
    }

    void write_text(const fs::path& file, const std::string& text) {
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) {
            fail(Errc::kStoreWriteFailure, "cannot write " + file.string());
        }
    }

    //! Verifies parent links inside every run of consecutive block numbers.
    void verify_runs(const std::vector<BlockHeader>& headers) {
        std::size_t begin = 0;
        for (std::size_t i = 1; i <= headers.size(); ++i) {
            if (i == headers.size() || headers[i].number != headers[i - 1].number + 1) {
                verify_header_chain(std::span(headers).subspan(begin, i - begin));
                begin = i;
            }
        }
    }

    struct SummarySink {
        IngestSummary& summary;
        IngestSummary* out;
        ~SummarySink() {
            if (out) {
                *out = summary;
            }
        }
    };

}  // namespace

IngestSummary ingest(BlockRange range, const IngestSources& sources, const fs::path& store, const RetryPolicy& retry,
                     IngestSummary* summary_out) {
    if (range.first > range.last) {
        fail(Errc::kInvalidRange, "inverted range");
    }
    if (sources.execution == nullptr) {
        fail(Errc::kInvalidConfig, "ingest needs an execution source");
    }
    const fs::path dir = range_dir(store, range);
    IngestSummary summary;
    SummarySink sink{summary, summary_out};

    if (fs::exists(dir / kSummaryFile)) {
        std::ifstream in(dir / kSummaryFile);
        std::stringstream text;
        text << in.rdbuf();
        summary.gaps = parse_ingest_summary(text.str()).gaps;
        return summary;
    }

    FetchOptions options{retry, &summary.retries};
    HeaderScan scan = scan_headers(range, *sources.execution, options);
    verify_runs(scan.headers);

    std::vector<TxRecord> txs;
    for (const auto& h : scan.headers) {
        auto block_txs = fetch_block_transactions(h.number, *sources.execution, options);
        for (auto& tx : block_txs) {
            txs.push_back(std::move(tx));
        }
    }

    std::vector<SlotRecord> slots;
    if (sources.consensus != nullptr && !scan.headers.empty()) {
        slots = fetch_slot_span(scan.headers, sources, retry, summary.retries);
    }

    summary.blocks_fetched = scan.headers.size();
    summary.txs_fetched = txs.size();
    summary.slots_fetched = slots.size();
    summary.gaps = scan.gaps;

    // single writer: build in a sibling temp directory, then rename into place
    const fs::path tmp = store / (".tmp-" + dir.filename().string());
    std::error_code ec;
    fs::create_directories(store, ec);
    fs::remove_all(tmp, ec);
    if (!fs::create_directories(tmp, ec) || ec) {
        fail(Errc::kStoreWriteFailure, "cannot create " + tmp.string());
    }
    write_headers(tmp / kHeadersFile, scan.headers);
    write_txs(tmp / kTxsFile, txs);
    write_slots(tmp / kSlotsFile, slots);
    write_text(tmp / kSummaryFile, to_json(summary));
    fs::rename(tmp, dir, ec);
    if (ec) {
        fail(Errc::kStoreWriteFailure, "cannot move " + tmp.string() + " into place: " + ec.message());
    }
    return summary;
}

}  // namespace ethmerge
