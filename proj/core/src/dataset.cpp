// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ethmerge/error.hpp"
#include "ethmerge/slot_map.hpp"
#include "ethmerge/stats.hpp"

namespace ethmerge {

namespace {

    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    constexpr double kSecondsPerDay = 86400.0;

    // Everything known about a transaction before the split: raw features (possibly missing)
    // and the values screened by the cleaning policy.
    struct Precursor {
        std::size_t index{0};
        std::vector<std::optional<double>> raw;
        ScreenRow screen;
        FeatureRow row;
    };

    // Exact running sums of a wei series; window means are taken in gwei.
    class PrefixSums {
      public:
        explicit PrefixSums(std::size_t reserve) { sums_.reserve(reserve + 1); sums_.emplace_back(0); }
        void push(const Wei& v) { sums_.push_back(sums_.back() + v); }
        // Mean of values [end - w, end) in gwei, NaN if not enough history.
        [[nodiscard]] double window_mean_gwei(std::size_t end, std::size_t w) const {
            if (w == 0 || end < w) {
                return kNaN;
            }
            return to_gwei(sums_[end] - sums_[end - w]) / static_cast<double>(w);
        }

      private:
        std::vector<Wei> sums_;
    };

    std::optional<double> screened_value(const std::string& name, const FeeBreakdown& fee,
                                         const std::vector<std::string>& candidates,
                                         const std::vector<std::optional<double>>& raw) {
        if (name == "base_fee") {
            return to_gwei(fee.base_fee);
        }
        if (name == "priority_fee") {
            return to_gwei(fee.priority_fee);
        }
        if (name == "txn_fee") {
            return to_gwei(fee.txn_fee);
        }
        if (name == "gas_price") {
            return to_gwei(fee.gas_price);
        }
        const auto it = std::find(candidates.begin(), candidates.end(), name);
        if (it == candidates.end()) {
            fail(Errc::kInvalidConfig, "unknown screened attribute '" + name + "'");
        }
        return raw[static_cast<std::size_t>(it - candidates.begin())];
    }

    bool any_missing(const std::vector<std::optional<double>>& values) {
        return std::any_of(values.begin(), values.end(), [](const auto& v) { return !v || !std::isfinite(*v); });
    }

}  // namespace

void FeatureConfig::validate() const {
    for (const std::size_t w : lag_windows) {
        if (w == 0) {
            fail(Errc::kInvalidConfig, "lag windows must be >= 1");
        }
    }
    if (baseline_window == 0) {
        fail(Errc::kInvalidConfig, "baseline window must be >= 1");
    }
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        fail(Errc::kInvalidConfig, "train fraction must be in (0, 1]");
    }
    cleaning.validate();
}

std::size_t FeatureConfig::warmup() const noexcept {
    return lag_windows.empty() ? 0 : *std::max_element(lag_windows.begin(), lag_windows.end());
}

std::vector<std::string> FeatureConfig::candidate_names() const {
    std::vector<std::string> out{"gas_ratio", "base_fee_per_gas", "tx_gas_used"};
    for (const std::size_t w : lag_windows) {
        out.push_back("mean_txn_fee_" + std::to_string(w));
    }
    for (const std::size_t w : lag_windows) {
        out.push_back("mean_priority_fee_" + std::to_string(w));
    }
    for (const char* name : {"block_tx_count", "total_votes", "active_validators", "seconds_since_prev_block",
                             "tod_sin", "tod_cos"}) {
        out.emplace_back(name);
    }
    return out;
}

double FeatureRow::target(Target t) const noexcept {
    switch (t) {
        case Target::kBaseFee: return base_fee;
        case Target::kPriorityFee: return priority_fee;
        case Target::kTxnFee:
        case Target::kTxnTime: return txn_fee;
    }
    return kNaN;
}

double FeatureRow::estimate(Target t) const noexcept {
    switch (t) {
        case Target::kBaseFee: return est_base_fee;
        case Target::kPriorityFee: return est_priority_fee;
        case Target::kTxnFee:
        case Target::kTxnTime: return est_txn_fee;
    }
    return kNaN;
}

std::string_view to_string(Split split) noexcept { return split == Split::kTrain ? "train" : "test"; }

std::optional<Split> parse_split(std::string_view text) noexcept {
    if (text == "train") {
        return Split::kTrain;
    }
    if (text == "test") {
        return Split::kTest;
    }
    return std::nullopt;
}

Dataset build_feature_rows(std::span<const FeeBreakdown> fees_in, std::span<const BlockHeader> blocks,
                           std::span<const SlotRecord> slots, const FeatureConfig& config_in) {
    config_in.validate();
    Dataset ds;
    ds.config = config_in;
    FeatureConfig& config = ds.config;
    config.names.clear();
    config.means.clear();
    config.stds.clear();
    config.dropped.clear();
    const std::vector<std::string> candidates = config.candidate_names();

    std::vector<FeeBreakdown> fees(fees_in.begin(), fees_in.end());
    std::stable_sort(fees.begin(), fees.end(),
                     [](const FeeBreakdown& a, const FeeBreakdown& b) { return a.block_number < b.block_number; });

    std::unordered_map<uint64_t, const BlockHeader*> header_by_number;
    for (const auto& h : blocks) {
        header_by_number.emplace(h.number, &h);
    }
    std::unordered_map<uint64_t, std::size_t> tx_count;
    for (const auto& f : fees) {
        ++tx_count[f.block_number];
    }

    // Block -> slot record through the slot table.
    std::vector<SlotRecord> slot_records(slots.begin(), slots.end());
    std::sort(slot_records.begin(), slot_records.end(),
              [](const SlotRecord& a, const SlotRecord& b) { return a.slot < b.slot; });
    std::optional<TableResolver> resolver;
    if (!slot_records.empty()) {
        resolver.emplace(TableResolver::from_records(slot_records));
    }
    std::unordered_map<uint64_t, const SlotRecord*> slot_by_block;
    auto slot_for = [&](uint64_t block) -> const SlotRecord& {
        if (const auto it = slot_by_block.find(block); it != slot_by_block.end()) {
            return *it->second;
        }
        std::optional<uint64_t> slot;
        if (resolver) {
            slot = bsmap(resolver->head(), block, *resolver, resolver->first_slot());
        }
        if (!slot) {
            fail(Errc::kUnmappedBlock, "block " + std::to_string(block) + " has no beacon slot");
        }
        const auto it = std::lower_bound(slot_records.begin(), slot_records.end(), *slot,
                                         [](const SlotRecord& r, uint64_t s) { return r.slot < s; });
        slot_by_block.emplace(block, &*it);
        return *it;
    };

    const std::size_t n = fees.size();
    ds.input_rows = n;
    PrefixSums base_sums(n);
    PrefixSums priority_sums(n);
    PrefixSums txn_sums(n);
    std::vector<Precursor> pre(n);

    for (std::size_t i = 0; i < n; ++i) {
        const FeeBreakdown& fee = fees[i];
        const auto hit = header_by_number.find(fee.block_number);
        if (hit == header_by_number.end()) {
            fail(Errc::kUnknownBlock, "no header for block " + std::to_string(fee.block_number));
        }
        const BlockHeader& block = *hit->second;
        const SlotRecord& slot = slot_for(fee.block_number);

        Precursor& p = pre[i];
        p.index = i;
        auto& raw = p.raw;
        raw.reserve(candidates.size());
        raw.push_back(block.gas_limit == 0 ? std::nullopt
                                           : std::optional<double>(static_cast<double>(block.gas_used) /
                                                                   static_cast<double>(block.gas_limit)));
        raw.push_back(to_gwei(block.base_fee_per_gas));
        raw.push_back(static_cast<double>(fee.gas_used));
        for (const std::size_t w : config.lag_windows) {
            raw.push_back(txn_sums.window_mean_gwei(i, w));
        }
        for (const std::size_t w : config.lag_windows) {
            raw.push_back(priority_sums.window_mean_gwei(i, w));
        }
        raw.push_back(static_cast<double>(tx_count[fee.block_number]));
        raw.push_back(static_cast<double>(slot.total_votes));
        raw.push_back(static_cast<double>(slot.active_validators));
        if (const auto prev = header_by_number.find(fee.block_number - 1);
            fee.block_number > 0 && prev != header_by_number.end() && prev->second->timestamp <= block.timestamp) {
            raw.push_back(static_cast<double>(block.timestamp - prev->second->timestamp));
        } else {
            raw.push_back(std::nullopt);
        }
        const double phase =
            2.0 * std::numbers::pi * static_cast<double>(block.timestamp % 86400) / kSecondsPerDay;
        raw.push_back(std::sin(phase));
        raw.push_back(std::cos(phase));

        FeatureRow& row = p.row;
        row.tx_hash = fee.tx_hash;
        row.block_number = fee.block_number;
        row.timestamp = block.timestamp;
        row.base_fee = to_gwei(fee.base_fee);
        row.priority_fee = to_gwei(fee.priority_fee);
        row.txn_fee = to_gwei(fee.txn_fee);
        row.est_base_fee = base_sums.window_mean_gwei(i, config.baseline_window);
        row.est_priority_fee = priority_sums.window_mean_gwei(i, config.baseline_window);
        row.est_txn_fee = txn_sums.window_mean_gwei(i, config.baseline_window);
        row.base_fee_wei = fee.base_fee;
        row.priority_fee_wei = fee.priority_fee;
        row.txn_fee_wei = fee.txn_fee;

        for (const auto& attr : config.cleaning.attributes) {
            p.screen.push_back(screened_value(attr, fee, candidates, raw));
        }

        base_sums.push(fee.base_fee);
        priority_sums.push(fee.priority_fee);
        txn_sums.push(fee.txn_fee);
    }

    // Temporal split after warm-up.
    const std::size_t warmup = std::min(config.warmup(), n);
    ds.warmup_rows = warmup;
    const std::size_t usable = n - warmup;
    const auto n_train = static_cast<std::size_t>(std::floor(config.train_fraction * static_cast<double>(usable)));
    ds.boundary_index = warmup + n_train;
    if (ds.boundary_index < n) {
        ds.boundary_block = fees[ds.boundary_index].block_number;
    }

    // Missing-value removal, then outlier screening fitted on train only.
    auto complete = [&](std::size_t first, std::size_t last, std::size_t& removed) {
        std::vector<std::size_t> out;
        for (std::size_t i = first; i < last; ++i) {
            if (any_missing(pre[i].raw) || has_missing(pre[i].screen)) {
                ++removed;
            } else {
                out.push_back(i);
            }
        }
        return out;
    };
    std::size_t train_missing = 0;
    std::size_t test_missing = 0;
    const std::vector<std::size_t> train_complete = complete(warmup, ds.boundary_index, train_missing);
    const std::vector<std::size_t> test_complete = complete(ds.boundary_index, n, test_missing);

    std::vector<ScreenRow> train_screen;
    train_screen.reserve(train_complete.size());
    for (const std::size_t i : train_complete) {
        train_screen.push_back(pre[i].screen);
    }
    CleaningResult cleaned = clean(train_screen, config.cleaning);
    cleaned.report.input_rows += train_missing;
    cleaned.report.removed_missing += train_missing;
    ds.cleaning_stats = cleaned.stats;
    ds.train_cleaning = cleaned.report;

    std::vector<ScreenRow> test_screen;
    test_screen.reserve(test_complete.size());
    for (const std::size_t i : test_complete) {
        test_screen.push_back(pre[i].screen);
    }
    const std::vector<std::size_t> test_kept = apply_cleaning(test_screen, ds.cleaning_stats, &ds.test_cleaning);
    ds.test_cleaning.input_rows += test_missing;
    ds.test_cleaning.removed_missing += test_missing;

    // Standardization statistics from the cleaned training rows; constant columns are dropped.
    std::vector<std::size_t> keep_columns;
    std::vector<double> column(cleaned.kept.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        for (std::size_t k = 0; k < cleaned.kept.size(); ++k) {
            column[k] = *pre[train_complete[cleaned.kept[k]]].raw[c];
        }
        const double mu = mean(column);
        const double sd = population_stddev(column);
        if (sd > 0.0 && std::isfinite(sd)) {
            keep_columns.push_back(c);
            config.names.push_back(candidates[c]);
            config.means.push_back(mu);
            config.stds.push_back(sd);
        } else {
            config.dropped.push_back(candidates[c]);
        }
    }

    auto finish = [&](std::size_t i) {
        FeatureRow row = std::move(pre[i].row);
        row.features.resize(keep_columns.size());
        for (std::size_t k = 0; k < keep_columns.size(); ++k) {
            row.features[k] = (*pre[i].raw[keep_columns[k]] - config.means[k]) / config.stds[k];
        }
        return row;
    };
    ds.train.reserve(cleaned.kept.size());
    for (const std::size_t k : cleaned.kept) {
        ds.train.push_back(finish(train_complete[k]));
    }
    ds.test.reserve(test_kept.size());
    for (const std::size_t k : test_kept) {
        ds.test.push_back(finish(test_complete[k]));
    }
    return ds;
}

Dataset build_dataset(const ChainData& chain, const FeatureConfig& config) {
    std::unordered_map<uint64_t, const BlockHeader*> header_by_number;
    for (const auto& h : chain.headers) {
        header_by_number.emplace(h.number, &h);
    }
    std::vector<FeeBreakdown> fees;
    fees.reserve(chain.txs.size());
    for (const auto& tx : chain.txs) {
        const auto it = header_by_number.find(tx.block_number);
        if (it == header_by_number.end()) {
            fail(Errc::kUnknownBlock, "transaction references missing block " + std::to_string(tx.block_number));
        }
        fees.push_back(derive_fees(tx, *it->second));
    }
    return build_feature_rows(fees, chain.headers, chain.slots, config);
}

// Persistence -----------------------------------------------------------------------------------

namespace {

    using nlohmann::json;

    json report_to_json(const CleaningReport& r) {
        return json{{"input_rows", r.input_rows},           {"removed_missing", r.removed_missing},
                    {"flagged_z", r.flagged_z},             {"flagged_fence", r.flagged_fence},
                    {"removed_outliers", r.removed_outliers}, {"kept_rows", r.kept_rows},
                    {"passes", r.passes}};
    }

    CleaningReport report_from_json(const json& j) {
        CleaningReport r;
        r.input_rows = j.at("input_rows").get<std::size_t>();
        r.removed_missing = j.at("removed_missing").get<std::size_t>();
        r.flagged_z = j.at("flagged_z").get<std::size_t>();
        r.flagged_fence = j.at("flagged_fence").get<std::size_t>();
        r.removed_outliers = j.at("removed_outliers").get<std::size_t>();
        r.kept_rows = j.at("kept_rows").get<std::size_t>();
        r.passes = j.at("passes").get<std::size_t>();
        return r;
    }

    std::string csv_double(double v) { return std::isnan(v) ? std::string{} : format_double(v); }

    double parse_csv_double(std::string_view text) {
        if (text.empty()) {
            return kNaN;
        }
        const auto v = parse_double(text);
        if (!v) {
            fail(Errc::kIoFailure, "bad number in dataset: " + std::string(text));
        }
        return *v;
    }

    std::vector<std::string_view> split_csv(std::string_view line) {
        std::vector<std::string_view> out;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string_view::npos) {
                out.push_back(line.substr(start));
                return out;
            }
            out.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
    }

    constexpr const char* kLeadColumns[] = {"tx_hash", "block_number", "timestamp", "split"};
    constexpr const char* kTrailColumns[] = {"base_fee",         "priority_fee",    "txn_fee",
                                             "est_base_fee",     "est_priority_fee", "est_txn_fee",
                                             "base_fee_wei",     "priority_fee_wei", "txn_fee_wei"};

}  // namespace

void write_dataset(const std::filesystem::path& dir, const Dataset& ds) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        fail(Errc::kIoFailure, "cannot create " + dir.string() + ": " + ec.message());
    }
    const FeatureConfig& cfg = ds.config;

    std::ofstream csv(dir / kDatasetCsv, std::ios::binary | std::ios::trunc);
    if (!csv) {
        fail(Errc::kIoFailure, "cannot write " + (dir / kDatasetCsv).string());
    }
    std::string line;
    for (const char* c : kLeadColumns) {
        line += c;
        line += ',';
    }
    for (const auto& name : cfg.names) {
        line += name;
        line += ',';
    }
    for (const char* c : kTrailColumns) {
        line += c;
        line += ',';
    }
    line.back() = '\n';
    csv << line;
    for (const Split split : {Split::kTrain, Split::kTest}) {
        for (const FeatureRow& r : ds.partition(split)) {
            line = r.tx_hash.to_hex();
            line += ',' + std::to_string(r.block_number) + ',' + std::to_string(r.timestamp) + ',';
            line += to_string(split);
            for (const double f : r.features) {
                line += ',' + csv_double(f);
            }
            for (const double v : {r.base_fee, r.priority_fee, r.txn_fee, r.est_base_fee, r.est_priority_fee,
                                   r.est_txn_fee}) {
                line += ',' + csv_double(v);
            }
            line += ',' + to_decimal(r.base_fee_wei) + ',' + to_decimal(r.priority_fee_wei) + ',' +
                    to_decimal(r.txn_fee_wei) + '\n';
            csv << line;
        }
    }
    csv.close();
    if (!csv) {
        fail(Errc::kIoFailure, "failed writing " + (dir / kDatasetCsv).string());
    }

    json cleaning_columns = json::array();
    for (std::size_t c = 0; c < ds.cleaning_stats.columns.size(); ++c) {
        const ColumnStats& s = ds.cleaning_stats.columns[c];
        cleaning_columns.push_back({{"attribute", cfg.cleaning.attributes[c]},
                                    {"mean", s.mean},
                                    {"stddev", s.stddev},
                                    {"q25", s.q25},
                                    {"q50", s.q50},
                                    {"q75", s.q75}});
    }
    json meta{
        {"features", cfg.names},
        {"means", cfg.means},
        {"stds", cfg.stds},
        {"dropped", cfg.dropped},
        {"lag_windows", cfg.lag_windows},
        {"baseline_window", cfg.baseline_window},
        {"train_fraction", cfg.train_fraction},
        {"cleaning_policy",
         {{"z_threshold", cfg.cleaning.z_threshold},
          {"iqr_fence_multiplier", cfg.cleaning.iqr_fence_multiplier},
          {"attributes", cfg.cleaning.attributes}}},
        {"cleaning_stats", cleaning_columns},
        {"cleaning_report", {{"train", report_to_json(ds.train_cleaning)}, {"test", report_to_json(ds.test_cleaning)}}},
        {"split",
         {{"input_rows", ds.input_rows},
          {"warmup_rows", ds.warmup_rows},
          {"boundary_index", ds.boundary_index},
          {"boundary_block", ds.boundary_block ? json(*ds.boundary_block) : json(nullptr)},
          {"train_rows", ds.train.size()},
          {"test_rows", ds.test.size()}}},
    };
    std::ofstream js(dir / kFeaturesJson, std::ios::binary | std::ios::trunc);
    js << meta.dump(2) << '\n';
    js.close();
    if (!js) {
        fail(Errc::kIoFailure, "failed writing " + (dir / kFeaturesJson).string());
    }
}

Dataset read_dataset(const std::filesystem::path& dir) {
    Dataset ds;
    FeatureConfig& cfg = ds.config;
    {
        std::ifstream js(dir / kFeaturesJson, std::ios::binary);
        if (!js) {
            fail(Errc::kIoFailure, "cannot read " + (dir / kFeaturesJson).string());
        }
        try {
            const json meta = json::parse(js);
            cfg.names = meta.at("features").get<std::vector<std::string>>();
            cfg.means = meta.at("means").get<std::vector<double>>();
            cfg.stds = meta.at("stds").get<std::vector<double>>();
            cfg.dropped = meta.at("dropped").get<std::vector<std::string>>();
            cfg.lag_windows = meta.at("lag_windows").get<std::vector<std::size_t>>();
            cfg.baseline_window = meta.at("baseline_window").get<std::size_t>();
            cfg.train_fraction = meta.at("train_fraction").get<double>();
            const json& pol = meta.at("cleaning_policy");
            cfg.cleaning.z_threshold = pol.at("z_threshold").get<double>();
            cfg.cleaning.iqr_fence_multiplier = pol.at("iqr_fence_multiplier").get<double>();
            cfg.cleaning.attributes = pol.at("attributes").get<std::vector<std::string>>();
            ds.cleaning_stats.policy = cfg.cleaning;
            for (const json& c : meta.at("cleaning_stats")) {
                ds.cleaning_stats.columns.push_back({c.at("mean").get<double>(), c.at("stddev").get<double>(),
                                                     c.at("q25").get<double>(), c.at("q50").get<double>(),
                                                     c.at("q75").get<double>()});
            }
            ds.train_cleaning = report_from_json(meta.at("cleaning_report").at("train"));
            ds.test_cleaning = report_from_json(meta.at("cleaning_report").at("test"));
            const json& split = meta.at("split");
            ds.input_rows = split.at("input_rows").get<std::size_t>();
            ds.warmup_rows = split.at("warmup_rows").get<std::size_t>();
            ds.boundary_index = split.at("boundary_index").get<std::size_t>();
            if (!split.at("boundary_block").is_null()) {
                ds.boundary_block = split.at("boundary_block").get<uint64_t>();
            }
        } catch (const json::exception& e) {
            fail(Errc::kIoFailure, std::string("malformed features.json: ") + e.what());
        }
        if (cfg.means.size() != cfg.names.size() || cfg.stds.size() != cfg.names.size()) {
            fail(Errc::kIoFailure, "features.json statistics do not match feature names");
        }
    }

    std::ifstream csv(dir / kDatasetCsv, std::ios::binary);
    if (!csv) {
        fail(Errc::kIoFailure, "cannot read " + (dir / kDatasetCsv).string());
    }
    const std::size_t width = std::size(kLeadColumns) + cfg.names.size() + std::size(kTrailColumns);
    std::string line;
    if (!std::getline(csv, line)) {
        fail(Errc::kIoFailure, "empty dataset.csv");
    }
    const auto header = split_csv(line);
    if (header.size() != width) {
        fail(Errc::kIoFailure, "dataset.csv header does not match features.json");
    }
    for (std::size_t k = 0; k < cfg.names.size(); ++k) {
        if (header[std::size(kLeadColumns) + k] != cfg.names[k]) {
            fail(Errc::kIoFailure, "dataset.csv feature columns do not match features.json");
        }
    }
    std::size_t line_no = 1;
    while (std::getline(csv, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != width) {
            fail(Errc::kIoFailure, "dataset.csv line " + std::to_string(line_no) + " has wrong column count");
        }
        FeatureRow r;
        const auto hash = Hash32::from_hex(cells[0]);
        const auto block = parse_decimal_u64(cells[1]);
        const auto ts = parse_decimal_u64(cells[2]);
        const auto split = parse_split(cells[3]);
        if (!hash || !block || !ts || !split) {
            fail(Errc::kIoFailure, "dataset.csv line " + std::to_string(line_no) + " is malformed");
        }
        r.tx_hash = *hash;
        r.block_number = *block;
        r.timestamp = *ts;
        std::size_t at = std::size(kLeadColumns);
        r.features.reserve(cfg.names.size());
        for (std::size_t k = 0; k < cfg.names.size(); ++k) {
            r.features.push_back(parse_csv_double(cells[at++]));
        }
        r.base_fee = parse_csv_double(cells[at++]);
        r.priority_fee = parse_csv_double(cells[at++]);
        r.txn_fee = parse_csv_double(cells[at++]);
        r.est_base_fee = parse_csv_double(cells[at++]);
        r.est_priority_fee = parse_csv_double(cells[at++]);
        r.est_txn_fee = parse_csv_double(cells[at++]);
        Wei* wei_fields[] = {&r.base_fee_wei, &r.priority_fee_wei, &r.txn_fee_wei};
        for (Wei* w : wei_fields) {
            const auto v = parse_decimal_wei(cells[at++]);
            if (!v) {
                fail(Errc::kIoFailure, "dataset.csv line " + std::to_string(line_no) + " has a bad wei value");
            }
            *w = *v;
        }
        (*split == Split::kTrain ? ds.train : ds.test).push_back(std::move(r));
    }
    return ds;
}

}  // namespace ethmerge
