// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "ethmerge/cli/json_io.hpp"
#include "ethmerge/cli/provenance.hpp"
#include "ethmerge/cli/report.hpp"
#include "ethmerge/dataset.hpp"
#include "ethmerge/error.hpp"
#include "ethmerge/evaluation.hpp"
#include "ethmerge/ingest.hpp"
#include "ethmerge/miner_dynamics.hpp"
#include "ethmerge/predictor.hpp"
#include "ethmerge/slot_map.hpp"
#include "ethmerge/sources.hpp"
#include "ethmerge/synth.hpp"

namespace ethmerge::cli {

namespace fs = std::filesystem;

namespace {

    struct UsageError : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    std::string env_or(const std::string& flag_value, const char* name) {
        if (!flag_value.empty()) {
            return flag_value;
        }
        const char* v = std::getenv(name);
        return v == nullptr ? std::string() : std::string(v);
    }

    std::string read_file(const fs::path& file) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            fail(Errc::kIoFailure, "cannot read " + file.string());
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_file(const fs::path& file, const std::string& text) {
        if (file.has_parent_path()) {
            std::error_code ec;
            fs::create_directories(file.parent_path(), ec);
        }
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) {
            fail(Errc::kIoFailure, "cannot write " + file.string());
        }
    }

    json read_json(const fs::path& file) {
        const std::string text = read_file(file);
        json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded()) {
            fail(Errc::kIoFailure, "malformed JSON in " + file.string());
        }
        return j;
    }

    fs::path parent_or_cwd(const fs::path& file) {
        return file.has_parent_path() ? file.parent_path() : fs::path(".");
    }

    std::vector<std::string> split_csv_line(const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream in(line);
        while (std::getline(in, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        return cells;
    }

    struct Table {
        std::vector<std::string> header;
        std::vector<std::vector<double>> rows;
    };

    //! Numeric CSV with a header line.
    Table read_numeric_csv(const fs::path& file) {
        std::istringstream in(read_file(file));
        Table t;
        std::string line;
        if (!std::getline(in, line)) {
            fail(Errc::kIoFailure, file.string() + " has no header line");
        }
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        t.header = split_csv_line(line);
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty()) {
                continue;
            }
            const auto cells = split_csv_line(line);
            if (cells.size() != t.header.size()) {
                fail(Errc::kIoFailure, file.string() + ":" + std::to_string(line_no) + ": expected " +
                                           std::to_string(t.header.size()) + " cells");
            }
            std::vector<double> row;
            row.reserve(cells.size());
            for (const auto& c : cells) {
                const auto v = parse_double(c);
                if (!v) {
                    fail(Errc::kIoFailure, file.string() + ":" + std::to_string(line_no) + ": bad number '" + c + "'");
                }
                row.push_back(*v);
            }
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    // Option storage per subcommand.

    struct IngestOptions {
        std::string store;
        uint64_t first{kDefaultPredictionRange.first};
        uint64_t last{kDefaultPredictionRange.last};
        std::string fixture;
        std::string rpc;
        std::string beacon;
        bool no_slots{false};
        std::optional<uint64_t> slot_floor;
        int retries{3};
        int backoff_ms{200};
    };

    struct SynthOptions {
        std::string mode;
        std::string config;
        std::string out;
        std::optional<uint64_t> seed;
    };

    struct MapSlotOptions {
        uint64_t head{0};
        uint64_t block{0};
        std::string fixture;
        std::string beacon;
        std::optional<uint64_t> lower;
    };

    struct BuildOptions {
        std::string store;
        std::string out;
        double z{3.0};
        double fence{1.5};
        std::vector<std::size_t> lags{FeatureConfig{}.lag_windows};
        std::size_t baseline_window{FeatureConfig{}.baseline_window};
        double train_fraction{FeatureConfig{}.train_fraction};
        std::vector<std::string> attributes{FeatureConfig{}.cleaning.attributes};
    };

    struct MinersOptions {
        std::string store;
        std::vector<uint64_t> windows{100'000, 500'000, 1'000'000};
        std::size_t k{10};
        std::size_t sample{50};
        std::string out;
        std::string csv;
        std::vector<uint64_t> pow_range{kDefaultPowRange.first, kDefaultPowRange.last};
        std::vector<uint64_t> pos_range{kDefaultPosRange.first, kDefaultPosRange.last};
        uint64_t medium_min{CategoryThresholds{}.medium_min};
        uint64_t medium_max{CategoryThresholds{}.medium_max};
    };

    struct TrainOptions {
        std::string dataset;
        std::string model{"gb"};
        std::string target{"priority_fee"};
        uint64_t seed{42};
        std::string out;
        std::vector<std::string> params;
    };

    struct EvaluateOptions {
        std::string model;
        std::string dataset;
        std::string split{"test"};
        std::string out;
        std::size_t horizon{kDefaultHorizonBlocks};
    };

    struct PredictOptions {
        std::string model;
        std::string rows;
        std::string out;
    };

    struct RecommendOptions {
        std::string model;
        std::string context;
        double q{0.9};
    };

    struct BesttimeOptions {
        std::string model;
        std::string horizon;
    };

    struct ReportOptions {
        std::string eval;
        std::size_t sample{100};
        std::string out;
        std::string title;
    };

    // Subcommand implementations. Each returns the run record written next to its artifacts.

    RunRecord do_ingest(const IngestOptions& o, std::ostream& out) {
        const BlockRange range{o.first, o.last};
        RetryPolicy retry;
        retry.attempts = o.retries;
        retry.initial_backoff = std::chrono::milliseconds(o.backoff_ms);

        std::unique_ptr<FixtureSource> fixture;
        std::unique_ptr<RpcExecutionSource> rpc;
        std::unique_ptr<BeaconApiSource> beacon;
        IngestSources sources;
        json config{{"range", {{"first", range.first}, {"last", range.last}}},
                    {"retries", o.retries},
                    {"backoff_ms", o.backoff_ms},
                    {"slots", !o.no_slots}};
        RunRecord rec;
        if (!o.fixture.empty()) {
            const ChainData data = load_chain_data(o.fixture);
            const bool has_slots = !data.slots.empty();
            const uint64_t first_slot = has_slots ? data.slots.front().slot : 0;
            fixture = std::make_unique<FixtureSource>(data);
            sources.execution = fixture.get();
            if (has_slots && !o.no_slots) {
                sources.consensus = fixture.get();
                sources.slot_floor = o.slot_floor.value_or(first_slot);
            }
            config["fixture"] = o.fixture;
            rec.inputs = digest_paths(o.fixture);
        } else {
            const std::string rpc_url = env_or(o.rpc, "EXECUTION_RPC_URL");
            if (rpc_url.empty()) {
                throw UsageError("ingest needs --fixture, --rpc or EXECUTION_RPC_URL");
            }
            rpc = std::make_unique<RpcExecutionSource>(rpc_url);
            sources.execution = rpc.get();
            config["execution_rpc"] = rpc_url;
            const std::string beacon_url = env_or(o.beacon, "BEACON_API_URL");
            if (!beacon_url.empty() && !o.no_slots) {
                beacon = std::make_unique<BeaconApiSource>(beacon_url);
                sources.consensus = beacon.get();
                sources.slot_floor = o.slot_floor.value_or(kMergeSlot);
                config["beacon_api"] = beacon_url;
            }
        }
        config["slot_floor"] = sources.slot_floor;
        const IngestSummary summary = ingest(range, sources, o.store, retry);
        out << json::parse(ethmerge::to_json(summary)).dump() << '\n';

        rec.command = "ingest";
        rec.config = std::move(config);
        rec.outputs = digest_paths(range_dir(o.store, range));
        return rec;
    }

    RunRecord do_synth(const SynthOptions& o, std::ostream& out) {
        const json raw = o.config.empty() ? json::object() : read_json(o.config);
        RunRecord rec;
        rec.command = "synth";
        ChainData chain;
        if (o.mode == "fees") {
            SynthFeeConfig c = parse_fee_config(raw);
            if (o.seed) {
                c.seed = *o.seed;
            }
            chain = gen_fee_series(c).chain;
            rec.config = json{{"mode", "fees"}, {"synth", to_json(c)}};
            rec.seeds = json{{"synth", c.seed}};
        } else {
            SynthChainConfig c = parse_chain_config(raw);
            if (o.seed) {
                c.seed = *o.seed;
            }
            SynthChain generated = gen_producer_sequence(c);
            chain.headers = std::move(generated.headers);
            chain.slots = std::move(generated.slots);
            rec.config = json{{"mode", "chain"}, {"synth", to_json(c)}};
            rec.seeds = json{{"synth", c.seed}};
        }
        const fs::path dir(o.out);
        fs::create_directories(dir);
        write_headers(dir / kHeadersFile, chain.headers);
        write_txs(dir / kTxsFile, chain.txs);
        write_slots(dir / kSlotsFile, chain.slots);
        if (!o.config.empty()) {
            rec.inputs = digest_paths(o.config);
        }
        rec.outputs = digest_paths(dir);
        out << json{{"blocks", chain.headers.size()}, {"txs", chain.txs.size()}, {"slots", chain.slots.size()}}.dump()
            << '\n';
        return rec;
    }

    RunRecord do_map_slot(const MapSlotOptions& o, std::ostream& out) {
        RunRecord rec;
        rec.command = "map-slot";
        std::optional<uint64_t> slot;
        json config{{"head", o.head}, {"block", o.block}};
        if (!o.fixture.empty()) {
            const ChainData data = load_chain_data(o.fixture);
            const TableResolver resolver = TableResolver::from_records(data.slots);
            if (o.head > resolver.head()) {
                fail(Errc::kSlotOutOfRange, "head " + std::to_string(o.head) + " beyond the fixture's last slot " +
                                                std::to_string(resolver.head()));
            }
            const uint64_t lower = o.lower.value_or(resolver.first_slot());
            slot = bsmap(o.head, o.block, resolver, lower);
            config["fixture"] = o.fixture;
            config["lower"] = lower;
            rec.inputs = digest_paths(o.fixture);
        } else {
            const std::string url = env_or(o.beacon, "BEACON_API_URL");
            if (url.empty()) {
                throw UsageError("map-slot needs --fixture, --beacon or BEACON_API_URL");
            }
            BeaconApiSource source(url);
            const uint64_t lower = o.lower.value_or(kMergeSlot);
            SourceResolver resolver(source, lower);
            slot = bsmap(o.head, o.block, resolver, lower);
            config["beacon_api"] = url;
            config["lower"] = lower;
        }
        if (slot) {
            out << *slot << '\n';
        } else {
            out << "-1\n";
        }
        rec.config = std::move(config);
        rec.outputs = json{{"slot", slot ? json(*slot) : json(-1)}};
        return rec;
    }

    RunRecord do_build_dataset(const BuildOptions& o, std::ostream& out) {
        FeatureConfig config;
        config.lag_windows = o.lags;
        config.baseline_window = o.baseline_window;
        config.train_fraction = o.train_fraction;
        config.cleaning = CleaningPolicy{o.z, o.fence, o.attributes};
        config.validate();
        config.cleaning.validate();

        const Dataset ds = build_dataset(load_chain_data(o.store), config);
        write_dataset(o.out, ds);
        out << json{{"train_rows", ds.train.size()},
                    {"test_rows", ds.test.size()},
                    {"features", ds.config.names}}
                   .dump()
            << '\n';

        RunRecord rec;
        rec.command = "build-dataset";
        rec.config = json{{"z", o.z},
                          {"fence", o.fence},
                          {"lag_windows", o.lags},
                          {"baseline_window", o.baseline_window},
                          {"train_fraction", o.train_fraction},
                          {"attributes", o.attributes}};
        rec.inputs = digest_paths(o.store);
        rec.outputs = digest_paths(o.out);
        return rec;
    }

    std::string_view category_of(uint64_t blocks, const CategoryThresholds& t) {
        if (blocks > t.medium_max) {
            return "large";
        }
        if (blocks >= t.medium_min) {
            return "medium";
        }
        return "small";
    }

    RunRecord do_analyze_miners(const MinersOptions& o, std::ostream& out) {
        if (o.pow_range[0] > o.pow_range[1] || o.pos_range[0] > o.pos_range[1]) {
            fail(Errc::kInvalidRange, "inverted era range");
        }
        MinerAnalysisConfig config;
        config.windows = o.windows;
        config.top_k = o.k;
        config.sample_size = o.sample;
        config.thresholds = CategoryThresholds{o.medium_min, o.medium_max};
        if (config.thresholds.medium_min > config.thresholds.medium_max) {
            fail(Errc::kInvalidConfig, "medium_min exceeds medium_max");
        }

        const ChainData data = load_chain_data(o.store);
        std::ostringstream csv;
        csv << "era,window,producer,blocks_produced,category\n";
        json report = json::object();
        const auto run_era = [&](Era era, const std::vector<uint64_t>& bounds) {
            std::vector<BlockHeader> headers;
            for (const BlockHeader& h : data.headers) {
                if (h.number >= bounds[0] && h.number <= bounds[1]) {
                    headers.push_back(h);
                }
            }
            json windows = json::array();
            if (!headers.empty()) {
                for (const uint64_t w : config.windows) {
                    const WindowAnalysis a = analyze_window(headers, era, w, config);
                    windows.push_back(to_json(a));
                    std::vector<BlockHeader> slice;
                    for (const BlockHeader& h : headers) {
                        if (h.number >= a.range.first && h.number <= a.range.last) {
                            slice.push_back(h);
                        }
                    }
                    for (const MinerProfile& p : producer_profiles(slice)) {
                        csv << to_string(era) << ',' << w << ',' << p.producer.to_hex() << ',' << p.blocks_produced
                            << ',' << category_of(p.blocks_produced, config.thresholds) << '\n';
                    }
                }
            }
            report[std::string(to_string(era))] =
                json{{"range", {{"first", bounds[0]}, {"last", bounds[1]}}},
                     {"blocks", headers.size()},
                     {"unique_producers", unique_producer_count(headers)},
                     {"windows", std::move(windows)}};
        };
        run_era(Era::kPow, o.pow_range);
        run_era(Era::kPos, o.pos_range);

        write_file(o.out, report.dump(2) + "\n");
        if (!o.csv.empty()) {
            write_file(o.csv, csv.str());
        }
        out << json{{"pow_blocks", report["pow"]["blocks"]}, {"pos_blocks", report["pos"]["blocks"]}}.dump() << '\n';

        RunRecord rec;
        rec.command = "analyze-miners";
        rec.config = json{{"windows", o.windows},
                          {"k", o.k},
                          {"sample", o.sample},
                          {"pow_range", o.pow_range},
                          {"pos_range", o.pos_range},
                          {"medium_min", o.medium_min},
                          {"medium_max", o.medium_max}};
        rec.inputs = digest_paths(o.store);
        rec.outputs = digest_paths(o.out);
        if (!o.csv.empty()) {
            rec.outputs.update(digest_paths(o.csv));
        }
        return rec;
    }

    RunRecord do_train(const TrainOptions& o, std::ostream& out) {
        ModelSpec spec;
        spec.kind = *parse_model_kind(o.model);
        spec.target = *parse_target(o.target);
        spec.seed = o.seed;
        for (const std::string& p : o.params) {
            const auto eq = p.find('=');
            const auto value = eq == std::string::npos ? std::nullopt : parse_double(std::string_view(p).substr(eq + 1));
            if (!value) {
                throw UsageError("--param expects name=value, got '" + p + "'");
            }
            spec.hyperparameters[p.substr(0, eq)] = *value;
        }
        spec.validate();

        const Dataset ds = read_dataset(o.dataset);
        const TrainedModel model = train(spec, ds);
        fs::create_directories(parent_or_cwd(o.out));
        save_model(model, o.out);
        out << json{{"model", to_string(spec.kind)},
                    {"target", to_string(spec.target)},
                    {"train_rows", model.metadata.train_rows},
                    {"features", model.metadata.feature_names.size()}}
                   .dump()
            << '\n';

        RunRecord rec;
        rec.command = "train";
        json hyper = json::object();
        for (const auto& [k, v] : spec.resolved()) {
            hyper[k] = v;
        }
        rec.config = json{{"model", to_string(spec.kind)}, {"target", to_string(spec.target)}, {"hyperparameters", hyper}};
        rec.seeds = json{{"model", spec.seed}};
        rec.inputs = digest_paths(o.dataset);
        rec.outputs = digest_paths(o.out);
        return rec;
    }

    RunRecord do_evaluate(const EvaluateOptions& o, std::ostream& out) {
        const TrainedModel model = load_model(o.model);
        const Dataset ds = read_dataset(o.dataset);
        const Evaluation ev = evaluate_model(model, ds, *parse_split(o.split), o.horizon);
        write_file(o.out, to_json(ev).dump() + "\n");
        json summary = to_json(ev.model);
        summary["baseline"] = ev.baseline ? to_json(*ev.baseline) : json(nullptr);
        out << summary.dump() << '\n';

        RunRecord rec;
        rec.command = "evaluate";
        rec.config = json{{"split", o.split}, {"horizon_blocks", o.horizon}};
        rec.inputs = digest_paths(o.model);
        rec.inputs.update(digest_paths(o.dataset));
        rec.outputs = digest_paths(o.out);
        return rec;
    }

    RunRecord do_predict(const PredictOptions& o, std::ostream& out) {
        const TrainedModel model = load_model(o.model);
        Table t = read_numeric_csv(o.rows);
        const FeatureMatrix x{std::move(t.header), std::move(t.rows)};
        const std::vector<double> y = predict(model, x);
        std::ostringstream csv;
        csv << "prediction\n";
        for (const double v : y) {
            csv << format_double(v) << '\n';
        }
        RunRecord rec;
        rec.command = "predict";
        rec.inputs = digest_paths(o.model);
        rec.inputs.update(digest_paths(o.rows));
        if (o.out.empty()) {
            out << csv.str();
        } else {
            write_file(o.out, csv.str());
            rec.outputs = digest_paths(o.out);
        }
        return rec;
    }

    RunRecord do_recommend(const RecommendOptions& o, std::ostream& out) {
        const TrainedModel model = load_model(o.model);
        const json ctx = read_json(o.context);
        FeatureMatrix x;
        try {
            x.names = ctx.at("feature_names").get<std::vector<std::string>>();
            x.rows.push_back(ctx.at("features").get<std::vector<double>>());
        } catch (const json::exception& e) {
            fail(Errc::kIoFailure, std::string("context needs feature_names and features: ") + e.what());
        }
        const double fee = recommend_priority_fee(model, x, o.q);
        const double raw = predict(model, x).front();
        out << json{{"q", o.q}, {"prediction_gwei", raw}, {"priority_fee_gwei", fee}}.dump() << '\n';

        RunRecord rec;
        rec.command = "recommend";
        rec.config = json{{"q", o.q}};
        rec.inputs = digest_paths(o.model);
        rec.inputs.update(digest_paths(o.context));
        return rec;
    }

    RunRecord do_besttime(const BesttimeOptions& o, std::ostream& out) {
        const TrainedModel model = load_model(o.model);
        Table t = read_numeric_csv(o.horizon);
        if (t.header.empty() || t.header.front() != "timestamp") {
            fail(Errc::kIoFailure, "horizon CSV must start with a timestamp column");
        }
        FeatureMatrix x;
        x.names.assign(t.header.begin() + 1, t.header.end());
        std::vector<uint64_t> timestamps;
        for (auto& row : t.rows) {
            const double ts = row.front();
            if (!(ts >= 0.0) || ts != static_cast<double>(static_cast<uint64_t>(ts))) {
                fail(Errc::kIoFailure, "timestamps must be non-negative integers");
            }
            timestamps.push_back(static_cast<uint64_t>(ts));
            x.rows.emplace_back(row.begin() + 1, row.end());
        }
        const uint64_t best = predict_min_fee_time(model, timestamps, x);
        const auto index = static_cast<std::size_t>(std::find(timestamps.begin(), timestamps.end(), best) -
                                                    timestamps.begin());
        out << json{{"timestamp", best}, {"index", index}}.dump() << '\n';

        RunRecord rec;
        rec.command = "besttime";
        rec.inputs = digest_paths(o.model);
        rec.inputs.update(digest_paths(o.horizon));
        return rec;
    }

    RunRecord do_report(const ReportOptions& o, std::ostream& out) {
        const Evaluation ev = parse_evaluation(read_json(o.eval));
        const std::vector<SeriesPoint> sample = systematic_sample(ev.series, o.sample);
        const bool time_target = ev.model.target == "txn_time";
        ChartLabels labels;
        labels.title = o.title.empty() ? ev.model.model + " / " + ev.model.target + ": actual vs estimated vs predicted"
                                       : o.title;
        labels.y_axis = time_target ? "seconds from horizon start" : ev.model.target + " (gwei)";
        const fs::path dir(o.out);
        fs::create_directories(dir);
        write_file(dir / "series.csv", series_csv(sample));
        write_file(dir / "series.svg", series_svg(sample, labels));
        out << json{{"points", sample.size()}, {"of", ev.series.size()}}.dump() << '\n';

        RunRecord rec;
        rec.command = "report";
        rec.config = json{{"sample", o.sample}, {"title", labels.title}};
        rec.inputs = digest_paths(o.eval);
        rec.outputs = digest_paths(dir);
        return rec;
    }

    std::string one_line(std::string text) {
        std::replace(text.begin(), text.end(), '\n', ' ');
        std::replace(text.begin(), text.end(), '\r', ' ');
        return text;
    }

    const CLI::Validator kModelName(
        [](std::string& s) { return parse_model_kind(s) ? std::string() : "unknown model '" + s + "'"; }, "MODEL");
    const CLI::Validator kTargetName(
        [](std::string& s) { return parse_target(s) ? std::string() : "unknown target '" + s + "'"; }, "TARGET");
    const CLI::Validator kSplitName(
        [](std::string& s) { return parse_split(s) ? std::string() : "unknown split '" + s + "'"; }, "SPLIT");

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Post-merge Ethereum block, slot and fee analysis", "ethmerge"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --run-dir follow the subcommand
    std::string run_dir;
    app.add_option("--run-dir", run_dir, "Directory for run.json (default: the artifact directory, else .)");

    IngestOptions ingest_o;
    auto* ingest_cmd = app.add_subcommand("ingest", "Fetch headers, transactions and slots into a store");
    ingest_cmd->add_option("--store", ingest_o.store, "Store root")->required();
    ingest_cmd->add_option("--from", ingest_o.first, "First block")->capture_default_str();
    ingest_cmd->add_option("--to", ingest_o.last, "Last block")->capture_default_str();
    ingest_cmd->add_option("--fixture", ingest_o.fixture, "Fixture directory instead of endpoints");
    ingest_cmd->add_option("--rpc", ingest_o.rpc, "Execution JSON-RPC URL (default EXECUTION_RPC_URL)");
    ingest_cmd->add_option("--beacon", ingest_o.beacon, "Beacon API URL (default BEACON_API_URL)");
    ingest_cmd->add_flag("--no-slots", ingest_o.no_slots, "Skip the consensus layer");
    ingest_cmd->add_option("--slot-floor", ingest_o.slot_floor, "Lower bound of the slot search");
    ingest_cmd->add_option("--retries", ingest_o.retries, "Attempts per request")
        ->check(CLI::Range(1, 100))
        ->capture_default_str();
    ingest_cmd->add_option("--backoff-ms", ingest_o.backoff_ms, "Initial retry backoff")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    SynthOptions synth_o;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic chain or fee series fixture");
    synth_cmd->add_option("--mode", synth_o.mode, "chain or fees")->required()->check(CLI::IsMember({"chain", "fees"}));
    synth_cmd->add_option("--config", synth_o.config, "JSON generator config")->check(CLI::ExistingFile);
    synth_cmd->add_option("--out", synth_o.out, "Output directory")->required();
    synth_cmd->add_option("--seed", synth_o.seed, "Overrides the config seed");

    MapSlotOptions map_o;
    auto* map_cmd = app.add_subcommand("map-slot", "Find the beacon slot carrying a block (-1 if none)");
    map_cmd->add_option("--head", map_o.head, "Beacon head slot")->required();
    map_cmd->add_option("--block", map_o.block, "Execution block number")->required();
    map_cmd->add_option("--fixture", map_o.fixture, "Fixture directory with slots.jsonl");
    map_cmd->add_option("--beacon", map_o.beacon, "Beacon API URL (default BEACON_API_URL)");
    map_cmd->add_option("--lower", map_o.lower, "Lowest slot searched");

    BuildOptions build_o;
    auto* build_cmd = app.add_subcommand("build-dataset", "Derive, clean and featurize fees");
    build_cmd->add_option("--store", build_o.store, "Store or fixture directory")->required()->check(CLI::ExistingDirectory);
    build_cmd->add_option("--out", build_o.out, "Dataset directory")->required();
    build_cmd->add_option("--z", build_o.z, "z-score threshold")->capture_default_str();
    build_cmd->add_option("--fence", build_o.fence, "IQR fence multiplier")->capture_default_str();
    build_cmd->add_option("--lags", build_o.lags, "Lag windows")->delimiter(',')->capture_default_str();
    build_cmd->add_option("--baseline-window", build_o.baseline_window, "Last-N estimate window")->capture_default_str();
    build_cmd->add_option("--train-fraction", build_o.train_fraction, "Temporal train share")->capture_default_str();
    build_cmd->add_option("--attributes", build_o.attributes, "Screened columns")->delimiter(',')->capture_default_str();

    MinersOptions miners_o;
    auto* miners_cmd = app.add_subcommand("analyze-miners", "Producer counts, categories and randomness");
    miners_cmd->add_option("--store", miners_o.store, "Store or fixture directory")->required()->check(CLI::ExistingDirectory);
    miners_cmd->add_option("--windows", miners_o.windows, "Window sizes")->delimiter(',')->capture_default_str();
    miners_cmd->add_option("--k", miners_o.k, "Top producers per window")->check(CLI::PositiveNumber)->capture_default_str();
    miners_cmd->add_option("--sample", miners_o.sample, "Blocks per producer sample")
        ->check(CLI::Range(2, 1'000'000))
        ->capture_default_str();
    miners_cmd->add_option("--out", miners_o.out, "Report JSON")->required();
    miners_cmd->add_option("--csv", miners_o.csv, "Per-producer CSV");
    miners_cmd->add_option("--pow-range", miners_o.pow_range, "First and last PoW block")->expected(2)->capture_default_str();
    miners_cmd->add_option("--pos-range", miners_o.pos_range, "First and last PoS block")->expected(2)->capture_default_str();
    miners_cmd->add_option("--medium-min", miners_o.medium_min, "Smallest medium producer")->capture_default_str();
    miners_cmd->add_option("--medium-max", miners_o.medium_max, "Largest medium producer")->capture_default_str();

    TrainOptions train_o;
    auto* train_cmd = app.add_subcommand("train", "Fit a model on a dataset's training partition");
    train_cmd->add_option("--dataset", train_o.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    train_cmd->add_option("--model", train_o.model, "Model kind")->check(kModelName)->capture_default_str();
    train_cmd->add_option("--target", train_o.target, "Target")->check(kTargetName)->capture_default_str();
    train_cmd->add_option("--seed", train_o.seed, "Model seed")->capture_default_str();
    train_cmd->add_option("--out", train_o.out, "Model file")->required();
    train_cmd->add_option("--param", train_o.params, "Hyperparameter override name=value (repeatable)");

    EvaluateOptions eval_o;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score a model against a dataset partition");
    eval_cmd->add_option("--model", eval_o.model, "Model file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--dataset", eval_o.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--split", eval_o.split, "train or test")->check(kSplitName)->capture_default_str();
    eval_cmd->add_option("--out", eval_o.out, "Evaluation JSON")->required();
    eval_cmd->add_option("--horizon", eval_o.horizon, "Blocks per txn_time horizon")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    PredictOptions predict_o;
    auto* predict_cmd = app.add_subcommand("predict", "Predict standardized feature rows from CSV");
    predict_cmd->add_option("--model", predict_o.model, "Model file")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--rows", predict_o.rows, "CSV with the model's feature columns")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--out", predict_o.out, "Output CSV (default stdout)");

    RecommendOptions rec_o;
    auto* rec_cmd = app.add_subcommand("recommend", "Calibrated priority fee for a context row");
    rec_cmd->add_option("--model", rec_o.model, "Priority-fee model file")->required()->check(CLI::ExistingFile);
    rec_cmd->add_option("--context", rec_o.context, "JSON with feature_names and features")->required()->check(CLI::ExistingFile);
    rec_cmd->add_option("--q", rec_o.q, "Coverage quantile in [0.5, 1)")->capture_default_str();

    BesttimeOptions best_o;
    auto* best_cmd = app.add_subcommand("besttime", "Timestamp with the lowest predicted fee");
    best_cmd->add_option("--model", best_o.model, "txn_fee or txn_time model file")->required()->check(CLI::ExistingFile);
    best_cmd->add_option("--horizon", best_o.horizon, "CSV: timestamp then feature columns")->required()->check(CLI::ExistingFile);

    ReportOptions report_o;
    auto* report_cmd = app.add_subcommand("report", "CSV and SVG of a systematic sample of an evaluation");
    report_cmd->add_option("--eval", report_o.eval, "Evaluation JSON")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--sample", report_o.sample, "Points to keep")->check(CLI::PositiveNumber)->capture_default_str();
    report_cmd->add_option("--out", report_o.out, "Output directory")->required();
    report_cmd->add_option("--title", report_o.title, "Chart title");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::vector<std::pair<CLI::App*, std::function<RunRecord()>>> commands = {
        {ingest_cmd, [&] { return do_ingest(ingest_o, out); }},
        {synth_cmd, [&] { return do_synth(synth_o, out); }},
        {map_cmd, [&] { return do_map_slot(map_o, out); }},
        {build_cmd, [&] { return do_build_dataset(build_o, out); }},
        {miners_cmd, [&] { return do_analyze_miners(miners_o, out); }},
        {train_cmd, [&] { return do_train(train_o, out); }},
        {eval_cmd, [&] { return do_evaluate(eval_o, out); }},
        {predict_cmd, [&] { return do_predict(predict_o, out); }},
        {rec_cmd, [&] { return do_recommend(rec_o, out); }},
        {best_cmd, [&] { return do_besttime(best_o, out); }},
        {report_cmd, [&] { return do_report(report_o, out); }},
    };
    // Where each subcommand's artifacts live; stdout-only commands default to the cwd.
    const std::map<CLI::App*, std::function<fs::path()>> artifact_dirs = {
        {ingest_cmd, [&] { return range_dir(ingest_o.store, BlockRange{ingest_o.first, ingest_o.last}); }},
        {synth_cmd, [&] { return fs::path(synth_o.out); }},
        {build_cmd, [&] { return fs::path(build_o.out); }},
        {miners_cmd, [&] { return parent_or_cwd(miners_o.out); }},
        {train_cmd, [&] { return parent_or_cwd(train_o.out); }},
        {eval_cmd, [&] { return parent_or_cwd(eval_o.out); }},
        {predict_cmd, [&] { return predict_o.out.empty() ? fs::path(".") : parent_or_cwd(predict_o.out); }},
        {report_cmd, [&] { return fs::path(report_o.out); }},
    };

    try {
        for (const auto& [cmd, action] : commands) {
            if (!cmd->parsed()) {
                continue;
            }
            RunRecord rec = action();
            rec.arguments = args;
            const auto dir_it = artifact_dirs.find(cmd);
            const fs::path dir = !run_dir.empty()             ? fs::path(run_dir)
                                 : dir_it != artifact_dirs.end() ? dir_it->second()
                                                                 : fs::path(".");
            write_run_record(dir, rec);
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "usage: " << one_line(e.what()) << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: code=" << to_string(e.code()) << " message=" << one_line(e.what()) << '\n';
        return kExitFailure;
    } catch (const fs::filesystem_error& e) {
        err << "error: code=" << to_string(Errc::kIoFailure) << " message=" << one_line(e.what()) << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: code=Internal message=" << one_line(e.what()) << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace ethmerge::cli
