// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ethmerge/cli/cli.hpp"
#include "ethmerge/cli/json_io.hpp"
#include "ethmerge/cli/provenance.hpp"
#include "ethmerge/cli/report.hpp"
#include "ethmerge/dataset.hpp"
#include "ethmerge/predictor.hpp"
#include "test_support.hpp"

using namespace ethmerge;
using ethmerge::test::TempDir;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code{0};
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) { return json::parse(test::read_text(p)); }

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

//! synth -> build-dataset -> train (gb) -> evaluate inside `root`.
void pipeline(const fs::path& root) {
    const std::string r = root.string();
    REQUIRE(run_cli({"synth", "--mode", "fees", "--out", r + "/fixture"}).code == 0);
    REQUIRE(run_cli({"build-dataset", "--store", r + "/fixture", "--out", r + "/dataset"}).code == 0);
    REQUIRE(run_cli({"train", "--dataset", r + "/dataset", "--model", "gb", "--out", r + "/model/model.json"}).code == 0);
    REQUIRE(run_cli({"evaluate", "--model", r + "/model/model.json", "--dataset", r + "/dataset", "--out",
                 r + "/eval/eval.json"})
                .code == 0);
}

//! One pipeline run shared by the test cases that only read its artifacts.
const TempDir& shared_pipeline() {
    static const TempDir dir;
    static const bool done = [] {
        pipeline(dir.path());
        return true;
    }();
    (void)done;
    return dir;
}

std::vector<SeriesPoint> ramp_series(std::size_t n) {
    std::vector<SeriesPoint> s;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = static_cast<double>(i);
        s.push_back(SeriesPoint{1000 + i, 12 * i, v, v + 1.0, v - 1.0});
    }
    return s;
}

}  // namespace

TEST_CASE("usage errors exit 2", "[cli]") {
    const auto bogus = run_cli({"train", "--bogus"});
    CHECK(bogus.code == cli::kExitUsage);
    CHECK_FALSE(bogus.err.empty());
    CHECK(run_cli({}).code == cli::kExitUsage);
    CHECK(run_cli({"no-such-command"}).code == cli::kExitUsage);
    CHECK(run_cli({"train", "--dataset", ".", "--model", "svm", "--out", "x"}).code == cli::kExitUsage);
    CHECK(run_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("operational errors exit 1 with one error line", "[cli]") {
    TempDir tmp;
    const auto r = run_cli({"--run-dir", tmp.path().string(), "map-slot", "--head", "5", "--block", "1", "--fixture",
                        (tmp / "missing").string()});
    CHECK(r.code == cli::kExitFailure);
    CHECK(r.err.rfind("error: code=", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

    write_text(tmp / "bad.json", R"({"n_txs": 10, "tip_nois": 0.1})");
    const auto bad = run_cli({"synth", "--mode", "fees", "--config", (tmp / "bad.json").string(), "--out",
                          (tmp / "x").string()});
    CHECK(bad.code == cli::kExitFailure);
    CHECK(bad.err.find("code=InvalidConfig") != std::string::npos);
}

TEST_CASE("ingest and map-slot over a fixture", "[cli]") {
    TempDir tmp;
    ChainData d;
    d.headers = test::linked_headers(100, 3);
    d.txs = {test::make_tx(100, 1, 21'000, 11'000'000'000ULL), test::make_tx(102, 2, 30'000, 12'000'000'000ULL)};
    d.slots = test::slots_for(d.headers, 5, 2);
    test::write_fixture(tmp / "fx", d);
    const std::string store = (tmp / "store").string();
    const std::vector<std::string> args{"ingest", "--store", store, "--from", "100", "--to", "102", "--fixture",
                                        (tmp / "fx").string()};
    const auto first = run_cli(args);
    REQUIRE(first.code == 0);
    const json s1 = json::parse(first.out);
    CHECK(s1["blocks_fetched"] == 3);
    CHECK(s1["txs_fetched"] == 2);
    const auto second = run_cli(args);
    REQUIRE(second.code == 0);
    CHECK(json::parse(second.out)["blocks_fetched"] == 0);
    CHECK(fs::exists(range_dir(store, {100, 102}) / std::string(cli::kRunRecordFile)));

    const std::string run_dir = tmp.path().string();
    const auto hit = run_cli({"map-slot", "--head", "8", "--block", "102", "--fixture", (tmp / "fx").string(),
                          "--run-dir", run_dir});
    REQUIRE(hit.code == 0);
    CHECK(hit.out == "8\n");
    const auto miss = run_cli({"map-slot", "--head", "8", "--block", "555", "--fixture", (tmp / "fx").string(),
                           "--run-dir", run_dir});
    CHECK(miss.out == "-1\n");
}

TEST_CASE("analyze-miners on a synthetic chain", "[cli]") {
    TempDir tmp;
    write_text(tmp / "chain.json", R"({"n_blocks": 4000, "n_producers": 30, "seed": 3, "first_block": 1})");
    REQUIRE(run_cli({"synth", "--mode", "chain", "--config", (tmp / "chain.json").string(), "--out",
                 (tmp / "chain").string()})
                .code == 0);
    const auto r = run_cli({"analyze-miners", "--store", (tmp / "chain").string(), "--windows", "1000,2000",
                        "--pow-range", "1", "2000", "--pos-range", "2001", "4000", "--medium-min", "40",
                        "--medium-max", "60", "--out", (tmp / "miners/report.json").string(), "--csv",
                        (tmp / "miners/producers.csv").string()});
    REQUIRE(r.code == 0);
    const json report = read_json(tmp / "miners/report.json");
    CHECK(report["pow"]["blocks"] == 2000);
    CHECK(report["pos"]["unique_producers"] == 30);
    REQUIRE(report["pow"]["windows"].size() == 2);
    const json& w = report["pow"]["windows"][1];
    CHECK(w["categories"]["total"] == w["unique_producers"]);
    CHECK(test::read_text(tmp / "miners/producers.csv").rfind("era,window,producer,blocks_produced,category\n", 0) ==
          0);
}

TEST_CASE("end-to-end pipeline", "[cli][e2e]") {
    const TempDir& a = shared_pipeline();
    const json eval = read_json(a / "eval/eval.json");
    REQUIRE(eval["r2"].is_number());
    CHECK(eval["r2"].get<double>() > 0.9);
    CHECK(eval["model"] == "gradient_boosting");
    CHECK(eval["baseline"]["mae"].get<double>() > eval["mae"].get<double>());

    SECTION("repeat runs are byte-identical") {
        TempDir b;
        pipeline(b.path());
        for (const auto* rel : {"fixture/txs.jsonl", "dataset/dataset.csv", "dataset/features.json",
                                "model/model.json", "eval/eval.json"}) {
            CHECK(test::read_text(a / rel) == test::read_text(b / rel));
        }
    }

    SECTION("run records carry output digests") {
        const json run = read_json(a / "model/run.json");
        const json& train = run["runs"]["train"];
        CHECK(train["seeds"]["model"] == 42);
        const std::string model_path = (a / "model/model.json").generic_string();
        CHECK(train["outputs"][model_path] == cli::sha256_file(a / "model/model.json"));
        CHECK(fs::exists(a / "dataset/run.json"));
        CHECK(fs::exists(a / "fixture/run.json"));
    }

    SECTION("report samples the evaluation") {
        const auto r = run_cli({"report", "--eval", (a / "eval/eval.json").string(), "--sample", "100", "--out",
                            (a / "fig").string()});
        REQUIRE(r.code == 0);
        const json summary = json::parse(r.out);
        CHECK(summary["points"].get<std::size_t>() <= 100);
        const std::string csv = test::read_text(a / "fig/series.csv");
        CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) ==
              summary["points"].get<std::size_t>() + 1);
        const std::string svg = test::read_text(a / "fig/series.svg");
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("id=\"actual\"") != std::string::npos);
        CHECK(svg.find("id=\"estimated\"") != std::string::npos);
        CHECK(svg.find("id=\"predicted\"") != std::string::npos);
    }

    SECTION("predict and recommend match the library") {
        const Dataset ds = read_dataset(a / "dataset");
        const TrainedModel model = load_model(a / "model/model.json");
        std::ostringstream rows;
        for (std::size_t c = 0; c < ds.config.names.size(); ++c) {
            rows << (c ? "," : "") << ds.config.names[c];
        }
        rows << '\n';
        FeatureMatrix m{ds.config.names, {}};
        for (std::size_t i = 0; i < 5; ++i) {
            const auto& f = ds.test[i].features;
            m.rows.push_back(f);
            for (std::size_t c = 0; c < f.size(); ++c) {
                rows << (c ? "," : "") << format_double(f[c]);
            }
            rows << '\n';
        }
        write_text(a / "rows.csv", rows.str());
        const auto p = run_cli({"predict", "--model", (a / "model/model.json").string(), "--rows",
                            (a / "rows.csv").string(), "--run-dir", a.path().string()});
        REQUIRE(p.code == 0);
        std::ostringstream expected;
        expected << "prediction\n";
        for (const double v : predict(model, m)) {
            expected << format_double(v) << '\n';
        }
        CHECK(p.out == expected.str());

        write_text(a / "ctx.json", json{{"feature_names", ds.config.names}, {"features", m.rows[0]}}.dump());
        const auto rec = run_cli({"recommend", "--model", (a / "model/model.json").string(), "--context",
                              (a / "ctx.json").string(), "--q", "0.9", "--run-dir", a.path().string()});
        REQUIRE(rec.code == 0);
        const json out = json::parse(rec.out);
        const FeatureMatrix ctx{ds.config.names, {m.rows[0]}};
        CHECK(out["priority_fee_gwei"].get<double>() == Catch::Approx(recommend_priority_fee(model, ctx, 0.9)));
        CHECK(out["prediction_gwei"].get<double>() == Catch::Approx(predict(model, ctx)[0]));
    }

    SECTION("besttime picks the cheapest context") {
        REQUIRE(run_cli({"train", "--dataset", (a / "dataset").string(), "--model", "lr", "--target", "txn_fee", "--out",
                     (a / "fee/model.json").string()})
                    .code == 0);
        const Dataset ds = read_dataset(a / "dataset");
        const TrainedModel model = load_model(a / "fee/model.json");
        std::ostringstream horizon;
        horizon << "timestamp";
        for (const auto& n : ds.config.names) {
            horizon << ',' << n;
        }
        horizon << '\n';
        FeatureMatrix m{ds.config.names, {}};
        for (std::size_t i = 0; i < 10; ++i) {
            const auto& f = ds.test[i * 7].features;
            m.rows.push_back(f);
            horizon << 1'000 + 12 * i;
            for (const double v : f) {
                horizon << ',' << format_double(v);
            }
            horizon << '\n';
        }
        write_text(a / "horizon.csv", horizon.str());
        const auto r = run_cli({"besttime", "--model", (a / "fee/model.json").string(), "--horizon",
                            (a / "horizon.csv").string(), "--run-dir", a.path().string()});
        REQUIRE(r.code == 0);
        const auto preds = predict(model, m);
        const auto best = static_cast<std::size_t>(std::min_element(preds.begin(), preds.end()) - preds.begin());
        CHECK(json::parse(r.out)["index"] == best);
        CHECK(json::parse(r.out)["timestamp"] == 1'000 + 12 * best);
    }
}

TEST_CASE("systematic sample and chart output", "[cli][report]") {
    const auto series = ramp_series(1000);
    const auto sample = cli::systematic_sample(series, 100);
    REQUIRE(sample.size() == 100);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        CHECK(sample[i].block_number == series[10 * i].block_number);
    }
    CHECK(cli::systematic_sample(ramp_series(40), 100).size() == 40);
    CHECK_THROWS_AS(cli::systematic_sample(series, 0), Error);

    const std::string csv = cli::series_csv(sample);
    CHECK(csv.rfind("index,block_number,timestamp,actual,estimated,predicted\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);

    const std::string svg = cli::series_svg(sample, {"title", "fee (gwei)"});
    CHECK(svg.find("stroke=\"#000000\"") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.find("title") != std::string::npos);
}

TEST_CASE("evaluation documents round-trip", "[cli][json]") {
    Evaluation e;
    e.model = EvalReport{1.5, 1.25, 0.75, 3, "priority_fee", "gradient_boosting"};
    e.baseline = EvalReport{2.5, 2.0, std::nullopt, 3, "priority_fee", "last_n_estimate"};
    e.series = ramp_series(3);
    e.series[1].estimated = std::numeric_limits<double>::quiet_NaN();
    const Evaluation back = cli::parse_evaluation(cli::to_json(e));
    CHECK(back.model.r2 == e.model.r2);
    CHECK_FALSE(back.baseline->r2);
    CHECK(std::isnan(back.series[1].estimated));
    CHECK(back.series[2].predicted == e.series[2].predicted);
    CHECK(test::error_code([] { (void)cli::parse_evaluation(json{{"rmse", 1}}); }) == Errc::kIoFailure);
}

TEST_CASE("sha256 digests", "[cli]") {
    CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
