// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/cli/json_io.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "ethmerge/error.hpp"

namespace ethmerge::cli {

namespace {

    // Reads known keys into fields and rejects anything else.
    class Reader {
      public:
        explicit Reader(const json& j) : j_(j) {
            if (!j.is_object()) {
                fail(Errc::kInvalidConfig, "config must be a JSON object");
            }
        }

        template <class T>
        void read(const char* key, T& field) {
            seen_.insert(key);
            const auto it = j_.find(key);
            if (it == j_.end()) {
                return;
            }
            try {
                if constexpr (std::is_floating_point_v<T>) {
                    if (!it->is_number()) {
                        fail(Errc::kInvalidConfig, std::string("config key '") + key + "' must be a number");
                    }
                } else if constexpr (std::is_integral_v<T>) {
                    if (!it->is_number_unsigned()) {
                        fail(Errc::kInvalidConfig,
                             std::string("config key '") + key + "' must be a non-negative integer");
                    }
                }
                field = it->get<T>();
            } catch (const json::exception&) {
                fail(Errc::kInvalidConfig, std::string("config key '") + key + "' has the wrong type");
            }
        }

        [[nodiscard]] bool has(const char* key) const { return j_.contains(key); }
        void allow(const char* key) { seen_.insert(key); }

        void finish() const {
            for (const auto& [key, value] : j_.items()) {
                if (!seen_.contains(key)) {
                    fail(Errc::kInvalidConfig, "unknown config key '" + key + "'");
                }
            }
        }

      private:
        const json& j_;
        std::set<std::string> seen_;
    };

    json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

    double number_or_nan(const json& j) {
        if (j.is_null()) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return j.get<double>();
    }

}  // namespace

SynthChainConfig parse_chain_config(const json& j) {
    SynthChainConfig c;
    Reader r(j);
    r.read("n_blocks", c.n_blocks);
    r.read("producer_weights", c.producer_weights);
    r.allow("n_producers");
    if (r.has("n_producers")) {
        if (r.has("producer_weights")) {
            fail(Errc::kInvalidConfig, "give either n_producers or producer_weights");
        }
        std::size_t n = 0;
        r.read("n_producers", n);
        if (n == 0) {
            fail(Errc::kInvalidConfig, "n_producers must be positive");
        }
        c.producer_weights.assign(n, 1.0);
    }
    r.read("stickiness", c.stickiness);
    r.read("missed_slot_rate", c.missed_slot_rate);
    r.read("seed", c.seed);
    r.read("first_block", c.first_block);
    r.read("first_slot", c.first_slot);
    r.read("genesis_timestamp", c.genesis_timestamp);
    r.read("gas_limit", c.gas_limit);
    r.read("active_validators", c.active_validators);
    r.finish();
    c.validate();
    return c;
}

SynthFeeConfig parse_fee_config(const json& j) {
    SynthFeeConfig c;
    Reader r(j);
    r.read("n_txs", c.n_txs);
    r.read("ar_coefficient", c.ar_coefficient);
    r.read("congestion_noise", c.congestion_noise);
    r.read("initial_congestion", c.initial_congestion);
    r.read("demand_sensitivity", c.demand_sensitivity);
    r.read("elasticity", c.elasticity);
    r.read("initial_base_fee_gwei", c.initial_base_fee_gwei);
    r.read("tip_base_gwei", c.tip_base_gwei);
    r.read("tip_congestion_gain", c.tip_congestion_gain);
    r.read("tip_noise", c.tip_noise);
    r.read("gas_menu", c.gas_menu);
    r.read("min_txs_per_block", c.min_txs_per_block);
    r.read("max_txs_per_block", c.max_txs_per_block);
    r.read("n_producers", c.n_producers);
    r.read("missed_slot_rate", c.missed_slot_rate);
    r.read("seed", c.seed);
    r.read("first_block", c.first_block);
    r.read("first_slot", c.first_slot);
    r.read("genesis_timestamp", c.genesis_timestamp);
    r.read("gas_limit", c.gas_limit);
    r.read("active_validators", c.active_validators);
    r.finish();
    c.validate();
    return c;
}

json to_json(const SynthChainConfig& c) {
    return json{{"n_blocks", c.n_blocks},
                {"producer_weights", c.producer_weights},
                {"stickiness", c.stickiness},
                {"missed_slot_rate", c.missed_slot_rate},
                {"seed", c.seed},
                {"first_block", c.first_block},
                {"first_slot", c.first_slot},
                {"genesis_timestamp", c.genesis_timestamp},
                {"gas_limit", c.gas_limit},
                {"active_validators", c.active_validators}};
}

json to_json(const SynthFeeConfig& c) {
    return json{{"n_txs", c.n_txs},
                {"ar_coefficient", c.ar_coefficient},
                {"congestion_noise", c.congestion_noise},
                {"initial_congestion", c.initial_congestion},
                {"demand_sensitivity", c.demand_sensitivity},
                {"elasticity", c.elasticity},
                {"initial_base_fee_gwei", c.initial_base_fee_gwei},
                {"tip_base_gwei", c.tip_base_gwei},
                {"tip_congestion_gain", c.tip_congestion_gain},
                {"tip_noise", c.tip_noise},
                {"gas_menu", c.gas_menu},
                {"min_txs_per_block", c.min_txs_per_block},
                {"max_txs_per_block", c.max_txs_per_block},
                {"n_producers", c.n_producers},
                {"missed_slot_rate", c.missed_slot_rate},
                {"seed", c.seed},
                {"first_block", c.first_block},
                {"first_slot", c.first_slot},
                {"genesis_timestamp", c.genesis_timestamp},
                {"gas_limit", c.gas_limit},
                {"active_validators", c.active_validators}};
}

json to_json(const EvalReport& report) {
    return json{{"rmse", report.rmse},
                {"mae", report.mae},
                {"r2", report.r2 ? json(*report.r2) : json(nullptr)},
                {"n", report.n},
                {"target", report.target},
                {"model", report.model}};
}

EvalReport parse_eval_report(const json& j) {
    try {
        EvalReport r;
        r.rmse = j.at("rmse").get<double>();
        r.mae = j.at("mae").get<double>();
        if (!j.at("r2").is_null()) {
            r.r2 = j.at("r2").get<double>();
        }
        r.n = j.at("n").get<std::size_t>();
        r.target = j.at("target").get<std::string>();
        r.model = j.at("model").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        fail(Errc::kIoFailure, std::string("malformed evaluation report: ") + e.what());
    }
}

json to_json(const Evaluation& evaluation) {
    json j = to_json(evaluation.model);
    j["baseline"] = evaluation.baseline ? to_json(*evaluation.baseline) : json(nullptr);
    json series = json::array();
    for (const SeriesPoint& p : evaluation.series) {
        series.push_back(json{{"block_number", p.block_number},
                              {"timestamp", p.timestamp},
                              {"actual", finite_or_null(p.actual)},
                              {"estimated", finite_or_null(p.estimated)},
                              {"predicted", finite_or_null(p.predicted)}});
    }
    j["series"] = std::move(series);
    return j;
}

Evaluation parse_evaluation(const json& j) {
    Evaluation e;
    e.model = parse_eval_report(j);
    try {
        if (!j.at("baseline").is_null()) {
            e.baseline = parse_eval_report(j.at("baseline"));
        }
        for (const json& p : j.at("series")) {
            e.series.push_back(SeriesPoint{p.at("block_number").get<uint64_t>(), p.at("timestamp").get<uint64_t>(),
                                           number_or_nan(p.at("actual")), number_or_nan(p.at("estimated")),
                                           number_or_nan(p.at("predicted"))});
        }
    } catch (const json::exception& ex) {
        fail(Errc::kIoFailure, std::string("malformed evaluation series: ") + ex.what());
    }
    return e;
}

json to_json(const CategoryReport& report) {
    return json{{"window_size", report.window_size},
                {"large", report.large},
                {"medium", report.medium},
                {"small", report.small},
                {"total", report.total()},
                {"thresholds",
                 {{"medium_min", report.thresholds.medium_min}, {"medium_max", report.thresholds.medium_max}}}};
}

json to_json(const RandomnessReport& report) {
    json producers = json::array();
    for (const ProducerRandomness& p : report.producers) {
        producers.push_back(json{{"producer", p.producer.to_hex()},
                                 {"sample_size", p.sample_size},
                                 {"adjacency_rate", p.adjacency_rate},
                                 {"max_run_length", p.max_run_length},
                                 {"normalized_span", p.normalized_span}});
    }
    return json{{"producers", std::move(producers)},
                {"mean_adjacency_rate", report.mean_adjacency_rate},
                {"mean_max_run_length", report.mean_max_run_length},
                {"mean_normalized_span", report.mean_normalized_span}};
}

json to_json(const WindowAnalysis& analysis) {
    json top = json::array();
    for (const TopEntry& t : analysis.top) {
        top.push_back(json{{"producer", t.producer.to_hex()}, {"blocks_produced", t.blocks_produced}});
    }
    return json{{"era", std::string(to_string(analysis.era))},
                {"requested_size", analysis.requested_size},
                {"range", {{"first", analysis.range.first}, {"last", analysis.range.last}}},
                {"blocks", analysis.blocks},
                {"unique_producers", analysis.unique_producers},
                {"categories", to_json(analysis.categories)},
                {"top", std::move(top)},
                {"randomness", to_json(analysis.randomness)}};
}

}  // namespace ethmerge::cli
