// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/evaluation.hpp"

#include <cmath>

#include "ethmerge/error.hpp"

namespace ethmerge {

namespace {

    std::size_t argmin_first(std::span<const double> v) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i] < v[best]) {
                best = i;
            }
        }
        return best;
    }

    std::optional<EvalReport> baseline_report(const std::vector<SeriesPoint>& series) {
        std::vector<double> actual;
        std::vector<double> estimated;
        for (const auto& p : series) {
            if (std::isfinite(p.estimated)) {
                actual.push_back(p.actual);
                estimated.push_back(p.estimated);
            }
        }
        if (actual.empty()) {
            return std::nullopt;
        }
        return evaluate(actual, estimated);
    }

}  // namespace

Evaluation evaluate_model(const TrainedModel& model, const Dataset& dataset, Split split, std::size_t horizon_blocks) {
    const Target target = model.spec.target;
    const auto& rows = dataset.partition(split);
    if (rows.empty()) {
        fail(Errc::kLengthMismatch, "partition '" + std::string(to_string(split)) + "' is empty");
    }
    const FeatureMatrix x = feature_matrix(dataset, split);
    const std::vector<double> predicted = predict(model, x);

    Evaluation out;
    if (target != Target::kTxnTime) {
        out.series.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out.series.push_back(SeriesPoint{rows[i].block_number, rows[i].timestamp, rows[i].target(target),
                                             rows[i].estimate(target), predicted[i]});
        }
    } else {
        if (horizon_blocks < 2) {
            fail(Errc::kInvalidConfig, "horizons need at least two blocks");
        }
        std::vector<std::size_t> heads;  // first row of each block
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == 0 || rows[i].block_number != rows[i - 1].block_number) {
                heads.push_back(i);
            }
        }
        for (std::size_t start = 0; start + horizon_blocks <= heads.size(); start += horizon_blocks) {
            std::vector<uint64_t> times;
            std::vector<double> actual;
            std::vector<double> estimated;
            FeatureMatrix contexts;
            contexts.names = x.names;
            for (std::size_t h = start; h < start + horizon_blocks; ++h) {
                const FeatureRow& r = rows[heads[h]];
                times.push_back(r.timestamp);
                actual.push_back(r.txn_fee);
                estimated.push_back(std::isfinite(r.est_txn_fee) ? r.est_txn_fee : HUGE_VAL);
                contexts.rows.push_back(r.features);
            }
            const uint64_t origin = times.front();
            const uint64_t best = predict_min_fee_time(model, times, contexts);
            out.series.push_back(SeriesPoint{rows[heads[start]].block_number, origin,
                                             static_cast<double>(times[argmin_first(actual)] - origin),
                                             static_cast<double>(times[argmin_first(estimated)] - origin),
                                             static_cast<double>(best - origin)});
        }
        if (out.series.empty()) {
            fail(Errc::kEmptyHorizon, "partition holds fewer than " + std::to_string(horizon_blocks) + " blocks");
        }
    }

    std::vector<double> a;
    std::vector<double> p;
    a.reserve(out.series.size());
    p.reserve(out.series.size());
    for (const auto& s : out.series) {
        a.push_back(s.actual);
        p.push_back(s.predicted);
    }
    out.model = evaluate(a, p);
    out.model.target = std::string(to_string(target));
    out.model.model = std::string(to_string(model.spec.kind));
    out.baseline = baseline_report(out.series);
    if (out.baseline) {
        out.baseline->target = out.model.target;
        out.baseline->model = "last_n_estimate";
    }
    return out;
}

}  // namespace ethmerge
