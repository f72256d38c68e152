// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ethmerge/baseline.hpp"
#include "ethmerge/error.hpp"
#include "ethmerge/rng.hpp"
#include "ethmerge/stats.hpp"

namespace ethmerge {

namespace {

    constexpr std::string_view kCongestionFeature = "gas_ratio";
    constexpr std::size_t kCalibrationBuckets = 10;
    constexpr std::size_t kMinBucketRows = 20;

    // Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Each index writes only
    // its own output slot, so results do not depend on the worker count.
    template <typename Fn>
    void parallel_for(std::size_t n, Fn&& fn) {
        const std::size_t workers = std::min<std::size_t>(n, std::max(1U, std::thread::hardware_concurrency()));
        if (workers <= 1) {
            for (std::size_t i = 0; i < n; ++i) {
                fn(i);
            }
            return;
        }
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) {
                        fn(i);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) {
            t.join();
        }
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    std::size_t as_count(double v) { return static_cast<std::size_t>(std::llround(v)); }

    LinearParams fit_linear(const FeatureMatrix& x, std::span<const double> y, std::vector<std::string>& notes) {
        const auto n = static_cast<Eigen::Index>(x.rows.size());
        const auto p = static_cast<Eigen::Index>(x.names.size());
        Eigen::MatrixXd a(n, p + 1);
        Eigen::VectorXd b(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            a(i, 0) = 1.0;
            for (Eigen::Index j = 0; j < p; ++j) {
                a(i, j + 1) = x.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
            b(i) = y[static_cast<std::size_t>(i)];
        }
        LinearParams out;
        Eigen::VectorXd beta;
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        if (qr.rank() == p + 1) {
            beta = qr.solve(b);
        } else {
            const Eigen::MatrixXd gram = a.transpose() * a;
            out.ridge_lambda = 1e-8 * std::max(1.0, gram.trace() / static_cast<double>(p + 1));
            const Eigen::MatrixXd reg = gram + out.ridge_lambda * Eigen::MatrixXd::Identity(p + 1, p + 1);
            beta = reg.ldlt().solve(a.transpose() * b);
            notes.push_back("rank-deficient design (rank " + std::to_string(qr.rank()) + " of " +
                            std::to_string(p + 1) + "); ridge fallback with lambda " + format_double(out.ridge_lambda));
        }
        out.intercept = beta(0);
        out.coefficients.assign(beta.data() + 1, beta.data() + beta.size());
        return out;
    }

    double knn_predict(const KnnParams& m, std::span<const double> row) {
        const std::size_t n = m.targets.size();
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double* r = m.rows.data() + i * m.dim;
            double d = 0.0;
            for (std::size_t j = 0; j < m.dim; ++j) {
                const double diff = r[j] - row[j];
                d += diff * diff;
            }
            dist[i] = {d, i};
        }
        const std::size_t k = std::min(m.k, n);
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            sum += m.targets[dist[i].second];
        }
        return sum / static_cast<double>(k);
    }

    double ensemble_predict(const EnsembleParams& m, std::span<const double> row) {
        double sum = 0.0;
        for (const auto& t : m.trees) {
            sum += t.predict(row);
        }
        if (m.average) {
            return m.trees.empty() ? m.init : sum / static_cast<double>(m.trees.size());
        }
        return m.init + m.learning_rate * sum;
    }

    EnsembleParams fit_forest(const ModelSpec& spec, const FeatureMatrix& x, std::span<const double> y) {
        const ColumnData data(x.rows);
        const bool extra = spec.kind == ModelKind::kExtraTrees;
        const bool bootstrap = !extra && spec.get("bootstrap") != 0.0;
        TreeParams params;
        params.max_depth = as_count(spec.get("max_depth"));
        params.min_leaf = spec.get("min_leaf");
        params.feature_fraction = spec.get("feature_fraction");
        params.random_thresholds = extra;
        const std::size_t n = y.size();
        EnsembleParams out;
        out.trees.resize(as_count(spec.get("n_estimators")));
        parallel_for(out.trees.size(), [&](std::size_t t) {
            const uint64_t tree_seed = derive_seed(spec.seed, t);
            std::vector<double> weight(n, 1.0);
            if (bootstrap) {
                Rng rng(tree_seed);
                std::fill(weight.begin(), weight.end(), 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    weight[rng.below(n)] += 1.0;
                }
            }
            std::vector<double> grad(n);
            for (std::size_t i = 0; i < n; ++i) {
                grad[i] = weight[i] * y[i];
            }
            out.trees[t] = build_tree(data, grad, weight, params, derive_seed(tree_seed, 1));
        });
        return out;
    }

    EnsembleParams fit_boosting(const ModelSpec& spec, const FeatureMatrix& x, std::span<const double> y,
                                std::vector<double>& stage_mse) {
        const ColumnData data(x.rows);
        const bool regularized = spec.kind == ModelKind::kGradientBoostingRegularized;
        TreeParams params;
        params.max_depth = as_count(spec.get("max_depth"));
        params.min_leaf = spec.get("min_leaf");
        params.l2_lambda = regularized ? spec.get("l2_lambda") : 0.0;
        const std::size_t n = y.size();

        EnsembleParams out;
        out.average = false;
        out.learning_rate = spec.get("learning_rate");
        const bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
        out.init = constant ? y[0] : mean(y);

        std::vector<double> pred(n, out.init);
        std::vector<double> residual(n);
        std::vector<double> sq(n);
        const std::vector<double> hessian(n, 1.0);
        const std::size_t stages = as_count(spec.get("n_estimators"));
        out.trees.reserve(stages);
        for (std::size_t s = 0; s < stages; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                residual[i] = y[i] - pred[i];
            }
            RegressionTree tree = build_tree(data, residual, hessian, params, derive_seed(spec.seed, s));
            for (std::size_t i = 0; i < n; ++i) {
                pred[i] += out.learning_rate * tree.predict(x.rows[i]);
                const double e = y[i] - pred[i];
                sq[i] = e * e;
            }
            stage_mse.push_back(pairwise_sum(sq) / static_cast<double>(n));
            out.trees.push_back(std::move(tree));
        }
        return out;
    }

    void check_names(const TrainedModel& model, const FeatureMatrix& rows) {
        if (rows.names != model.metadata.feature_names) {
            fail(Errc::kFeatureMismatch, "feature names/order differ from the training features");
        }
        const std::size_t width = rows.names.size();
        for (const auto& r : rows.rows) {
            if (r.size() != width) {
                fail(Errc::kFeatureMismatch, "row width differs from the feature count");
            }
        }
    }

    std::optional<CalibrationTable> calibrate(const TrainedModel& model, const FeatureMatrix& x,
                                              std::span<const double> y) {
        CalibrationTable table;
        for (int j = 0; j < 50; ++j) {
            table.grid.push_back(0.5 + j / 100.0);
        }
        std::optional<std::size_t> feature;
        const auto& names = model.metadata.feature_names;
        if (const auto it = std::find(names.begin(), names.end(), kCongestionFeature); it != names.end()) {
            feature = static_cast<std::size_t>(it - names.begin());
            table.feature = std::string(kCongestionFeature);
            std::vector<double> values;
            values.reserve(x.rows.size());
            for (const auto& r : x.rows) {
                values.push_back(r[*feature]);
            }
            std::sort(values.begin(), values.end());
            for (std::size_t d = 1; d < kCalibrationBuckets; ++d) {
                table.edges.push_back(percentile_sorted(values, static_cast<double>(d) / kCalibrationBuckets));
            }
        }
        const std::size_t n_buckets = table.edges.size() + 1;
        std::vector<std::vector<double>> ratios(n_buckets);
        std::vector<double> all;
        for (std::size_t i = 0; i < x.rows.size(); ++i) {
            const double pred = predict_row(model, x.rows[i]);
            if (!(pred > 0.0) || !(y[i] >= 0.0)) {
                continue;
            }
            const double ratio = y[i] / pred;
            const std::size_t b = feature ? table.bucket(x.rows[i][*feature]) : 0;
            ratios[b].push_back(ratio);
            all.push_back(ratio);
        }
        auto uplift_row = [&](std::vector<double>& r) -> std::optional<std::vector<double>> {
            std::sort(r.begin(), r.end());
            const double median = percentile_sorted(r, 0.5);
            if (!(median > 0.0)) {
                return std::nullopt;
            }
            std::vector<double> out;
            for (const double q : table.grid) {
                out.push_back(percentile_sorted(r, q) / median);
            }
            out.front() = 1.0;
            return out;
        };
        if (all.size() < kMinBucketRows) {
            return std::nullopt;
        }
        const auto global = uplift_row(all);
        if (!global) {
            return std::nullopt;
        }
        for (auto& r : ratios) {
            table.counts.push_back(r.size());
            std::optional<std::vector<double>> row;
            if (r.size() >= kMinBucketRows) {
                row = uplift_row(r);
            }
            table.uplift.push_back(row ? *row : *global);
        }
        return table;
    }

}  // namespace

FeatureMatrix feature_matrix(const Dataset& dataset, Split split) {
    FeatureMatrix m;
    m.names = dataset.config.names;
    const auto& rows = dataset.partition(split);
    m.rows.reserve(rows.size());
    for (const auto& r : rows) {
        m.rows.push_back(r.features);
    }
    return m;
}

std::vector<double> target_vector(const Dataset& dataset, Split split, Target target) {
    std::vector<double> out;
    for (const auto& r : dataset.partition(split)) {
        out.push_back(r.target(target));
    }
    return out;
}

std::size_t CalibrationTable::bucket(double x) const noexcept {
    return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

double CalibrationTable::uplift_at(std::size_t b, double q) const noexcept {
    const auto& row = uplift[std::min(b, uplift.size() - 1)];
    if (q <= grid.front()) {
        return row.front();
    }
    if (q >= grid.back()) {
        return row.back();
    }
    const auto hi = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), q) - grid.begin());
    const std::size_t lo = hi - 1;
    const double t = (q - grid[lo]) / (grid[hi] - grid[lo]);
    return row[lo] + t * (row[hi] - row[lo]);
}

TrainedModel train(const ModelSpec& spec, const FeatureMatrix& x, std::span<const double> y) {
    spec.validate();
    if (x.rows.size() != y.size()) {
        fail(Errc::kLengthMismatch, "feature rows and targets differ in length");
    }
    const std::size_t min_rows = spec.kind == ModelKind::kKnn ? std::max<std::size_t>(1, as_count(spec.get("k"))) : 1;
    if (y.size() < min_rows) {
        fail(Errc::kInvalidSpec, "too few training rows: " + std::to_string(y.size()));
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (x.rows[i].size() != x.names.size()) {
            fail(Errc::kFeatureMismatch, "row width differs from the feature count");
        }
        if (!std::isfinite(y[i]) ||
            !std::all_of(x.rows[i].begin(), x.rows[i].end(), [](double v) { return std::isfinite(v); })) {
            fail(Errc::kInvalidSpec, "training data contains non-finite values");
        }
    }

    TrainedModel model;
    model.spec = spec;
    model.spec.hyperparameters = spec.resolved();
    model.metadata.feature_names = x.names;
    model.metadata.train_rows = y.size();

    switch (spec.kind) {
        case ModelKind::kBaseline: {
            const std::size_t window = as_count(spec.get("window"));
            model.params = BaselineParams{baseline_estimate(y, y.size(), window)};
            break;
        }
        case ModelKind::kLinear: model.params = fit_linear(x, y, model.metadata.notes); break;
        case ModelKind::kKnn: {
            KnnParams p;
            p.k = as_count(spec.get("k"));
            p.dim = x.names.size();
            p.rows.reserve(p.dim * y.size());
            for (const auto& r : x.rows) {
                p.rows.insert(p.rows.end(), r.begin(), r.end());
            }
            p.targets.assign(y.begin(), y.end());
            model.params = std::move(p);
            break;
        }
        case ModelKind::kTree: {
            const ColumnData data(x.rows);
            TreeParams params;
            params.max_depth = as_count(spec.get("max_depth"));
            params.min_leaf = spec.get("min_leaf");
            const std::vector<double> ones(y.size(), 1.0);
            EnsembleParams p;
            p.trees.push_back(build_tree(data, y, ones, params, derive_seed(spec.seed, 0)));
            model.params = std::move(p);
            break;
        }
        case ModelKind::kRandomForest:
        case ModelKind::kExtraTrees: model.params = fit_forest(spec, x, y); break;
        case ModelKind::kGradientBoosting:
        case ModelKind::kGradientBoostingRegularized:
            model.params = fit_boosting(spec, x, y, model.metadata.stage_mse);
            break;
    }
    return model;
}

TrainedModel train(const ModelSpec& spec, const Dataset& dataset) {
    spec.validate();
    const std::size_t k = spec.kind == ModelKind::kKnn ? as_count(spec.get("k")) : 0;
    const std::size_t min_rows = std::max<std::size_t>(2 * k, 10);
    if (dataset.train.size() < min_rows) {
        fail(Errc::kInvalidSpec, "need at least " + std::to_string(min_rows) + " training rows, dataset has " +
                                     std::to_string(dataset.train.size()));
    }
    const FeatureMatrix x = feature_matrix(dataset, Split::kTrain);
    const std::vector<double> y = target_vector(dataset, Split::kTrain, spec.target);
    TrainedModel model = train(spec, x, y);
    model.metadata.feature_means = dataset.config.means;
    model.metadata.feature_stds = dataset.config.stds;
    model.metadata.train_first_block = dataset.train.front().block_number;
    model.metadata.train_last_block = dataset.train.back().block_number;
    model.metadata.fit_timestamp = dataset.train.back().timestamp;
    if (spec.target == Target::kTxnTime) {
        model.metadata.notes.push_back("txn_time regresses txn_fee; use predict_min_fee_time over a horizon");
    }
    if (spec.target == Target::kPriorityFee) {
        model.calibration = calibrate(model, x, y);
    }
    return model;
}

double predict_row(const TrainedModel& model, std::span<const double> row) {
    return std::visit(
        [&](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, BaselineParams>) {
                return p.value;
            } else if constexpr (std::is_same_v<P, LinearParams>) {
                double acc = p.intercept;
                for (std::size_t j = 0; j < p.coefficients.size(); ++j) {
                    acc += p.coefficients[j] * row[j];
                }
                return acc;
            } else if constexpr (std::is_same_v<P, KnnParams>) {
                return knn_predict(p, row);
            } else {
                return ensemble_predict(p, row);
            }
        },
        model.params);
}

std::vector<double> predict(const TrainedModel& model, const FeatureMatrix& rows) {
    check_names(model, rows);
    std::vector<double> out(rows.rows.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = predict_row(model, rows.rows[i]);
    }
    return out;
}

double recommend_priority_fee(const TrainedModel& model, const FeatureMatrix& context, double q) {
    if (model.spec.target != Target::kPriorityFee) {
        fail(Errc::kTargetMismatch, "recommendation needs a priority_fee model, got " +
                                        std::string(to_string(model.spec.target)));
    }
    if (!model.calibration) {
        fail(Errc::kUncalibratedModel, "model has no calibration table");
    }
    if (!(q >= 0.5 && q < 1.0)) {
        fail(Errc::kInvalidConfig, "uplift quantile must be in [0.5, 1)");
    }
    check_names(model, context);
    if (context.rows.size() != 1) {
        fail(Errc::kInvalidConfig, "recommendation needs exactly one context row");
    }
    const auto& row = context.rows.front();
    const CalibrationTable& table = *model.calibration;
    std::size_t b = 0;
    if (!table.feature.empty()) {
        const auto& names = model.metadata.feature_names;
        const auto it = std::find(names.begin(), names.end(), table.feature);
        if (it == names.end()) {
            fail(Errc::kUncalibratedModel, "calibration feature is not a model feature");
        }
        b = table.bucket(row[static_cast<std::size_t>(it - names.begin())]);
    }
    return predict_row(model, row) * table.uplift_at(b, q);
}

uint64_t predict_min_fee_time(const TrainedModel& model, std::span<const uint64_t> timestamps,
                              const FeatureMatrix& contexts) {
    if (model.spec.target != Target::kTxnFee && model.spec.target != Target::kTxnTime) {
        fail(Errc::kTargetMismatch, "best-time search needs a txn_fee model, got " +
                                        std::string(to_string(model.spec.target)));
    }
    if (timestamps.empty()) {
        fail(Errc::kEmptyHorizon, "forecast horizon is empty");
    }
    if (timestamps.size() != contexts.rows.size()) {
        fail(Errc::kLengthMismatch, "timestamps and contexts differ in length");
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (timestamps[i] <= timestamps[i - 1]) {
            fail(Errc::kInvalidConfig, "horizon timestamps must be strictly increasing");
        }
    }
    const std::vector<double> fees = predict(model, contexts);
    std::size_t best = 0;
    for (std::size_t i = 1; i < fees.size(); ++i) {
        if (fees[i] < fees[best]) {
            best = i;
        }
    }
    return timestamps[best];
}

// Serialization ---------------------------------------------------------------------------------

namespace {

    using nlohmann::json;

    json tree_to_json(const RegressionTree& tree) {
        json feature = json::array();
        json threshold = json::array();
        json left = json::array();
        json right = json::array();
        json value = json::array();
        for (const auto& n : tree.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            value.push_back(n.value);
        }
        return json{{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
    }

    RegressionTree tree_from_json(const json& j, std::size_t width) {
        const auto feature = j.at("feature").get<std::vector<int32_t>>();
        const auto threshold = j.at("threshold").get<std::vector<double>>();
        const auto left = j.at("left").get<std::vector<int32_t>>();
        const auto right = j.at("right").get<std::vector<int32_t>>();
        const auto value = j.at("value").get<std::vector<double>>();
        const std::size_t n = feature.size();
        if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) {
            fail(Errc::kCorruptModelFile, "tree arrays have inconsistent lengths");
        }
        RegressionTree tree;
        tree.nodes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            TreeNode& node = tree.nodes[i];
            node = TreeNode{feature[i], threshold[i], left[i], right[i], value[i]};
            if (node.feature >= 0) {
                // Children always follow their parent, which also rules out cycles.
                const auto in_range = [&](int32_t c) { return c > static_cast<int32_t>(i) && c < static_cast<int32_t>(n); };
                if (static_cast<std::size_t>(node.feature) >= width || !in_range(node.left) || !in_range(node.right)) {
                    fail(Errc::kCorruptModelFile, "tree node references are out of range");
                }
            }
        }
        return tree;
    }

    json params_to_json(const ModelParams& params) {
        return std::visit(
            [](const auto& p) -> json {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, BaselineParams>) {
                    return json{{"value", p.value}};
                } else if constexpr (std::is_same_v<P, LinearParams>) {
                    return json{{"intercept", p.intercept},
                                {"coefficients", p.coefficients},
                                {"ridge_lambda", p.ridge_lambda}};
                } else if constexpr (std::is_same_v<P, KnnParams>) {
                    return json{{"k", p.k}, {"dim", p.dim}, {"rows", p.rows}, {"targets", p.targets}};
                } else {
                    json trees = json::array();
                    for (const auto& t : p.trees) {
                        trees.push_back(tree_to_json(t));
                    }
                    return json{{"init", p.init},
                                {"learning_rate", p.learning_rate},
                                {"average", p.average},
                                {"trees", std::move(trees)}};
                }
            },
            params);
    }

    ModelParams params_from_json(ModelKind kind, const json& j, std::size_t width) {
        switch (kind) {
            case ModelKind::kBaseline: return BaselineParams{j.at("value").get<double>()};
            case ModelKind::kLinear: {
                LinearParams p;
                p.intercept = j.at("intercept").get<double>();
                p.coefficients = j.at("coefficients").get<std::vector<double>>();
                p.ridge_lambda = j.at("ridge_lambda").get<double>();
                if (p.coefficients.size() != width) {
                    fail(Errc::kCorruptModelFile, "coefficient count differs from feature count");
                }
                return p;
            }
            case ModelKind::kKnn: {
                KnnParams p;
                p.k = j.at("k").get<std::size_t>();
                p.dim = j.at("dim").get<std::size_t>();
                p.rows = j.at("rows").get<std::vector<double>>();
                p.targets = j.at("targets").get<std::vector<double>>();
                if (p.dim != width || p.k == 0 || p.targets.empty() || p.rows.size() != p.dim * p.targets.size()) {
                    fail(Errc::kCorruptModelFile, "neighbor table has inconsistent dimensions");
                }
                return p;
            }
            default: {
                EnsembleParams p;
                p.init = j.at("init").get<double>();
                p.learning_rate = j.at("learning_rate").get<double>();
                p.average = j.at("average").get<bool>();
                for (const auto& t : j.at("trees")) {
                    p.trees.push_back(tree_from_json(t, width));
                }
                return p;
            }
        }
    }

}  // namespace

std::string serialize_model(const TrainedModel& model) {
    const ModelMetadata& md = model.metadata;
    json hyper = json::object();
    for (const auto& [name, value] : model.spec.resolved()) {
        hyper[name] = value;
    }
    json calibration = nullptr;
    if (model.calibration) {
        const CalibrationTable& c = *model.calibration;
        calibration = json{{"feature", c.feature}, {"edges", c.edges}, {"grid", c.grid},
                           {"uplift", c.uplift},   {"counts", c.counts}};
    }
    const json doc{
        {"format_version", kModelFormatVersion},
        {"spec",
         {{"kind", to_string(model.spec.kind)},
          {"target", to_string(model.spec.target)},
          {"seed", model.spec.seed},
          {"hyperparameters", hyper}}},
        {"metadata",
         {{"feature_names", md.feature_names},
          {"feature_means", md.feature_means},
          {"feature_stds", md.feature_stds},
          {"train_first_block", md.train_first_block},
          {"train_last_block", md.train_last_block},
          {"fit_timestamp", md.fit_timestamp},
          {"train_rows", md.train_rows},
          {"stage_mse", md.stage_mse},
          {"notes", md.notes}}},
        {"parameters", params_to_json(model.params)},
        {"calibration", calibration},
    };
    return doc.dump() + "\n";
}

TrainedModel deserialize_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::kCorruptModelFile, std::string("model file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
        fail(Errc::kCorruptModelFile, "model file has no format_version");
    }
    const auto version = doc["format_version"].get<int64_t>();
    if (version != kModelFormatVersion) {
        fail(Errc::kVersionMismatch, "model format_version " + std::to_string(version) + " is not supported (expected " +
                                         std::to_string(kModelFormatVersion) + ")");
    }
    try {
        TrainedModel model;
        const json& spec = doc.at("spec");
        const auto kind = parse_model_kind(spec.at("kind").get<std::string>());
        const auto target = parse_target(spec.at("target").get<std::string>());
        if (!kind || !target) {
            fail(Errc::kCorruptModelFile, "unknown model kind or target");
        }
        model.spec.kind = *kind;
        model.spec.target = *target;
        model.spec.seed = spec.at("seed").get<uint64_t>();
        model.spec.hyperparameters = spec.at("hyperparameters").get<Hyperparameters>();
        try {
            model.spec.validate();
        } catch (const Error& e) {
            fail(Errc::kCorruptModelFile, std::string("invalid model spec: ") + e.what());
        }

        const json& md = doc.at("metadata");
        ModelMetadata& m = model.metadata;
        m.feature_names = md.at("feature_names").get<std::vector<std::string>>();
        m.feature_means = md.at("feature_means").get<std::vector<double>>();
        m.feature_stds = md.at("feature_stds").get<std::vector<double>>();
        m.train_first_block = md.at("train_first_block").get<uint64_t>();
        m.train_last_block = md.at("train_last_block").get<uint64_t>();
        m.fit_timestamp = md.at("fit_timestamp").get<uint64_t>();
        m.train_rows = md.at("train_rows").get<std::size_t>();
        m.stage_mse = md.at("stage_mse").get<std::vector<double>>();
        m.notes = md.at("notes").get<std::vector<std::string>>();

        model.params = params_from_json(model.spec.kind, doc.at("parameters"), m.feature_names.size());

        const json& cal = doc.at("calibration");
        if (!cal.is_null()) {
            CalibrationTable c;
            c.feature = cal.at("feature").get<std::string>();
            c.edges = cal.at("edges").get<std::vector<double>>();
            c.grid = cal.at("grid").get<std::vector<double>>();
            c.uplift = cal.at("uplift").get<std::vector<std::vector<double>>>();
            c.counts = cal.at("counts").get<std::vector<std::size_t>>();
            if (c.grid.empty() || c.uplift.size() != c.edges.size() + 1 ||
                std::any_of(c.uplift.begin(), c.uplift.end(), [&](const auto& r) { return r.size() != c.grid.size(); })) {
                fail(Errc::kCorruptModelFile, "calibration table has inconsistent dimensions");
            }
            model.calibration = std::move(c);
        }
        return model;
    } catch (const json::exception& e) {
        fail(Errc::kCorruptModelFile, std::string("model file is missing or mistyped fields: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(Errc::kIoFailure, "cannot write " + path.string());
    }
    out << serialize_model(model);
    out.close();
    if (!out) {
        fail(Errc::kIoFailure, "failed writing " + path.string());
    }
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(Errc::kIoFailure, "cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

}  // namespace ethmerge
