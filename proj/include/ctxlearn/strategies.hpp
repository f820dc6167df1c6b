// Context-exploitation strategies beyond normalization: contextual expansion
// (contextual columns join the primary block), contextual weighting (primary
// features scaled by the inter-class to intra-class deviation ratio computed
// per context group), and their composition into a deterministic pipeline
// with the fixed stage order normalize -> expand -> weight.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctxlearn/core.hpp"
#include "ctxlearn/normalize.hpp"

namespace ctxlearn::strategies {

/// Positive per-primary-feature weights, aligned with the primary columns of
/// the dataset they were computed on.
struct WeightVector {
    std::vector<std::string> feature_names;
    std::vector<double> weights;
};

/// Moves the named contextual columns into the primary block: the result's
/// primary columns are the original primaries followed by the selected
/// columns (now labeled Primary), then any remaining columns.
inline Dataset expand(const Dataset& dataset, const std::vector<std::string>& contextual_columns) {
    require_valid(dataset, "expand");
    if (contextual_columns.empty()) return dataset;

    std::vector<std::size_t> selected;
    for (const std::string& name : contextual_columns) {
        const int idx = dataset.schema.index_of(name);
        if (idx < 0) throw Error("expand: no column named '" + name + "'");
        if (dataset.schema.roles[static_cast<std::size_t>(idx)] != FeatureRole::Contextual) {
            throw Error("expand: column '" + name + "' is not contextual");
        }
        if (std::find(selected.begin(), selected.end(), static_cast<std::size_t>(idx)) !=
            selected.end()) {
            throw Error("expand: column '" + name + "' selected twice");
        }
        selected.push_back(static_cast<std::size_t>(idx));
    }

    std::vector<std::size_t> order = dataset.schema.indices_of(FeatureRole::Primary);
    const std::size_t original_primary = order.size();
    order.insert(order.end(), selected.begin(), selected.end());
    for (std::size_t col = 0; col < dataset.schema.size(); ++col) {
        if (std::find(order.begin(), order.end(), col) == order.end()) order.push_back(col);
    }

    Dataset out;
    out.schema.class_values = dataset.schema.class_values;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t col = order[pos];
        out.schema.names.push_back(dataset.schema.names[col]);
        out.schema.kinds.push_back(dataset.schema.kinds[col]);
        const bool promoted = pos >= original_primary && pos < original_primary + selected.size();
        out.schema.roles.push_back(promoted ? FeatureRole::Primary : dataset.schema.roles[col]);
    }
    out.observations.reserve(dataset.size());
    for (const Observation& obs : dataset.observations) {
        Observation moved = obs;
        moved.features = gather(obs, order);
        out.observations.push_back(std::move(moved));
    }
    return out;
}

/// weight_j = inter_j / intra_j where intra_j averages the per-(group, class)
/// cell deviation of feature j and inter_j averages the per-group deviation
/// pooled across classes.  Both sides are floored at kSigmaFloor.
inline WeightVector compute_weights(const Dataset& train) {
    require_valid(train, "compute_weights");
    const auto primary = train.schema.indices_of(FeatureRole::Primary);
    if (primary.empty()) throw Error("compute_weights: schema has no primary features");

    std::map<std::pair<int, int>, std::vector<const Observation*>> cells;  // (group, class)
    std::map<int, std::vector<const Observation*>> groups;
    for (const Observation& obs : train.observations) {
        if (obs.group == kNoGroup) {
            throw Error("compute_weights: every row needs a group tag");
        }
        cells[{obs.group, obs.label}].push_back(&obs);
        groups[obs.group].push_back(&obs);
    }
    if (cells.empty()) throw Error("compute_weights: no training rows");

    std::string small;
    for (const auto& [key, rows] : cells) {
        if (rows.size() < 2) {
            small += " (group " + std::to_string(key.first) + ", class " +
                     std::to_string(key.second) + ": " + std::to_string(rows.size()) + " rows)";
        }
    }
    if (!small.empty()) {
        throw Error("compute_weights: cells with fewer than 2 rows:" + small);
    }

    WeightVector out;
    std::vector<double> column;
    for (std::size_t idx : primary) {
        double intra_sum = 0.0;
        for (const auto& [key, rows] : cells) {
            column.clear();
            for (const Observation* obs : rows) column.push_back(obs->features[idx]);
            intra_sum += mean_stddev(column).stddev;
        }
        const double intra = intra_sum / static_cast<double>(cells.size());

        double inter_sum = 0.0;
        for (const auto& [group, rows] : groups) {
            column.clear();
            for (const Observation* obs : rows) column.push_back(obs->features[idx]);
            inter_sum += mean_stddev(column).stddev;
        }
        const double inter = inter_sum / static_cast<double>(groups.size());

        out.feature_names.push_back(train.schema.names[idx]);
        out.weights.push_back(std::max(inter, kSigmaFloor) / std::max(intra, kSigmaFloor));
    }
    return out;
}

/// Elementwise product over a primary feature vector.
inline std::vector<double> apply_weights(const WeightVector& weights,
                                         const std::vector<double>& primary_features) {
    if (weights.weights.size() != primary_features.size()) {
        throw Error("apply_weights: expected " + std::to_string(weights.weights.size()) +
                    " features, got " + std::to_string(primary_features.size()));
    }
    std::vector<double> out(primary_features.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = primary_features[i] * weights.weights[i];
    }
    return out;
}

struct PipelineConfig {
    bool use_normalization = false;
    normalize::EstimatorKind estimator = normalize::EstimatorKind::GroupStats;
    int estimator_k = 5;

    bool use_expansion = false;
    std::vector<std::string> expansion_columns;

    bool use_weighting = false;
};

enum class Side { Train, Test };

/// Fitted pipeline.  Weights are computed on the normalized, not yet
/// expanded training primaries, so expanded contextual columns keep weight 1.
struct Pipeline {
    PipelineConfig config;
    std::size_t original_primary_count = 0;
    std::optional<normalize::ContextEstimator> estimator;
    std::optional<WeightVector> weights;
};

inline Pipeline build_pipeline(const Dataset& train, const PipelineConfig& config) {
    require_valid(train, "build_pipeline");
    Pipeline pipeline;
    pipeline.config = config;
    pipeline.original_primary_count = train.schema.indices_of(FeatureRole::Primary).size();

    Dataset normalized = train;
    if (config.use_normalization) {
        normalize::EstimatorOptions options;
        options.k = config.estimator_k;
        pipeline.estimator = normalize::fit_context_estimator(train, config.estimator, options);
        normalized = normalize::apply_contextual(*pipeline.estimator, train);
    }
    if (config.use_weighting) {
        pipeline.weights = compute_weights(normalized);
    }
    return pipeline;
}

/// Applies the enabled stages in the fixed order.  On the test side with
/// group statistics, per-group (mu, sigma) are refitted from the incoming
/// rows themselves (features only; labels are never read), mirroring the
/// buffer-a-new-speaker procedure.
inline Dataset run_pipeline(const Pipeline& pipeline, const Dataset& dataset, Side side) {
    require_valid(dataset, "run_pipeline");
    Dataset out = dataset;
    const PipelineConfig& config = pipeline.config;

    if (config.use_normalization) {
        if (!pipeline.estimator) throw Error("run_pipeline: pipeline was built without fitting");
        if (side == Side::Test && config.estimator == normalize::EstimatorKind::GroupStats) {
            normalize::EstimatorOptions options;
            options.k = config.estimator_k;
            const auto transductive =
                normalize::fit_context_estimator(dataset, normalize::EstimatorKind::GroupStats,
                                                 options);
            out = normalize::apply_contextual(transductive, out);
        } else {
            out = normalize::apply_contextual(*pipeline.estimator, out);
        }
    }
    if (config.use_expansion) {
        out = expand(out, config.expansion_columns);
    }
    if (config.use_weighting) {
        if (!pipeline.weights) throw Error("run_pipeline: pipeline was built without weights");
        const auto primary = out.schema.indices_of(FeatureRole::Primary);
        if (pipeline.weights->weights.size() > primary.size()) {
            throw Error("run_pipeline: weight vector is wider than the primary block");
        }
        for (Observation& obs : out.observations) {
            for (std::size_t f = 0; f < pipeline.weights->weights.size(); ++f) {
                obs.features[primary[f]] *= pipeline.weights->weights[f];
            }
        }
    }
    return out;
}

}  // namespace ctxlearn::strategies
