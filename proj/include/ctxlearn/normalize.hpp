// Feature normalization: four context-free baselines (min/max, average and
// deviation, percentile, baseline average and deviation) and contextual
// normalization v_i = (x_i - mu_i(c)) / sigma_i(c) with pluggable estimators
// for mu and sigma (per-group statistics, nearest-neighbor regression, or
// linear regression on the context).
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctxlearn/core.hpp"
#include "ctxlearn/linalg.hpp"

namespace ctxlearn::normalize {

enum class Method { None, MinMax, AvgDev, Percentile, BaselineAvgDev, Contextual };
enum class EstimatorKind { GroupStats, KnnRegress, LinearRegress };

inline const char* to_string(Method method) {
    switch (method) {
        case Method::None: return "none";
        case Method::MinMax: return "minmax";
        case Method::AvgDev: return "avgdev";
        case Method::Percentile: return "percentile";
        case Method::BaselineAvgDev: return "baseline-avgdev";
        case Method::Contextual: return "contextual";
    }
    return "unknown";
}

inline Method method_from_string(const std::string& text) {
    if (text == "none") return Method::None;
    if (text == "minmax") return Method::MinMax;
    if (text == "avgdev") return Method::AvgDev;
    if (text == "percentile") return Method::Percentile;
    if (text == "baseline-avgdev") return Method::BaselineAvgDev;
    if (text == "contextual") return Method::Contextual;
    throw Error("unknown normalization method: '" + text + "'");
}

inline const char* to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::GroupStats: return "group";
        case EstimatorKind::KnnRegress: return "knn";
        case EstimatorKind::LinearRegress: return "linear";
    }
    return "unknown";
}

inline EstimatorKind estimator_from_string(const std::string& text) {
    if (text == "group") return EstimatorKind::GroupStats;
    if (text == "knn") return EstimatorKind::KnnRegress;
    if (text == "linear") return EstimatorKind::LinearRegress;
    throw Error("unknown estimator kind: '" + text + "'");
}

/// Per-feature location and spread for one context query.  sigma entries are
/// always >= kSigmaFloor.
struct MuSigma {
    std::vector<double> mu;
    std::vector<double> sigma;
};

struct EstimatorOptions {
    int k = 5;                    // neighbor count for knn-regress
    bool global_fallback = false;  // group-stats: map unknown groups to global statistics
};

/// Fitted predictor mapping a context (discrete group tag or continuous
/// context vector) to per-primary-feature (mu, sigma).
struct ContextEstimator {
    EstimatorKind kind = EstimatorKind::GroupStats;
    std::vector<std::size_t> primary_indices;  // columns of the fitted schema it transforms
    std::vector<std::size_t> context_indices;  // continuous contextual columns (knn/linear)

    // group-stats
    std::map<int, MuSigma> group_stats;
    bool global_fallback = false;
    MuSigma global_stats;

    // knn-regress
    int k = 5;
    std::vector<std::vector<double>> reference_contexts;  // raw context vectors, row order
    std::vector<std::vector<double>> reference_features;  // matching primary values
    std::vector<double> context_center;                   // per-dimension standardization
    std::vector<double> context_scale;

    // linear-regress
    std::vector<std::vector<double>> coefficients;  // per feature: intercept, then slopes
    std::vector<double> residual_sigma;
    bool intercept_fallback = false;  // design matrix was singular; slopes dropped

    MuSigma at_group(int group) const {
        if (kind != EstimatorKind::GroupStats) {
            throw Error("context estimator: group queries need the group-stats kind");
        }
        const auto it = group_stats.find(group);
        if (it != group_stats.end()) return it->second;
        if (global_fallback) return global_stats;
        throw Error("context estimator: unknown group " + std::to_string(group) +
                    " and no fallback is configured");
    }

    MuSigma at_context(const std::vector<double>& context) const {
        if (kind == EstimatorKind::GroupStats) {
            throw Error("context estimator: group-stats needs a group tag, not a context vector");
        }
        if (context.size() != context_indices.size()) {
            throw Error("context estimator: context has " + std::to_string(context.size()) +
                        " dimensions, expected " + std::to_string(context_indices.size()));
        }
        if (kind == EstimatorKind::LinearRegress) {
            MuSigma out;
            out.mu.reserve(coefficients.size());
            for (const auto& coef : coefficients) {
                double mu = coef[0];
                for (std::size_t d = 0; d < context.size(); ++d) mu += coef[d + 1] * context[d];
                out.mu.push_back(mu);
            }
            out.sigma = residual_sigma;
            return out;
        }
        return knn_query(context);
    }

private:
    MuSigma knn_query(const std::vector<double>& context) const {
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(reference_contexts.size());
        for (std::size_t row = 0; row < reference_contexts.size(); ++row) {
            double dist = 0.0;
            for (std::size_t d = 0; d < context.size(); ++d) {
                const double delta = (context[d] - context_center[d]) / context_scale[d] -
                                     (reference_contexts[row][d] - context_center[d]) / context_scale[d];
                dist += delta * delta;
            }
            order.emplace_back(dist, row);
        }
        std::sort(order.begin(), order.end());
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
        std::vector<std::size_t> selected;
        selected.reserve(take);
        for (std::size_t i = 0; i < take; ++i) selected.push_back(order[i].second);
        std::sort(selected.begin(), selected.end());  // accumulate in stable row order

        MuSigma out;
        const std::size_t width = reference_features.empty() ? 0 : reference_features.front().size();
        std::vector<double> column;
        column.reserve(take);
        for (std::size_t f = 0; f < width; ++f) {
            column.clear();
            for (std::size_t row : selected) column.push_back(reference_features[row][f]);
            const MeanStd stats = mean_stddev(column);
            out.mu.push_back(stats.mean);
            out.sigma.push_back(std::max(stats.stddev, kSigmaFloor));
        }
        return out;
    }
};

/// Fitted transform for one of the six methods.  Plain methods carry their
/// per-feature parameters; the contextual method carries an estimator.
struct NormalizationModel {
    Method method = Method::None;
    std::vector<std::size_t> primary_indices;
    std::vector<std::string> primary_names;

    std::vector<double> min_value, max_value;      // minmax
    std::vector<double> mean_value, stddev_value;  // avgdev / baseline-avgdev
    std::vector<std::vector<double>> sorted_values;  // percentile, ascending per feature

    std::optional<ContextEstimator> estimator;  // contextual
};

namespace detail {

inline std::vector<std::size_t> primary_columns_or_throw(const Dataset& dataset,
                                                         const std::string& what) {
    const auto primary = dataset.schema.indices_of(FeatureRole::Primary);
    if (primary.empty()) throw Error(what + ": schema has no primary features");
    return primary;
}

inline std::vector<std::size_t> continuous_context_columns(const Dataset& dataset) {
    std::vector<std::size_t> out;
    for (std::size_t col = 0; col < dataset.schema.size(); ++col) {
        if (dataset.schema.roles[col] == FeatureRole::Contextual &&
            dataset.schema.kinds[col] == FeatureKind::Continuous) {
            out.push_back(col);
        }
    }
    return out;
}

// Mid-rank percentile: fraction strictly below plus half the tied mass.
inline double percentile_of(const std::vector<double>& sorted, double value) {
    const auto lower = std::lower_bound(sorted.begin(), sorted.end(), value);
    const auto upper = std::upper_bound(sorted.begin(), sorted.end(), value);
    const double below = static_cast<double>(lower - sorted.begin());
    const double tied = static_cast<double>(upper - lower);
    const double fraction = (below + 0.5 * tied) / static_cast<double>(sorted.size());
    return std::clamp(fraction, 0.0, 1.0);
}

}  // namespace detail

/// Fits one of the context-free methods (Method::None yields the identity).
/// Per-feature degeneracies (constant range, vanishing deviation) are
/// collected and reported together.
inline NormalizationModel fit_plain(const Dataset& train, Method method) {
    require_valid(train, "fit_plain");
    if (method == Method::Contextual) {
        throw Error("fit_plain: contextual normalization is fitted via fit_context_estimator");
    }
    NormalizationModel model;
    model.method = method;
    model.primary_indices = detail::primary_columns_or_throw(train, "fit_plain");
    for (std::size_t idx : model.primary_indices) {
        model.primary_names.push_back(train.schema.names[idx]);
    }
    if (method == Method::None) return model;

    const bool baseline_only = method == Method::BaselineAvgDev;
    std::vector<const Observation*> rows;
    for (const Observation& obs : train.observations) {
        if (!baseline_only || obs.baseline) rows.push_back(&obs);
    }
    if (baseline_only && rows.size() < 2) {
        throw Error("fit_plain: baseline-avgdev needs at least 2 baseline-flagged rows, got " +
                    std::to_string(rows.size()));
    }
    if (rows.empty()) throw Error("fit_plain: no training rows");

    std::string problems;
    std::vector<double> column;
    column.reserve(rows.size());
    for (std::size_t f = 0; f < model.primary_indices.size(); ++f) {
        const std::size_t idx = model.primary_indices[f];
        column.clear();
        for (const Observation* obs : rows) column.push_back(obs->features[idx]);
        switch (method) {
            case Method::MinMax: {
                const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
                if (*lo == *hi) {
                    problems += "\n  feature '" + model.primary_names[f] + "' is constant (" +
                                std::to_string(*lo) + ")";
                }
                model.min_value.push_back(*lo);
                model.max_value.push_back(*hi);
                break;
            }
            case Method::AvgDev:
            case Method::BaselineAvgDev: {
                const MeanStd stats = mean_stddev(column);
                if (stats.stddev < kSigmaFloor) {
                    problems += "\n  feature '" + model.primary_names[f] +
                                "' has standard deviation below the floor";
                }
                model.mean_value.push_back(stats.mean);
                model.stddev_value.push_back(stats.stddev);
                break;
            }
            case Method::Percentile: {
                std::sort(column.begin(), column.end());
                model.sorted_values.push_back(column);
                break;
            }
            default: break;
        }
    }
    if (!problems.empty()) {
        throw Error("fit_plain(" + std::string(to_string(method)) + "):" + problems);
    }
    return model;
}

/// Transforms a full feature vector with a plain model; contextual columns
/// pass through untouched.
inline std::vector<double> apply_plain(const NormalizationModel& model,
                                       const std::vector<double>& features) {
    if (model.method == Method::Contextual) {
        throw Error("apply_plain: contextual models are applied via contextual_normalize");
    }
    std::vector<double> out = features;
    for (std::size_t f = 0; f < model.primary_indices.size(); ++f) {
        const std::size_t idx = model.primary_indices[f];
        if (idx >= out.size()) throw Error("apply_plain: feature vector is too short");
        switch (model.method) {
            case Method::None:
                break;
            case Method::MinMax:
                out[idx] = (out[idx] - model.min_value[f]) / (model.max_value[f] - model.min_value[f]);
                break;
            case Method::AvgDev:
            case Method::BaselineAvgDev:
                out[idx] = (out[idx] - model.mean_value[f]) / model.stddev_value[f];
                break;
            case Method::Percentile:
                out[idx] = detail::percentile_of(model.sorted_values[f], out[idx]);
                break;
            default:
                break;
        }
    }
    return out;
}

/// Fits a context estimator.  Group statistics use every row keyed by its
/// group tag; knn and linear regression fit on the baseline-flagged rows
/// against the continuous contextual columns.
inline ContextEstimator fit_context_estimator(const Dataset& train, EstimatorKind kind,
                                              const EstimatorOptions& options = {}) {
    require_valid(train, "fit_context_estimator");
    ContextEstimator estimator;
    estimator.kind = kind;
    estimator.primary_indices = detail::primary_columns_or_throw(train, "fit_context_estimator");

    if (kind == EstimatorKind::GroupStats) {
        estimator.global_fallback = options.global_fallback;
        std::map<int, std::vector<const Observation*>> groups;
        for (const Observation& obs : train.observations) {
            if (obs.group == kNoGroup) {
                throw Error("fit_context_estimator: group-stats needs a group tag on every row");
            }
            groups[obs.group].push_back(&obs);
        }
        if (groups.empty()) throw Error("fit_context_estimator: no rows");
        std::string small;
        for (const auto& [group, rows] : groups) {
            if (rows.size() < 2) small += " " + std::to_string(group);
        }
        if (!small.empty()) {
            throw Error("fit_context_estimator: groups with fewer than 2 rows:" + small);
        }
        std::vector<double> column;
        for (const auto& [group, rows] : groups) {
            MuSigma stats;
            for (std::size_t idx : estimator.primary_indices) {
                column.clear();
                for (const Observation* obs : rows) column.push_back(obs->features[idx]);
                const MeanStd ms = mean_stddev(column);
                stats.mu.push_back(ms.mean);
                stats.sigma.push_back(std::max(ms.stddev, kSigmaFloor));
            }
            estimator.group_stats.emplace(group, std::move(stats));
        }
        for (std::size_t idx : estimator.primary_indices) {
            column.clear();
            for (const Observation& obs : train.observations) column.push_back(obs.features[idx]);
            const MeanStd ms = mean_stddev(column);
            estimator.global_stats.mu.push_back(ms.mean);
            estimator.global_stats.sigma.push_back(std::max(ms.stddev, kSigmaFloor));
        }
        return estimator;
    }

    estimator.context_indices = detail::continuous_context_columns(train);
    if (estimator.context_indices.empty()) {
        throw Error("fit_context_estimator: schema has no continuous contextual columns");
    }
    const std::size_t dim = estimator.context_indices.size();
    estimator.k = options.k;
    if (options.k < 1) throw Error("fit_context_estimator: k must be positive");

    std::vector<const Observation*> rows;
    for (const Observation& obs : train.observations) {
        if (obs.baseline) rows.push_back(&obs);
    }
    const std::size_t required =
        kind == EstimatorKind::KnnRegress
            ? std::max<std::size_t>(static_cast<std::size_t>(options.k), dim + 2)
            : dim + 2;
    if (rows.size() < required) {
        throw Error("fit_context_estimator: needs at least " + std::to_string(required) +
                    " baseline rows, got " + std::to_string(rows.size()));
    }

    std::vector<std::vector<double>> contexts, primaries;
    contexts.reserve(rows.size());
    primaries.reserve(rows.size());
    for (const Observation* obs : rows) {
        contexts.push_back(gather(*obs, estimator.context_indices));
        primaries.push_back(gather(*obs, estimator.primary_indices));
    }

    if (kind == EstimatorKind::KnnRegress) {
        estimator.reference_contexts = std::move(contexts);
        estimator.reference_features = std::move(primaries);
        std::vector<double> column(estimator.reference_contexts.size());
        for (std::size_t d = 0; d < dim; ++d) {
            for (std::size_t row = 0; row < estimator.reference_contexts.size(); ++row) {
                column[row] = estimator.reference_contexts[row][d];
            }
            const MeanStd ms = mean_stddev(column);
            estimator.context_center.push_back(ms.mean);
            estimator.context_scale.push_back(ms.stddev > kSigmaFloor ? ms.stddev : 1.0);
        }
        return estimator;
    }

    // linear-regress: one least-squares solve with all features as targets
    const Eigen::MatrixXd design = linalg::design_with_intercept(contexts);
    Eigen::MatrixXd targets(static_cast<Eigen::Index>(primaries.size()),
                            static_cast<Eigen::Index>(estimator.primary_indices.size()));
    for (std::size_t r = 0; r < primaries.size(); ++r) {
        for (std::size_t f = 0; f < estimator.primary_indices.size(); ++f) {
            targets(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = primaries[r][f];
        }
    }
    const linalg::LeastSquares solution = linalg::solve_least_squares(design, targets);
    if (solution.rank_deficient) {
        // Singular context design: drop the slopes and keep intercept-only fits.
        estimator.intercept_fallback = true;
        std::vector<double> column(primaries.size());
        for (std::size_t f = 0; f < estimator.primary_indices.size(); ++f) {
            for (std::size_t r = 0; r < primaries.size(); ++r) column[r] = primaries[r][f];
            const MeanStd ms = mean_stddev(column);
            std::vector<double> coef(dim + 1, 0.0);
            coef[0] = ms.mean;
            estimator.coefficients.push_back(std::move(coef));
            estimator.residual_sigma.push_back(std::max(ms.stddev, kSigmaFloor));
        }
        return estimator;
    }
    const double dof = std::max<double>(1.0, static_cast<double>(rows.size()) -
                                                 static_cast<double>(design.cols()));
    for (std::size_t f = 0; f < estimator.primary_indices.size(); ++f) {
        std::vector<double> coef(dim + 1);
        for (std::size_t c = 0; c <= dim; ++c) {
            coef[c] = solution.coefficients(static_cast<Eigen::Index>(c),
                                            static_cast<Eigen::Index>(f));
        }
        estimator.coefficients.push_back(std::move(coef));
        const double residual = solution.residual_norms[f];
        estimator.residual_sigma.push_back(
            std::max(std::sqrt(residual * residual / dof), kSigmaFloor));
    }
    return estimator;
}

namespace detail {

inline std::vector<double> apply_musigma(const std::vector<double>& features,
                                         const std::vector<std::size_t>& primary_indices,
                                         const MuSigma& stats) {
    std::vector<double> out = features;
    for (std::size_t f = 0; f < primary_indices.size(); ++f) {
        const std::size_t idx = primary_indices[f];
        if (idx >= out.size()) throw Error("contextual_normalize: feature vector is too short");
        out[idx] = (out[idx] - stats.mu[f]) / stats.sigma[f];
    }
    return out;
}

}  // namespace detail

/// v_i = (x_i - mu_i(c)) / sigma_i(c) over the primary features, with the
/// context given as a continuous vector.
inline std::vector<double> contextual_normalize(const ContextEstimator& estimator,
                                                const std::vector<double>& features,
                                                const std::vector<double>& context) {
    return detail::apply_musigma(features, estimator.primary_indices,
                                 estimator.at_context(context));
}

/// Same transform with the context given as a discrete group tag.
inline std::vector<double> contextual_normalize(const ContextEstimator& estimator,
                                                const std::vector<double>& features, int group) {
    return detail::apply_musigma(features, estimator.primary_indices, estimator.at_group(group));
}

/// Dataset-wide contextual normalization; each row is transformed with the
/// (mu, sigma) its own context selects.
inline Dataset apply_contextual(const ContextEstimator& estimator, const Dataset& dataset) {
    Dataset out = dataset;
    for (Observation& obs : out.observations) {
        if (estimator.kind == EstimatorKind::GroupStats) {
            obs.features = contextual_normalize(estimator, obs.features, obs.group);
        } else {
            const std::vector<double> context = gather(obs, estimator.context_indices);
            obs.features = contextual_normalize(estimator, obs.features, context);
        }
    }
    return out;
}

/// Dataset-wide application of any fitted model.
inline Dataset apply(const NormalizationModel& model, const Dataset& dataset) {
    if (model.method == Method::Contextual) {
        if (!model.estimator) throw Error("apply: contextual model has no estimator");
        return apply_contextual(*model.estimator, dataset);
    }
    Dataset out = dataset;
    for (Observation& obs : out.observations) obs.features = apply_plain(model, obs.features);
    return out;
}

inline NormalizationModel make_contextual_model(ContextEstimator estimator) {
    NormalizationModel model;
    model.method = Method::Contextual;
    model.primary_indices = estimator.primary_indices;
    model.estimator = std::move(estimator);
    return model;
}

// --- serialization (round-trip exact: doubles survive via shortest-exact
// --- encoding in the JSON layer)

inline void to_json(nlohmann::json& j, const MuSigma& stats) {
    j = nlohmann::json{{"mu", stats.mu}, {"sigma", stats.sigma}};
}

inline void from_json(const nlohmann::json& j, MuSigma& stats) {
    j.at("mu").get_to(stats.mu);
    j.at("sigma").get_to(stats.sigma);
}

inline void to_json(nlohmann::json& j, const ContextEstimator& estimator) {
    j = nlohmann::json{
        {"kind", to_string(estimator.kind)},
        {"primary_indices", estimator.primary_indices},
        {"context_indices", estimator.context_indices},
        {"global_fallback", estimator.global_fallback},
        {"global_stats", estimator.global_stats},
        {"k", estimator.k},
        {"reference_contexts", estimator.reference_contexts},
        {"reference_features", estimator.reference_features},
        {"context_center", estimator.context_center},
        {"context_scale", estimator.context_scale},
        {"coefficients", estimator.coefficients},
        {"residual_sigma", estimator.residual_sigma},
        {"intercept_fallback", estimator.intercept_fallback},
    };
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& [group, stats] : estimator.group_stats) {
        groups.push_back(nlohmann::json{{"group", group}, {"stats", stats}});
    }
    j["group_stats"] = std::move(groups);
}

inline void from_json(const nlohmann::json& j, ContextEstimator& estimator) {
    estimator.kind = estimator_from_string(j.at("kind").get<std::string>());
    j.at("primary_indices").get_to(estimator.primary_indices);
    j.at("context_indices").get_to(estimator.context_indices);
    j.at("global_fallback").get_to(estimator.global_fallback);
    j.at("global_stats").get_to(estimator.global_stats);
    j.at("k").get_to(estimator.k);
    j.at("reference_contexts").get_to(estimator.reference_contexts);
    j.at("reference_features").get_to(estimator.reference_features);
    j.at("context_center").get_to(estimator.context_center);
    j.at("context_scale").get_to(estimator.context_scale);
    j.at("coefficients").get_to(estimator.coefficients);
    j.at("residual_sigma").get_to(estimator.residual_sigma);
    j.at("intercept_fallback").get_to(estimator.intercept_fallback);
    estimator.group_stats.clear();
    for (const auto& entry : j.at("group_stats")) {
        estimator.group_stats.emplace(entry.at("group").get<int>(),
                                      entry.at("stats").get<MuSigma>());
    }
}

inline void to_json(nlohmann::json& j, const NormalizationModel& model) {
    j = nlohmann::json{
        {"method", to_string(model.method)},
        {"primary_indices", model.primary_indices},
        {"primary_names", model.primary_names},
        {"min", model.min_value},
        {"max", model.max_value},
        {"mean", model.mean_value},
        {"stddev", model.stddev_value},
        {"sorted_values", model.sorted_values},
    };
    if (model.estimator) j["estimator"] = *model.estimator;
}

inline void from_json(const nlohmann::json& j, NormalizationModel& model) {
    model.method = method_from_string(j.at("method").get<std::string>());
    j.at("primary_indices").get_to(model.primary_indices);
    j.at("primary_names").get_to(model.primary_names);
    j.at("min").get_to(model.min_value);
    j.at("max").get_to(model.max_value);
    j.at("mean").get_to(model.mean_value);
    j.at("stddev").get_to(model.stddev_value);
    j.at("sorted_values").get_to(model.sorted_values);
    if (j.contains("estimator")) model.estimator = j.at("estimator").get<ContextEstimator>();
}

}  // namespace ctxlearn::normalize
