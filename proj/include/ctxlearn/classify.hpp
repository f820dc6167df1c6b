// The two classifiers (nearest neighbor and one-vs-rest indicator linear
// regression), contextual classifier selection on a discrete context column,
// and evaluation with confusion counts.
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ctxlearn/core.hpp"
#include "ctxlearn/linalg.hpp"

namespace ctxlearn::classify {

struct EvalResult {
    std::size_t correct = 0;
    std::size_t total = 0;
    double accuracy = 0.0;
    std::map<std::pair<int, int>, std::size_t> confusion;  // (actual, predicted) -> count
};

namespace detail {

inline std::vector<double> primary_of(const Dataset& dataset, std::size_t row,
                                      std::size_t expected_width) {
    const auto primary = dataset.schema.indices_of(FeatureRole::Primary);
    if (primary.size() != expected_width) {
        throw Error("predict: dataset has " + std::to_string(primary.size()) +
                    " primary features, model expects " + std::to_string(expected_width));
    }
    return gather(dataset.observations[row], primary);
}

}  // namespace detail

enum class Distance { Euclidean, Manhattan };

inline const char* to_string(Distance distance) {
    return distance == Distance::Euclidean ? "l2" : "l1";
}

inline Distance distance_from_string(const std::string& text) {
    if (text == "l2" || text == "euclidean") return Distance::Euclidean;
    if (text == "l1" || text == "manhattan") return Distance::Manhattan;
    throw Error("unknown distance: '" + text + "'");
}

/// Nearest-neighbor classifier over the stored training rows; Euclidean or
/// absolute-difference distance on the primary features.  Distance ties break
/// toward the lowest training-row index; with k > 1, vote ties break toward
/// the lowest label.
struct NearestNeighborModel {
    int k = 1;
    Distance distance = Distance::Euclidean;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;

    int predict(const std::vector<double>& primary_features) const {
        if (rows.empty()) throw Error("nn_predict: empty model");
        if (primary_features.size() != rows.front().size()) {
            throw Error("nn_predict: expected " + std::to_string(rows.front().size()) +
                        " features, got " + std::to_string(primary_features.size()));
        }
        if (k <= 1) {
            double best = row_distance(rows[0], primary_features);
            std::size_t best_row = 0;
            for (std::size_t row = 1; row < rows.size(); ++row) {
                const double dist = row_distance(rows[row], primary_features);
                if (dist < best) {
                    best = dist;
                    best_row = row;
                }
            }
            return labels[best_row];
        }
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(rows.size());
        for (std::size_t row = 0; row < rows.size(); ++row) {
            order.emplace_back(row_distance(rows[row], primary_features), row);
        }
        std::sort(order.begin(), order.end());
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), rows.size());
        std::map<int, std::size_t> votes;
        for (std::size_t i = 0; i < take; ++i) votes[labels[order[i].second]] += 1;
        int best_label = votes.begin()->first;
        std::size_t best_count = votes.begin()->second;
        for (const auto& [label, count] : votes) {
            if (count > best_count) {
                best_label = label;
                best_count = count;
            }
        }
        return best_label;
    }

    int predict_row(const Dataset& dataset, std::size_t row) const {
        return predict(detail::primary_of(dataset, row, rows.empty() ? 0 : rows.front().size()));
    }

private:
    double row_distance(const std::vector<double>& a, const std::vector<double>& b) const {
        double sum = 0.0;
        if (distance == Distance::Euclidean) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double d = a[i] - b[i];
                sum += d * d;
            }
        } else {
            for (std::size_t i = 0; i < a.size(); ++i) {
                sum += std::abs(a[i] - b[i]);
            }
        }
        return sum;
    }
};

inline NearestNeighborModel nn_fit(const Dataset& train, int k = 1,
                                   Distance distance = Distance::Euclidean) {
    require_valid(train, "nn_fit");
    if (train.size() == 0) throw Error("nn_fit: empty training set");
    if (k < 1) throw Error("nn_fit: k must be positive");
    const auto primary = train.schema.indices_of(FeatureRole::Primary);
    if (primary.empty()) throw Error("nn_fit: schema has no primary features");
    NearestNeighborModel model;
    model.k = k;
    model.distance = distance;
    model.rows.reserve(train.size());
    model.labels.reserve(train.size());
    for (const Observation& obs : train.observations) {
        model.rows.push_back(gather(obs, primary));
        model.labels.push_back(obs.label);
    }
    return model;
}

/// One-vs-rest indicator regression: for each class a least-squares fit of
/// the 0/1 indicator on the primary features with intercept; prediction is
/// the class with the largest fitted response, ties toward the lowest class.
/// Rank-deficient designs are solved minimum-norm and flagged.
struct LinearModel {
    std::vector<int> classes;  // ascending
    std::vector<std::vector<double>> coefficients;  // per class: intercept, then weights
    int rank = 0;
    bool rank_deficient = false;
    std::vector<double> residual_norms;

    std::size_t feature_width() const {
        return coefficients.empty() ? 0 : coefficients.front().size() - 1;
    }

    double response(const std::vector<double>& primary_features, std::size_t class_pos) const {
        const std::vector<double>& coef = coefficients[class_pos];
        double value = coef[0];
        for (std::size_t i = 0; i < primary_features.size(); ++i) {
            value += coef[i + 1] * primary_features[i];
        }
        return value;
    }

    int predict(const std::vector<double>& primary_features) const {
        if (coefficients.empty()) throw Error("mlr_predict: empty model");
        if (primary_features.size() != feature_width()) {
            throw Error("mlr_predict: expected " + std::to_string(feature_width()) +
                        " features, got " + std::to_string(primary_features.size()));
        }
        std::size_t best = 0;
        double best_response = response(primary_features, 0);
        for (std::size_t pos = 1; pos < classes.size(); ++pos) {
            const double value = response(primary_features, pos);
            if (value > best_response) {
                best_response = value;
                best = pos;
            }
        }
        return classes[best];
    }

    int predict_row(const Dataset& dataset, std::size_t row) const {
        return predict(detail::primary_of(dataset, row, feature_width()));
    }
};

inline LinearModel mlr_fit(const Dataset& train) {
    require_valid(train, "mlr_fit");
    if (train.size() == 0) throw Error("mlr_fit: empty training set");
    const auto primary = train.schema.indices_of(FeatureRole::Primary);
    if (primary.empty()) throw Error("mlr_fit: schema has no primary features");

    LinearModel model;
    model.classes = train.schema.class_values;

    std::vector<std::vector<double>> rows;
    rows.reserve(train.size());
    for (const Observation& obs : train.observations) rows.push_back(gather(obs, primary));
    const Eigen::MatrixXd design = linalg::design_with_intercept(rows);

    Eigen::MatrixXd indicators(static_cast<Eigen::Index>(train.size()),
                               static_cast<Eigen::Index>(model.classes.size()));
    for (std::size_t r = 0; r < train.size(); ++r) {
        for (std::size_t c = 0; c < model.classes.size(); ++c) {
            indicators(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                train.observations[r].label == model.classes[c] ? 1.0 : 0.0;
        }
    }

    const linalg::LeastSquares solution = linalg::solve_least_squares(design, indicators);
    model.rank = static_cast<int>(solution.rank);
    model.rank_deficient = solution.rank_deficient;
    model.residual_norms = solution.residual_norms;
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        std::vector<double> coef(primary.size() + 1);
        for (std::size_t i = 0; i <= primary.size(); ++i) {
            coef[i] = solution.coefficients(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(c));
        }
        model.coefficients.push_back(std::move(coef));
    }
    return model;
}

enum class BaseKind { NearestNeighbor, LinearRegression };

inline const char* to_string(BaseKind kind) {
    return kind == BaseKind::NearestNeighbor ? "nn" : "mlr";
}

/// Strategy-3 dispatcher: one specialized classifier per discrete context
/// value (when that context has enough rows), plus a global fallback that
/// also serves unseen contexts.
struct SelectionModel {
    using Base = std::variant<NearestNeighborModel, LinearModel>;

    std::size_t context_column = 0;
    std::string context_name;
    std::map<int, Base> specialized;
    Base fallback;

    int predict(const std::vector<double>& primary_features, int context_value) const {
        const auto it = specialized.find(context_value);
        const Base& base = it != specialized.end() ? it->second : fallback;
        return std::visit([&](const auto& model) { return model.predict(primary_features); },
                          base);
    }

    int predict_row(const Dataset& dataset, std::size_t row) const {
        const Observation& obs = dataset.observations[row];
        const int idx = dataset.schema.index_of(context_name);
        if (idx < 0) throw Error("selection_predict: no column named '" + context_name + "'");
        const int context_value = static_cast<int>(obs.features[static_cast<std::size_t>(idx)]);
        const auto primary = dataset.schema.indices_of(FeatureRole::Primary);
        std::vector<double> features = gather(obs, primary);
        return predict(features, context_value);
    }
};

inline SelectionModel selection_fit(const Dataset& train, const std::string& context_column,
                                    BaseKind base, int k = 1,
                                    Distance distance = Distance::Euclidean) {
    require_valid(train, "selection_fit");
    const int idx = train.schema.index_of(context_column);
    if (idx < 0) throw Error("selection_fit: no column named '" + context_column + "'");
    const auto column = static_cast<std::size_t>(idx);
    if (train.schema.kinds[column] != FeatureKind::Discrete) {
        throw Error("selection_fit: context column '" + context_column + "' must be discrete");
    }

    SelectionModel model;
    model.context_column = column;
    model.context_name = context_column;

    const auto fit_base = [&](const Dataset& subset) -> SelectionModel::Base {
        if (base == BaseKind::NearestNeighbor) return nn_fit(subset, k, distance);
        return mlr_fit(subset);
    };
    model.fallback = fit_base(train);

    std::map<int, std::vector<std::size_t>> by_context;
    for (std::size_t row = 0; row < train.size(); ++row) {
        by_context[static_cast<int>(train.observations[row].features[column])].push_back(row);
    }
    const std::size_t min_rows = train.schema.class_values.size();
    for (const auto& [context_value, row_indices] : by_context) {
        if (row_indices.size() < min_rows) continue;  // folds into the fallback
        Dataset subset;
        subset.schema = train.schema;
        for (std::size_t row : row_indices) subset.observations.push_back(train.observations[row]);
        model.specialized.emplace(context_value, fit_base(subset));
    }
    return model;
}

/// Exact correct counts and a confusion table over the test rows.
template <typename Model>
EvalResult evaluate(const Model& model, const Dataset& test) {
    require_valid(test, "evaluate");
    EvalResult result;
    result.total = test.size();
    for (std::size_t row = 0; row < test.size(); ++row) {
        const int predicted = model.predict_row(test, row);
        const int actual = test.observations[row].label;
        result.confusion[{actual, predicted}] += 1;
        if (predicted == actual) result.correct += 1;
    }
    result.accuracy = result.total == 0
                          ? 0.0
                          : static_cast<double>(result.correct) / static_cast<double>(result.total);
    return result;
}

}  // namespace ctxlearn::classify
