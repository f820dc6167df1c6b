// Experiment harness behind the CLI: empirical role detection on a file, the
// eight-combination strategy sweep on the vowel data, and the two-fold
// normalization comparison on synthetic context-shift data.
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctxlearn/classify.hpp"
#include "ctxlearn/core.hpp"
#include "ctxlearn/data.hpp"
#include "ctxlearn/featrole.hpp"
#include "ctxlearn/normalize.hpp"
#include "ctxlearn/report.hpp"
#include "ctxlearn/strategies.hpp"

namespace ctxlearn::experiments {

struct StrategySet {
    bool normalization = false;
    bool expansion = false;
    bool weighting = false;
    bool selection = false;
};

/// Parses a comma-separated strategy list.  Tokens: norm, expand, weight,
/// select.  The empty string selects no strategy.
inline StrategySet parse_strategies(const std::string& spec) {
    StrategySet set;
    std::string token;
    std::istringstream in(spec);
    while (std::getline(in, token, ',')) {
        if (token.empty()) continue;
        if (token == "norm") {
            set.normalization = true;
        } else if (token == "expand") {
            set.expansion = true;
        } else if (token == "weight") {
            set.weighting = true;
        } else if (token == "select") {
            set.selection = true;
        } else {
            throw Error("unknown strategy token: '" + token + "'");
        }
    }
    return set;
}

inline std::string describe_combo(const StrategySet& set, const std::string& selection_column) {
    const auto yes_no = [](bool flag) { return flag ? "yes" : "no"; };
    std::string out = "norm=";
    out += yes_no(set.normalization);
    out += " expand=";
    out += yes_no(set.expansion);
    out += " weight=";
    out += yes_no(set.weighting);
    if (set.selection) out += " select=" + selection_column;
    return out;
}

struct VowelOptions {
    std::string strategies_spec = "all-combos";  // csv tokens or "all-combos"
    std::string classifier = "nn";               // nn | mlr
    normalize::EstimatorKind estimator = normalize::EstimatorKind::GroupStats;
    int k = 1;
    // Absolute-difference distance reproduces the published reference counts
    // for this benchmark; Euclidean is available via --distance l2.
    classify::Distance distance = classify::Distance::Manhattan;
    std::string selection_column = "sex";
    std::vector<std::string> expansion_columns = {"sex"};
};

/// One strategy combination: pipeline on train and test, then fit/evaluate
/// the chosen classifier.
inline classify::EvalResult run_vowel_combo(const Dataset& train, const Dataset& test,
                                            const StrategySet& set, const VowelOptions& options) {
    strategies::PipelineConfig config;
    config.use_normalization = set.normalization;
    config.estimator = options.estimator;
    config.estimator_k = options.k;
    config.use_expansion = set.expansion;
    config.expansion_columns = options.expansion_columns;
    config.use_weighting = set.weighting;

    const strategies::Pipeline pipeline = strategies::build_pipeline(train, config);
    const Dataset train_out = strategies::run_pipeline(pipeline, train, strategies::Side::Train);
    const Dataset test_out = strategies::run_pipeline(pipeline, test, strategies::Side::Test);

    if (set.selection) {
        const classify::BaseKind base = options.classifier == "mlr"
                                            ? classify::BaseKind::LinearRegression
                                            : classify::BaseKind::NearestNeighbor;
        const classify::SelectionModel model = classify::selection_fit(
            train_out, options.selection_column, base, options.k, options.distance);
        return classify::evaluate(model, test_out);
    }
    if (options.classifier == "mlr") {
        return classify::evaluate(classify::mlr_fit(train_out), test_out);
    }
    if (options.classifier != "nn") {
        throw Error("unknown classifier: '" + options.classifier + "'");
    }
    return classify::evaluate(classify::nn_fit(train_out, options.k, options.distance), test_out);
}

/// The strategy sweep on the vowel data.  "all-combos" emits the eight
/// on/off combinations in canonical order (normalization slowest bit,
/// weighting fastest).
inline report::ExperimentReport run_vowel(const Dataset& vowel, const VowelOptions& options) {
    require_valid(vowel, "run_vowel");
    const auto [test, train] = split_by(vowel, [](const Observation& obs) { return obs.holdout; });
    if (train.size() == 0 || test.size() == 0) {
        throw Error("run_vowel: the holdout flag does not split the data");
    }

    report::ExperimentReport report;
    report.title = "vowel strategy sweep (classifier=" + options.classifier +
                   " distance=" + classify::to_string(options.distance) +
                   " estimator=" + normalize::to_string(options.estimator) + ")";
    report.dataset_fingerprint = data::fingerprint(vowel);
    report.strategy_order = "normalize,expand,weight";

    std::vector<StrategySet> combos;
    if (options.strategies_spec == "all-combos") {
        for (int n = 0; n <= 1; ++n) {
            for (int e = 0; e <= 1; ++e) {
                for (int w = 0; w <= 1; ++w) {
                    StrategySet set;
                    set.normalization = n != 0;
                    set.expansion = e != 0;
                    set.weighting = w != 0;
                    combos.push_back(set);
                }
            }
        }
    } else {
        combos.push_back(parse_strategies(options.strategies_spec));
    }

    for (const StrategySet& set : combos) {
        const classify::EvalResult eval = run_vowel_combo(train, test, set, options);
        report.rows.push_back(
            {describe_combo(set, options.selection_column), eval.correct, eval.total});
    }
    return report;
}

struct SyntheticOptions {
    data::ShiftScenario scenario = data::default_scenario();
    int k = 1;           // nearest-neighbor classifier
    int estimator_k = 5;  // knn context estimator
    classify::Distance distance = classify::Distance::Euclidean;
};

inline const std::vector<std::string>& synthetic_normalizations() {
    static const std::vector<std::string> kNames = {
        "none",    "minmax",          "avgdev",         "percentile",
        "baseline-avgdev", "contextual-knn", "contextual-linear"};
    return kNames;
}

namespace detail {

inline std::pair<Dataset, Dataset> normalize_fold(const std::string& name, const Dataset& full,
                                                  const Dataset& train_fold,
                                                  const Dataset& test_fold, int estimator_k) {
    using normalize::EstimatorKind;
    using normalize::Method;
    if (name == "none") return {train_fold, test_fold};
    if (name == "minmax" || name == "avgdev" || name == "percentile") {
        const auto model = normalize::fit_plain(train_fold, normalize::method_from_string(name));
        return {normalize::apply(model, train_fold), normalize::apply(model, test_fold)};
    }
    if (name == "baseline-avgdev") {
        // The baseline reference set spans both context ranges by design.
        const auto model = normalize::fit_plain(full, Method::BaselineAvgDev);
        return {normalize::apply(model, train_fold), normalize::apply(model, test_fold)};
    }
    normalize::EstimatorOptions options;
    options.k = estimator_k;
    const EstimatorKind kind = name == "contextual-knn" ? EstimatorKind::KnnRegress
                                                        : EstimatorKind::LinearRegress;
    const auto estimator = normalize::fit_context_estimator(full, kind, options);
    return {normalize::apply_contextual(estimator, train_fold),
            normalize::apply_contextual(estimator, test_fold)};
}

}  // namespace detail

/// Two-fold protocol on the synthetic data: train on the cold half and test
/// on the warm half, swap, and sum the correct counts.  One row per
/// (classifier, normalization) pair.
inline report::ExperimentReport run_synthetic(const SyntheticOptions& options) {
    const Dataset full = data::generate_shift(options.scenario);
    const auto [cold, warm] = split_by(full, [](const Observation& obs) { return obs.group == 0; });

    report::ExperimentReport report;
    report.title = "synthetic context-shift normalization comparison";
    report.seed = options.scenario.seed;
    report.dataset_fingerprint = data::fingerprint(full);
    report.strategy_order = "two-fold: cold->warm + warm->cold";

    for (const std::string& classifier : {std::string("nn"), std::string("mlr")}) {
        for (const std::string& name : synthetic_normalizations()) {
            std::size_t correct = 0, total = 0;
            for (int fold = 0; fold < 2; ++fold) {
                const Dataset& train_fold = fold == 0 ? cold : warm;
                const Dataset& test_fold = fold == 0 ? warm : cold;
                const auto [train_out, test_out] = detail::normalize_fold(
                    name, full, train_fold, test_fold, options.estimator_k);
                classify::EvalResult eval;
                if (classifier == "nn") {
                    eval = classify::evaluate(
                        classify::nn_fit(train_out, options.k, options.distance), test_out);
                } else {
                    eval = classify::evaluate(classify::mlr_fit(train_out), test_out);
                }
                correct += eval.correct;
                total += eval.total;
            }
            report.rows.push_back({"classifier=" + classifier + " norm=" + name, correct, total});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Role detection driver
// ---------------------------------------------------------------------------

inline std::string render_role_report(const featrole::RoleReport& report,
                                      const Dataset& dataset) {
    std::ostringstream out;
    std::size_t width = 8;
    for (const auto& finding : report.features) width = std::max(width, finding.name.size());
    out << std::left << std::setw(static_cast<int>(width)) << "feature" << "  role        gap\n";
    for (const auto& finding : report.features) {
        out << std::left << std::setw(static_cast<int>(width)) << finding.name << "  "
            << std::setw(10) << to_string(finding.role) << "  " << finding.gap << '\n';
    }
    if (!report.pairs.empty()) {
        out << "context-sensitivity pairs:\n";
        for (const auto& pair : report.pairs) {
            out << "  " << dataset.schema.names[pair.primary_index] << " x "
                << dataset.schema.names[pair.contextual_index] << ": "
                << (pair.sensitive ? "sensitive" : "not sensitive") << " (gap " << pair.gap
                << ", class " << pair.class_value << ", values " << pair.primary_value << "/"
                << pair.contextual_value << ")\n";
        }
    }
    return out.str();
}

inline std::string role_report_records(const featrole::RoleReport& report,
                                       const Dataset& dataset) {
    std::ostringstream out;
    for (const auto& finding : report.features) {
        nlohmann::json record{{"record", "feature"},
                              {"name", finding.name},
                              {"role", to_string(finding.role)},
                              {"gap", finding.gap}};
        if (finding.role == FeatureRole::Primary) {
            record["witness"] = {{"class", finding.primary.class_value},
                                 {"value", finding.primary.feature_value}};
        } else if (finding.role == FeatureRole::Contextual) {
            record["witness"] = {{"class", finding.contextual.class_value},
                                 {"assignment", finding.contextual.assignment}};
        }
        out << record.dump() << '\n';
    }
    for (const auto& pair : report.pairs) {
        nlohmann::json record{{"record", "pair"},
                              {"primary", dataset.schema.names[pair.primary_index]},
                              {"contextual", dataset.schema.names[pair.contextual_index]},
                              {"sensitive", pair.sensitive},
                              {"gap", pair.gap},
                              {"class", pair.class_value},
                              {"primary_value", pair.primary_value},
                              {"contextual_value", pair.contextual_value}};
        out << record.dump() << '\n';
    }
    return out.str();
}

}  // namespace ctxlearn::experiments
