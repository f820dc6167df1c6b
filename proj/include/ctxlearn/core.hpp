// Core data model: feature schema with per-column roles, observations,
// datasets, and the structural operations (validate / project / split_by)
// shared by every other module.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ctxlearn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Divisor floor for every stored or returned standard deviation.
inline constexpr double kSigmaFloor = 1e-6;

// Observation::group value meaning "no group tag".
inline constexpr int kNoGroup = -1;

enum class FeatureRole { Primary, Contextual, Irrelevant };
enum class FeatureKind { Continuous, Discrete };

inline const char* to_string(FeatureRole role) {
    switch (role) {
        case FeatureRole::Primary: return "primary";
        case FeatureRole::Contextual: return "contextual";
        case FeatureRole::Irrelevant: return "irrelevant";
    }
    return "unknown";
}

inline const char* to_string(FeatureKind kind) {
    return kind == FeatureKind::Continuous ? "continuous" : "discrete";
}

inline FeatureRole role_from_string(const std::string& text) {
    if (text == "primary") return FeatureRole::Primary;
    if (text == "contextual") return FeatureRole::Contextual;
    if (text == "irrelevant") return FeatureRole::Irrelevant;
    throw Error("unknown feature role: '" + text + "'");
}

inline FeatureKind kind_from_string(const std::string& text) {
    if (text == "continuous") return FeatureKind::Continuous;
    if (text == "discrete") return FeatureKind::Discrete;
    throw Error("unknown feature kind: '" + text + "'");
}

/// Names, roles and value kinds of all feature columns plus the finite
/// class-label domain.
struct FeatureSchema {
    std::vector<std::string> names;
    std::vector<FeatureRole> roles;
    std::vector<FeatureKind> kinds;
    std::vector<int> class_values;  // kept sorted ascending

    std::size_t size() const { return names.size(); }

    bool has_class(int label) const {
        return std::binary_search(class_values.begin(), class_values.end(), label);
    }

    std::vector<std::size_t> indices_of(FeatureRole role) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < roles.size(); ++i) {
            if (roles[i] == role) out.push_back(i);
        }
        return out;
    }

    // -1 when the name is absent.
    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return static_cast<int>(i);
        }
        return -1;
    }
};

/// One labeled row: the class label plus the feature vector.  `group` is an
/// out-of-vector discrete key (speaker identity, cold/warm half) that
/// estimators dispatch on directly; `baseline` marks healthy reference rows;
/// `holdout` marks rows the data source designates as test data.
struct Observation {
    int label = 0;
    std::vector<double> features;
    int group = kNoGroup;
    bool baseline = false;
    bool holdout = false;
};

/// Schema plus an ordered list of observations.  Treated as an immutable
/// value after construction; all operations return new datasets.
struct Dataset {
    FeatureSchema schema;
    std::vector<Observation> observations;

    std::size_t size() const { return observations.size(); }
    std::size_t feature_count() const { return schema.size(); }
};

struct ValidationIssue {
    // Row index of the offending observation; kSchemaIssue for problems with
    // the schema itself.
    static constexpr std::size_t kSchemaIssue = std::numeric_limits<std::size_t>::max();
    std::size_t row = kSchemaIssue;
    std::string message;
};

namespace detail {

inline bool is_integral_code(double value) {
    return std::isfinite(value) && value >= 0.0 && value == std::floor(value);
}

}  // namespace detail

/// Structural check of every observation against the schema.  An empty
/// result means the dataset is well formed.
inline std::vector<ValidationIssue> validate(const Dataset& dataset) {
    std::vector<ValidationIssue> issues;
    const FeatureSchema& schema = dataset.schema;

    if (schema.names.empty()) {
        issues.push_back({ValidationIssue::kSchemaIssue, "schema has no feature columns"});
    }
    if (schema.names.size() != schema.roles.size() || schema.names.size() != schema.kinds.size()) {
        issues.push_back({ValidationIssue::kSchemaIssue,
                          "schema names/roles/kinds have mismatched lengths"});
        return issues;
    }
    if (schema.class_values.empty()) {
        issues.push_back({ValidationIssue::kSchemaIssue, "schema has an empty class domain"});
    }
    if (!std::is_sorted(schema.class_values.begin(), schema.class_values.end())) {
        issues.push_back({ValidationIssue::kSchemaIssue, "schema class values are not sorted"});
    }

    const std::size_t n = schema.size();
    for (std::size_t row = 0; row < dataset.observations.size(); ++row) {
        const Observation& obs = dataset.observations[row];
        if (obs.features.size() != n) {
            issues.push_back({row, "expected " + std::to_string(n) + " features, got " +
                                       std::to_string(obs.features.size())});
            continue;
        }
        if (!schema.has_class(obs.label)) {
            issues.push_back({row, "label " + std::to_string(obs.label) +
                                       " is outside the class domain"});
        }
        for (std::size_t col = 0; col < n; ++col) {
            const double value = obs.features[col];
            if (!std::isfinite(value)) {
                issues.push_back({row, "non-finite value in column '" + schema.names[col] + "'"});
            } else if (schema.kinds[col] == FeatureKind::Discrete &&
                       !detail::is_integral_code(value)) {
                issues.push_back({row, "column '" + schema.names[col] +
                                           "' is discrete but holds " + std::to_string(value)});
            }
        }
    }
    return issues;
}

inline void require_valid(const Dataset& dataset, const std::string& what) {
    const auto issues = validate(dataset);
    if (!issues.empty()) {
        std::string message = what + ": invalid dataset:";
        for (const auto& issue : issues) {
            message += "\n  row ";
            message += issue.row == ValidationIssue::kSchemaIssue ? std::string("<schema>")
                                                                  : std::to_string(issue.row);
            message += ": " + issue.message;
        }
        throw Error(message);
    }
}

/// Keeps only the columns carrying `role`; row order, labels and tags are
/// preserved.  Throws when no column has the requested role.
inline Dataset project(const Dataset& dataset, FeatureRole role) {
    const auto keep = dataset.schema.indices_of(role);
    if (keep.empty()) {
        throw Error(std::string("project: no column has role '") + to_string(role) + "'");
    }
    Dataset out;
    out.schema.class_values = dataset.schema.class_values;
    for (std::size_t idx : keep) {
        out.schema.names.push_back(dataset.schema.names[idx]);
        out.schema.roles.push_back(dataset.schema.roles[idx]);
        out.schema.kinds.push_back(dataset.schema.kinds[idx]);
    }
    out.observations.reserve(dataset.size());
    for (const Observation& obs : dataset.observations) {
        Observation projected;
        projected.label = obs.label;
        projected.group = obs.group;
        projected.baseline = obs.baseline;
        projected.holdout = obs.holdout;
        projected.features.reserve(keep.size());
        for (std::size_t idx : keep) projected.features.push_back(obs.features[idx]);
        out.observations.push_back(std::move(projected));
    }
    return out;
}

/// Stable two-way partition: rows satisfying the predicate first, the rest
/// second; both share the schema.
template <typename Predicate>
std::pair<Dataset, Dataset> split_by(const Dataset& dataset, Predicate&& predicate) {
    Dataset hits, rest;
    hits.schema = dataset.schema;
    rest.schema = dataset.schema;
    for (const Observation& obs : dataset.observations) {
        (predicate(obs) ? hits : rest).observations.push_back(obs);
    }
    return {std::move(hits), std::move(rest)};
}

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n-1) convention; 0 when fewer than 2 values
};

// Sample mean and standard deviation, n-1 convention.
inline MeanStd mean_stddev(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return out;
    double ss = 0.0;
    for (double v : values) {
        const double d = v - out.mean;
        ss += d * d;
    }
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return out;
}

// Feature values of the given columns, in column-list order.
inline std::vector<double> gather(const Observation& obs, const std::vector<std::size_t>& columns) {
    std::vector<double> out;
    out.reserve(columns.size());
    for (std::size_t idx : columns) out.push_back(obs.features[idx]);
    return out;
}

}  // namespace ctxlearn
