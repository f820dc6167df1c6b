// Empirical detection of primary / contextual / irrelevant features on
// discrete data, driven by conditional-probability gaps in the plug-in joint
// distribution, plus the pairwise context-sensitivity relation between
// primary and contextual features.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctxlearn/core.hpp"

namespace ctxlearn::featrole {

inline constexpr double kDefaultTolerance = 1e-9;

struct DistributionOptions {
    // Upper bound on |C| * prod_i |values(x_i)|.
    std::size_t max_cells = 1'000'000;
    std::size_t max_features = 12;
};

/// Joint relative-frequency table over (label, features) for discrete data.
class EmpiricalDistribution {
public:
    struct Cell {
        int label = 0;
        std::vector<int> values;
        double count = 0.0;
    };

    EmpiricalDistribution(std::vector<Cell> cells, double total, std::vector<int> class_values,
                          std::vector<std::vector<int>> feature_values)
        : cells_(std::move(cells)),
          total_(total),
          class_values_(std::move(class_values)),
          feature_values_(std::move(feature_values)) {}

    std::size_t feature_count() const { return feature_values_.size(); }
    double total() const { return total_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<int>& class_values() const { return class_values_; }
    const std::vector<std::vector<int>>& feature_values() const { return feature_values_; }

    // Probability of an event described by an optional label constraint and
    // feature constraints (column index, required value).
    double prob(std::optional<int> label,
                const std::vector<std::pair<std::size_t, int>>& conditions = {}) const {
        double count = 0.0;
        for (const Cell& cell : cells_) {
            if (label && cell.label != *label) continue;
            bool match = true;
            for (const auto& [column, value] : conditions) {
                if (cell.values[column] != value) {
                    match = false;
                    break;
                }
            }
            if (match) count += cell.count;
        }
        return count / total_;
    }

private:
    std::vector<Cell> cells_;
    double total_;
    std::vector<int> class_values_;
    std::vector<std::vector<int>> feature_values_;
};

/// Builds the plug-in distribution.  Every feature must be discrete and the
/// dense table size must stay within the configured cell budget.
inline EmpiricalDistribution estimate_distribution(const Dataset& dataset,
                                                   const DistributionOptions& options = {}) {
    require_valid(dataset, "estimate_distribution");
    if (dataset.size() == 0) throw Error("estimate_distribution: empty dataset");
    const FeatureSchema& schema = dataset.schema;
    if (schema.size() > options.max_features) {
        throw Error("estimate_distribution: " + std::to_string(schema.size()) +
                    " features exceed the limit of " + std::to_string(options.max_features));
    }
    for (std::size_t col = 0; col < schema.size(); ++col) {
        if (schema.kinds[col] != FeatureKind::Discrete) {
            throw Error("estimate_distribution: column '" + schema.names[col] +
                        "' is continuous; role detection needs discrete data");
        }
    }

    std::map<std::pair<int, std::vector<int>>, double> counts;
    std::vector<std::vector<int>> feature_values(schema.size());
    for (const Observation& obs : dataset.observations) {
        std::vector<int> key(schema.size());
        for (std::size_t col = 0; col < schema.size(); ++col) {
            key[col] = static_cast<int>(obs.features[col]);
            auto& known = feature_values[col];
            if (std::find(known.begin(), known.end(), key[col]) == known.end()) {
                known.push_back(key[col]);
            }
        }
        counts[{obs.label, std::move(key)}] += 1.0;
    }
    for (auto& values : feature_values) std::sort(values.begin(), values.end());

    std::size_t dense_cells = schema.class_values.size();
    for (const auto& values : feature_values) {
        if (values.empty()) continue;
        if (dense_cells > options.max_cells / values.size()) {
            throw Error("estimate_distribution: joint table exceeds the cell budget of " +
                        std::to_string(options.max_cells));
        }
        dense_cells *= values.size();
    }

    std::vector<EmpiricalDistribution::Cell> cells;
    cells.reserve(counts.size());
    for (const auto& [key, count] : counts) {
        cells.push_back({key.first, key.second, count});
    }
    return EmpiricalDistribution(std::move(cells), static_cast<double>(dataset.size()),
                                 schema.class_values, std::move(feature_values));
}

struct PrimaryWitness {
    bool primary = false;
    int class_value = 0;    // a0 realizing the largest gap
    int feature_value = 0;  // a_i realizing the largest gap
    double gap = 0.0;
};

/// Largest gap |p(x0=a0 | xi=ai) - p(x0=a0)| over assignments with a
/// positive-probability conditioning event.
inline PrimaryWitness is_primary(const EmpiricalDistribution& dist, std::size_t feature_index,
                                 double tolerance) {
    if (feature_index >= dist.feature_count()) {
        throw Error("is_primary: feature index out of range");
    }
    if (tolerance < 0.0) throw Error("is_primary: negative tolerance");
    PrimaryWitness witness;
    for (int value : dist.feature_values()[feature_index]) {
        const double condition_prob = dist.prob(std::nullopt, {{feature_index, value}});
        if (condition_prob <= 0.0) continue;
        for (int label : dist.class_values()) {
            const double joint = dist.prob(label, {{feature_index, value}});
            const double conditional = joint / condition_prob;
            const double marginal = dist.prob(label);
            const double gap = std::abs(conditional - marginal);
            if (gap > witness.gap) {
                witness.gap = gap;
                witness.class_value = label;
                witness.feature_value = value;
            }
        }
    }
    witness.primary = witness.gap > tolerance;
    return witness;
}

struct ContextualWitness {
    bool contextual = false;
    bool excluded_as_primary = false;  // feature is primary, so not contextual
    int class_value = 0;
    std::vector<int> assignment;  // the full feature assignment realizing the gap
    double gap = 0.0;
};

/// A non-primary feature is contextual when, for some supported assignment,
/// conditioning on all features shifts the class probability relative to
/// conditioning on all features but this one.
inline ContextualWitness is_contextual(const EmpiricalDistribution& dist,
                                       std::size_t feature_index, double tolerance) {
    if (feature_index >= dist.feature_count()) {
        throw Error("is_contextual: feature index out of range");
    }
    ContextualWitness witness;
    if (is_primary(dist, feature_index, tolerance).primary) {
        witness.excluded_as_primary = true;
        return witness;
    }
    const std::size_t n = dist.feature_count();
    for (const auto& cell : dist.cells()) {
        if (cell.count <= 0.0) continue;
        std::vector<std::pair<std::size_t, int>> all_fixed;
        std::vector<std::pair<std::size_t, int>> others_fixed;
        all_fixed.reserve(n);
        others_fixed.reserve(n - 1);
        for (std::size_t col = 0; col < n; ++col) {
            all_fixed.emplace_back(col, cell.values[col]);
            if (col != feature_index) others_fixed.emplace_back(col, cell.values[col]);
        }
        const double with_all = dist.prob(cell.label, all_fixed) / dist.prob(std::nullopt, all_fixed);
        const double without_i =
            dist.prob(cell.label, others_fixed) / dist.prob(std::nullopt, others_fixed);
        const double gap = std::abs(with_all - without_i);
        if (gap > witness.gap) {
            witness.gap = gap;
            witness.class_value = cell.label;
            witness.assignment = cell.values;
        }
    }
    witness.contextual = witness.gap > tolerance;
    return witness;
}

struct SensitivityWitness {
    std::size_t primary_index = 0;
    std::size_t contextual_index = 0;
    bool sensitive = false;
    int class_value = 0;
    int primary_value = 0;
    int contextual_value = 0;
    double gap = 0.0;
};

struct FeatureFinding {
    std::string name;
    FeatureRole role = FeatureRole::Irrelevant;
    double gap = 0.0;  // gap achieved by the test that assigned the role
    PrimaryWitness primary;
    ContextualWitness contextual;
};

struct RoleReport {
    std::vector<FeatureFinding> features;
    std::vector<SensitivityWitness> pairs;  // one entry per (primary, contextual) pair
};

namespace detail {

inline SensitivityWitness sensitivity_pair(const EmpiricalDistribution& dist,
                                           std::size_t primary_index,
                                           std::size_t contextual_index, double tolerance) {
    SensitivityWitness witness;
    witness.primary_index = primary_index;
    witness.contextual_index = contextual_index;
    for (int primary_value : dist.feature_values()[primary_index]) {
        const double p_primary = dist.prob(std::nullopt, {{primary_index, primary_value}});
        if (p_primary <= 0.0) continue;
        for (int contextual_value : dist.feature_values()[contextual_index]) {
            const double p_both = dist.prob(
                std::nullopt, {{primary_index, primary_value}, {contextual_index, contextual_value}});
            if (p_both <= 0.0) continue;
            for (int label : dist.class_values()) {
                const double with_context =
                    dist.prob(label,
                              {{primary_index, primary_value}, {contextual_index, contextual_value}}) /
                    p_both;
                const double without_context =
                    dist.prob(label, {{primary_index, primary_value}}) / p_primary;
                const double gap = std::abs(with_context - without_context);
                if (gap > witness.gap) {
                    witness.gap = gap;
                    witness.class_value = label;
                    witness.primary_value = primary_value;
                    witness.contextual_value = contextual_value;
                }
            }
        }
    }
    witness.sensitive = witness.gap > tolerance;
    return witness;
}

}  // namespace detail

/// Assigns each feature exactly one role and evaluates the sensitivity
/// relation for every (primary, contextual) pair.
inline RoleReport classify_roles(const Dataset& dataset, double tolerance = kDefaultTolerance,
                                 const DistributionOptions& options = {}) {
    const EmpiricalDistribution dist = estimate_distribution(dataset, options);
    RoleReport report;
    std::vector<std::size_t> primaries, contextuals;
    for (std::size_t col = 0; col < dist.feature_count(); ++col) {
        FeatureFinding finding;
        finding.name = dataset.schema.names[col];
        finding.primary = is_primary(dist, col, tolerance);
        if (finding.primary.primary) {
            finding.role = FeatureRole::Primary;
            finding.gap = finding.primary.gap;
            primaries.push_back(col);
        } else {
            finding.contextual = is_contextual(dist, col, tolerance);
            if (finding.contextual.contextual) {
                finding.role = FeatureRole::Contextual;
                finding.gap = finding.contextual.gap;
                contextuals.push_back(col);
            } else {
                finding.role = FeatureRole::Irrelevant;
                finding.gap = std::max(finding.primary.gap, finding.contextual.gap);
            }
        }
        report.features.push_back(std::move(finding));
    }
    for (std::size_t primary_index : primaries) {
        for (std::size_t contextual_index : contextuals) {
            report.pairs.push_back(
                detail::sensitivity_pair(dist, primary_index, contextual_index, tolerance));
        }
    }
    return report;
}

}  // namespace ctxlearn::featrole
