// Dataset ingestion: the speaker-labeled vowel recognition file, a canonical
// CSV dump/load for interchange, and a seeded synthetic generator that plants
// a controllable context shift between a "cold" and a "warm" context range.
#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "ctxlearn/core.hpp"
#include "ctxlearn/rng.hpp"

namespace ctxlearn::data {

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
            if (!current.empty()) {
                fields.push_back(std::move(current));
                current.clear();
            }
        } else {
            current += c;
        }
    }
    if (!current.empty()) fields.push_back(std::move(current));
    return fields;
}

inline double parse_number(const std::string& token, std::size_t line_number) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw Error("line " + std::to_string(line_number) + ": cannot parse '" + token +
                    "' as a number");
    }
    if (!std::isfinite(value)) {
        throw Error("line " + std::to_string(line_number) + ": non-finite value '" + token + "'");
    }
    return value;
}

inline int parse_code(const std::string& token, std::size_t line_number, const char* what) {
    const double value = parse_number(token, line_number);
    if (value != std::floor(value)) {
        throw Error("line " + std::to_string(line_number) + ": " + what + " must be an integer, got '" +
                    token + "'");
    }
    return static_cast<int>(value);
}

inline std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) throw Error("format_double: conversion failed");
    return std::string(buffer, ptr);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Vowel recognition data
// ---------------------------------------------------------------------------

/// Zero-based column positions in the raw vowel file.  The default matches
/// the UCI distribution: split flag, speaker, sex, ten spectral features,
/// class.
struct VowelColumnMap {
    std::size_t split = 0;
    std::size_t speaker = 1;
    std::size_t sex = 2;
    std::size_t features_begin = 3;  // ten consecutive feature columns
    std::size_t class_column = 13;
};

struct VowelLoadOptions {
    VowelColumnMap columns;
};

inline constexpr std::size_t kVowelFeatureCount = 10;
inline constexpr std::size_t kVowelClassCount = 11;
inline constexpr std::size_t kVowelExpectedRows = 990;
inline constexpr std::size_t kVowelExpectedTrainRows = 528;
inline constexpr std::size_t kVowelExpectedTestRows = 462;

/// Loads the vowel file: ten continuous primary features, speaker and sex as
/// discrete contextual columns, speaker doubling as the group tag, and the
/// file's split flag recorded as the holdout marker.  Count mismatches
/// against the canonical 990/528/462 layout are reported as warnings.
inline Dataset load_vowel(const std::string& path, const VowelLoadOptions& options = {},
                          std::vector<std::string>* warnings = nullptr) {
    std::ifstream input(path);
    if (!input) throw Error("load_vowel: cannot open '" + path + "'");

    const VowelColumnMap& map = options.columns;
    const std::size_t needed = std::max({map.split, map.speaker, map.sex,
                                         map.features_begin + kVowelFeatureCount - 1,
                                         map.class_column}) +
                               1;

    Dataset dataset;
    for (std::size_t f = 0; f < kVowelFeatureCount; ++f) {
        dataset.schema.names.push_back("f" + std::to_string(f));
        dataset.schema.roles.push_back(FeatureRole::Primary);
        dataset.schema.kinds.push_back(FeatureKind::Continuous);
    }
    dataset.schema.names.push_back("speaker");
    dataset.schema.roles.push_back(FeatureRole::Contextual);
    dataset.schema.kinds.push_back(FeatureKind::Discrete);
    dataset.schema.names.push_back("sex");
    dataset.schema.roles.push_back(FeatureRole::Contextual);
    dataset.schema.kinds.push_back(FeatureKind::Discrete);
    for (std::size_t c = 0; c < kVowelClassCount; ++c) {
        dataset.schema.class_values.push_back(static_cast<int>(c));
    }

    std::string line;
    std::size_t line_number = 0;
    std::size_t train_rows = 0, test_rows = 0;
    while (std::getline(input, line)) {
        ++line_number;
        const auto fields = detail::split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() < needed) {
            throw Error("line " + std::to_string(line_number) + ": expected at least " +
                        std::to_string(needed) + " fields, got " + std::to_string(fields.size()));
        }
        const int split = detail::parse_code(fields[map.split], line_number, "split flag");
        if (split != 0 && split != 1) {
            throw Error("line " + std::to_string(line_number) + ": split flag must be 0 or 1");
        }
        const int speaker = detail::parse_code(fields[map.speaker], line_number, "speaker");
        if (speaker < 0) {
            throw Error("line " + std::to_string(line_number) + ": speaker must be non-negative");
        }
        const int sex = detail::parse_code(fields[map.sex], line_number, "sex");
        if (sex != 0 && sex != 1) {
            throw Error("line " + std::to_string(line_number) + ": sex must be 0 or 1");
        }
        const int label = detail::parse_code(fields[map.class_column], line_number, "class");
        if (label < 0 || label >= static_cast<int>(kVowelClassCount)) {
            throw Error("line " + std::to_string(line_number) + ": class " + std::to_string(label) +
                        " is outside 0.." + std::to_string(kVowelClassCount - 1));
        }

        Observation obs;
        obs.label = label;
        obs.group = speaker;
        obs.holdout = split == 1;
        obs.features.reserve(kVowelFeatureCount + 2);
        for (std::size_t f = 0; f < kVowelFeatureCount; ++f) {
            obs.features.push_back(detail::parse_number(fields[map.features_begin + f], line_number));
        }
        obs.features.push_back(static_cast<double>(speaker));
        obs.features.push_back(static_cast<double>(sex));
        dataset.observations.push_back(std::move(obs));
        (split == 1 ? test_rows : train_rows) += 1;
    }

    if (warnings) {
        if (dataset.size() != kVowelExpectedRows) {
            warnings->push_back("expected " + std::to_string(kVowelExpectedRows) + " rows, got " +
                                std::to_string(dataset.size()));
        }
        if (train_rows != kVowelExpectedTrainRows || test_rows != kVowelExpectedTestRows) {
            warnings->push_back("expected a " + std::to_string(kVowelExpectedTrainRows) + "/" +
                                std::to_string(kVowelExpectedTestRows) + " train/test split, got " +
                                std::to_string(train_rows) + "/" + std::to_string(test_rows));
        }
    }
    if (dataset.size() == 0) throw Error("load_vowel: '" + path + "' holds no data rows");
    return dataset;
}

// ---------------------------------------------------------------------------
// Canonical CSV dump
// ---------------------------------------------------------------------------

// Header: class,group,baseline,holdout then one `name:role:kind` token per
// feature column.  Values use shortest round-trip formatting.

inline void save_csv(const Dataset& dataset, std::ostream& out) {
    out << "class,group,baseline,holdout";
    for (std::size_t col = 0; col < dataset.schema.size(); ++col) {
        out << ',' << dataset.schema.names[col] << ':' << to_string(dataset.schema.roles[col])
            << ':' << to_string(dataset.schema.kinds[col]);
    }
    out << '\n';
    for (const Observation& obs : dataset.observations) {
        out << obs.label << ',' << obs.group << ',' << (obs.baseline ? 1 : 0) << ','
            << (obs.holdout ? 1 : 0);
        for (double value : obs.features) out << ',' << detail::format_double(value);
        out << '\n';
    }
}

inline std::string save_csv(const Dataset& dataset) {
    std::ostringstream out;
    save_csv(dataset, out);
    return out.str();
}

inline Dataset load_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("load_csv: empty input");
    const auto header = detail::split_fields(line);
    if (header.size() < 5 || header[0] != "class" || header[1] != "group" ||
        header[2] != "baseline" || header[3] != "holdout") {
        throw Error("load_csv: header must start with class,group,baseline,holdout");
    }

    Dataset dataset;
    for (std::size_t col = 4; col < header.size(); ++col) {
        const std::string& token = header[col];
        const std::size_t first = token.find(':');
        const std::size_t second = first == std::string::npos ? std::string::npos
                                                              : token.find(':', first + 1);
        if (first == std::string::npos || second == std::string::npos) {
            throw Error("load_csv: feature header '" + token + "' is not name:role:kind");
        }
        dataset.schema.names.push_back(token.substr(0, first));
        dataset.schema.roles.push_back(role_from_string(token.substr(first + 1, second - first - 1)));
        dataset.schema.kinds.push_back(kind_from_string(token.substr(second + 1)));
    }

    std::size_t line_number = 1;
    std::vector<int> seen_labels;
    while (std::getline(in, line)) {
        ++line_number;
        const auto fields = detail::split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != 4 + dataset.schema.size()) {
            throw Error("load_csv: line " + std::to_string(line_number) + ": expected " +
                        std::to_string(4 + dataset.schema.size()) + " fields, got " +
                        std::to_string(fields.size()));
        }
        Observation obs;
        obs.label = detail::parse_code(fields[0], line_number, "class");
        obs.group = detail::parse_code(fields[1], line_number, "group");
        obs.baseline = detail::parse_code(fields[2], line_number, "baseline flag") != 0;
        obs.holdout = detail::parse_code(fields[3], line_number, "holdout flag") != 0;
        for (std::size_t col = 0; col < dataset.schema.size(); ++col) {
            obs.features.push_back(detail::parse_number(fields[4 + col], line_number));
        }
        if (std::find(seen_labels.begin(), seen_labels.end(), obs.label) == seen_labels.end()) {
            seen_labels.push_back(obs.label);
        }
        dataset.observations.push_back(std::move(obs));
    }
    std::sort(seen_labels.begin(), seen_labels.end());
    dataset.schema.class_values = std::move(seen_labels);
    if (dataset.schema.class_values.empty()) throw Error("load_csv: no data rows");
    return dataset;
}

inline Dataset load_csv_file(const std::string& path) {
    std::ifstream input(path);
    if (!input) throw Error("load_csv: cannot open '" + path + "'");
    return load_csv(input);
}

// ---------------------------------------------------------------------------
// Synthetic context-shift generator
// ---------------------------------------------------------------------------

/// Parameters of the synthetic scenario.  Class 0 is the healthy reference
/// class; rows in the first half draw their context from the train ("cold")
/// range, rows in the second half from the disjoint test ("warm") range.
struct ShiftScenario {
    std::uint64_t seed = 7;
    int class_count = 8;
    int feature_count = 12;
    int context_dim = 2;
    int row_count = 240;  // split evenly between the two context ranges
    std::vector<std::vector<double>> class_means;  // class_count x feature_count
    std::vector<std::vector<double>> coupling;     // feature_count x context_dim
    double noise_scale = 0.5;
    double baseline_fraction = 0.75;  // share of healthy rows flagged baseline
    std::pair<double, double> train_context_range{0.0, 1.0};
    std::pair<double, double> test_context_range{2.0, 3.0};
};

/// Balanced class-mean pattern: feature i carries bit (i mod ceil(log2(k)))
/// of the class index as +/- delta, so every feature has the same
/// between-class variance.
inline std::vector<std::vector<double>> default_class_means(int class_count, int feature_count,
                                                            double delta = 1.0) {
    int bits = 1;
    while ((1 << bits) < class_count) ++bits;
    std::vector<std::vector<double>> means(static_cast<std::size_t>(class_count));
    for (int c = 0; c < class_count; ++c) {
        means[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(feature_count));
        for (int f = 0; f < feature_count; ++f) {
            const int bit = (c >> (f % bits)) & 1;
            means[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)] =
                bit != 0 ? delta : -delta;
        }
    }
    return means;
}

inline std::vector<std::vector<double>> default_coupling(int feature_count, int context_dim,
                                                         double scale = 1.0) {
    std::vector<std::vector<double>> coupling(static_cast<std::size_t>(feature_count));
    for (int f = 0; f < feature_count; ++f) {
        coupling[static_cast<std::size_t>(f)].resize(static_cast<std::size_t>(context_dim));
        for (int d = 0; d < context_dim; ++d) {
            coupling[static_cast<std::size_t>(f)][static_cast<std::size_t>(d)] =
                scale * (0.8 + 0.1 * static_cast<double>((f + d) % 5));
        }
    }
    return coupling;
}

inline ShiftScenario default_scenario(std::uint64_t seed = 7, double coupling_scale = 1.0) {
    ShiftScenario scenario;
    scenario.seed = seed;
    scenario.class_means = default_class_means(scenario.class_count, scenario.feature_count);
    scenario.coupling = default_coupling(scenario.feature_count, scenario.context_dim,
                                         coupling_scale);
    return scenario;
}

/// Deterministic from the seed.  Features are class mean + coupling * context
/// + Gaussian noise; healthy rows spanning both ranges are flagged baseline;
/// group is 0 for the cold half and 1 for the warm half.
inline Dataset generate_shift(const ShiftScenario& scenario) {
    if (scenario.class_count < 2) throw Error("generate_shift: need at least 2 classes");
    if (scenario.feature_count < 1 || scenario.context_dim < 1 || scenario.row_count < 2) {
        throw Error("generate_shift: degenerate scenario dimensions");
    }
    const auto check_range = [](const std::pair<double, double>& range, const char* name) {
        if (!(range.first < range.second)) {
            throw Error(std::string("generate_shift: degenerate ") + name + " context range");
        }
    };
    check_range(scenario.train_context_range, "train");
    check_range(scenario.test_context_range, "test");
    const bool disjoint = scenario.train_context_range.second <= scenario.test_context_range.first ||
                          scenario.test_context_range.second <= scenario.train_context_range.first;
    if (!disjoint) throw Error("generate_shift: train and test context ranges overlap");
    if (scenario.class_means.size() != static_cast<std::size_t>(scenario.class_count) ||
        scenario.coupling.size() != static_cast<std::size_t>(scenario.feature_count)) {
        throw Error("generate_shift: class_means/coupling shapes do not match the scenario");
    }
    if (scenario.baseline_fraction < 0.0 || scenario.baseline_fraction > 1.0) {
        throw Error("generate_shift: baseline fraction must lie in [0, 1]");
    }

    Dataset dataset;
    for (int f = 0; f < scenario.feature_count; ++f) {
        dataset.schema.names.push_back("p" + std::to_string(f));
        dataset.schema.roles.push_back(FeatureRole::Primary);
        dataset.schema.kinds.push_back(FeatureKind::Continuous);
    }
    for (int d = 0; d < scenario.context_dim; ++d) {
        dataset.schema.names.push_back("c" + std::to_string(d));
        dataset.schema.roles.push_back(FeatureRole::Contextual);
        dataset.schema.kinds.push_back(FeatureKind::Continuous);
    }
    for (int c = 0; c < scenario.class_count; ++c) dataset.schema.class_values.push_back(c);

    rng::SplitMix64 random(scenario.seed);
    const int cold_rows = scenario.row_count / 2;
    for (int row = 0; row < scenario.row_count; ++row) {
        const bool warm = row >= cold_rows;
        const auto& range = warm ? scenario.test_context_range : scenario.train_context_range;
        Observation obs;
        obs.group = warm ? 1 : 0;
        obs.holdout = warm;
        obs.label = random.uniform_int(0, scenario.class_count - 1);

        std::vector<double> context(static_cast<std::size_t>(scenario.context_dim));
        for (double& value : context) value = random.uniform(range.first, range.second);

        obs.features.resize(static_cast<std::size_t>(scenario.feature_count + scenario.context_dim));
        for (int f = 0; f < scenario.feature_count; ++f) {
            double value = scenario.class_means[static_cast<std::size_t>(obs.label)]
                                               [static_cast<std::size_t>(f)];
            for (int d = 0; d < scenario.context_dim; ++d) {
                value += scenario.coupling[static_cast<std::size_t>(f)][static_cast<std::size_t>(d)] *
                         context[static_cast<std::size_t>(d)];
            }
            value += scenario.noise_scale * random.normal();
            obs.features[static_cast<std::size_t>(f)] = value;
        }
        for (int d = 0; d < scenario.context_dim; ++d) {
            obs.features[static_cast<std::size_t>(scenario.feature_count + d)] =
                context[static_cast<std::size_t>(d)];
        }
        dataset.observations.push_back(std::move(obs));
    }

    // Flag round(fraction * healthy) healthy rows as baseline, spread evenly
    // over the healthy rows so both context ranges are covered.
    std::vector<std::size_t> healthy;
    for (std::size_t row = 0; row < dataset.size(); ++row) {
        if (dataset.observations[row].label == 0) healthy.push_back(row);
    }
    const auto baseline_count = static_cast<std::size_t>(
        std::llround(scenario.baseline_fraction * static_cast<double>(healthy.size())));
    for (std::size_t t = 0; t < baseline_count; ++t) {
        const std::size_t pick = t * healthy.size() / baseline_count;
        dataset.observations[healthy[pick]].baseline = true;
    }
    return dataset;
}

// ---------------------------------------------------------------------------
// Dataset fingerprint (FNV-1a over a canonical byte stream)
// ---------------------------------------------------------------------------

namespace detail {

inline void fnv_mix(std::uint64_t& hash, const void* bytes, std::size_t count) {
    const auto* data = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < count; ++i) {
        hash ^= data[i];
        hash *= 0x100000001B3ULL;
    }
}

inline void fnv_mix_double(std::uint64_t& hash, double value) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(value));
    std::memcpy(&bits, &value, sizeof(bits));
    fnv_mix(hash, &bits, sizeof(bits));
}

}  // namespace detail

inline std::string fingerprint(const Dataset& dataset) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (std::size_t col = 0; col < dataset.schema.size(); ++col) {
        detail::fnv_mix(hash, dataset.schema.names[col].data(), dataset.schema.names[col].size());
        const int role = static_cast<int>(dataset.schema.roles[col]);
        const int kind = static_cast<int>(dataset.schema.kinds[col]);
        detail::fnv_mix(hash, &role, sizeof(role));
        detail::fnv_mix(hash, &kind, sizeof(kind));
    }
    for (int value : dataset.schema.class_values) detail::fnv_mix(hash, &value, sizeof(value));
    for (const Observation& obs : dataset.observations) {
        detail::fnv_mix(hash, &obs.label, sizeof(obs.label));
        detail::fnv_mix(hash, &obs.group, sizeof(obs.group));
        const int flags = (obs.baseline ? 1 : 0) | (obs.holdout ? 2 : 0);
        detail::fnv_mix(hash, &flags, sizeof(flags));
        for (double value : obs.features) detail::fnv_mix_double(hash, value);
    }
    char buffer[19];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buffer);
}

}  // namespace ctxlearn::data
