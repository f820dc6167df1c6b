// ctxlearn command-line harness.
//
//   ctxlearn roles     --data fixtures.csv [--tolerance 1e-9] [--format table]
//   ctxlearn vowel     --data vowel-context.data [--strategies all-combos]
//                      [--classifier nn] [--estimator group] [--k 1] [--format table]
//   ctxlearn synthetic [--seed 7] [--coupling-scale 1] [--format table] ...
//
// Exit status is 0 iff no operation reported an error.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxlearn/data.hpp"
#include "ctxlearn/experiments.hpp"
#include "ctxlearn/featrole.hpp"
#include "ctxlearn/report.hpp"

namespace {

using ctxlearn::report::Format;

int run_roles(const std::string& data_path, double tolerance, const std::string& format) {
    const ctxlearn::Dataset dataset = ctxlearn::data::load_csv_file(data_path);
    const auto report = ctxlearn::featrole::classify_roles(dataset, tolerance);
    if (format == "records") {
        std::cout << ctxlearn::experiments::role_report_records(report, dataset);
    } else if (format == "table") {
        std::cout << ctxlearn::experiments::render_role_report(report, dataset);
    } else {
        throw ctxlearn::Error("roles supports --format table or records, got '" + format + "'");
    }
    return 0;
}

int run_vowel(const std::string& data_path, const ctxlearn::experiments::VowelOptions& options,
              Format format) {
    std::vector<std::string> warnings;
    const ctxlearn::Dataset vowel = ctxlearn::data::load_vowel(data_path, {}, &warnings);
    for (const std::string& warning : warnings) {
        std::cerr << "warning: " << warning << '\n';
    }
    const auto report = ctxlearn::experiments::run_vowel(vowel, options);
    std::cout << ctxlearn::report::emit_report(report, format);
    return 0;
}

int run_synthetic(const ctxlearn::experiments::SyntheticOptions& options, Format format) {
    const auto report = ctxlearn::experiments::run_synthetic(options);
    std::cout << ctxlearn::report::emit_report(report, format);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"context-sensitive classification toolkit"};
    app.require_subcommand(1);

    std::string data_path;
    std::string format = "table";
    double tolerance = ctxlearn::featrole::kDefaultTolerance;

    auto* roles = app.add_subcommand("roles", "detect primary/contextual/irrelevant features");
    roles->add_option("--data", data_path, "canonical CSV file with discrete columns")->required();
    roles->add_option("--tolerance", tolerance, "probability-gap tolerance");
    roles->add_option("--format", format, "table|records");

    ctxlearn::experiments::VowelOptions vowel_options;
    std::string estimator = "group";
    std::string vowel_distance = "l1";
    auto* vowel = app.add_subcommand("vowel", "strategy sweep on the vowel data");
    vowel->add_option("--data", data_path, "vowel data file (split speaker sex f0..f9 class)")
        ->required();
    vowel
        ->add_option("--strategies", vowel_options.strategies_spec,
                     "comma-separated tokens norm,expand,weight,select, 'all-combos', or "
                     "empty for no strategy")
        ->expected(0, 1);
    vowel->add_option("--classifier", vowel_options.classifier, "nn|mlr");
    vowel->add_option("--estimator", estimator, "group|knn|linear");
    vowel->add_option("--k", vowel_options.k, "neighbor count for the nn classifier");
    vowel->add_option("--distance", vowel_distance, "nn distance: l1|l2 (l1 default)");
    vowel->add_option("--format", format, "table|csv|records");

    ctxlearn::experiments::SyntheticOptions synthetic_options;
    std::uint64_t seed = 7;
    double coupling_scale = 1.0;
    int rows = synthetic_options.scenario.row_count;
    int classes = synthetic_options.scenario.class_count;
    int features = synthetic_options.scenario.feature_count;
    int context_dim = synthetic_options.scenario.context_dim;
    double noise = synthetic_options.scenario.noise_scale;
    double baseline_fraction = synthetic_options.scenario.baseline_fraction;
    auto* synthetic = app.add_subcommand("synthetic",
                                         "two-fold normalization comparison on shifted data");
    synthetic->add_option("--seed", seed, "generator seed");
    synthetic->add_option("--coupling-scale", coupling_scale,
                          "scales the context coupling (0 disables the shift)");
    synthetic->add_option("--rows", rows, "total row count");
    synthetic->add_option("--classes", classes, "class count (class 0 is healthy)");
    synthetic->add_option("--features", features, "primary feature count");
    synthetic->add_option("--context-dim", context_dim, "context dimensions");
    synthetic->add_option("--noise", noise, "noise scale");
    synthetic->add_option("--baseline-fraction", baseline_fraction,
                          "share of healthy rows flagged baseline");
    synthetic->add_option("--k", synthetic_options.k, "neighbor count for the nn classifier");
    synthetic->add_option("--estimator-k", synthetic_options.estimator_k,
                          "neighbor count for the knn context estimator");
    std::string synthetic_distance = "l2";
    synthetic->add_option("--distance", synthetic_distance, "nn distance: l1|l2 (l2 default)");
    synthetic->add_option("--format", format, "table|csv|records");

    CLI11_PARSE(app, argc, argv);

    try {
        if (roles->parsed()) {
            return run_roles(data_path, tolerance, format);
        }
        if (vowel->parsed()) {
            vowel_options.estimator = ctxlearn::normalize::estimator_from_string(estimator);
            vowel_options.distance = ctxlearn::classify::distance_from_string(vowel_distance);
            return run_vowel(data_path, vowel_options,
                             ctxlearn::report::format_from_string(format));
        }
        if (synthetic->parsed()) {
            synthetic_options.distance =
                ctxlearn::classify::distance_from_string(synthetic_distance);
            synthetic_options.scenario = ctxlearn::data::default_scenario(seed, coupling_scale);
            synthetic_options.scenario.row_count = rows;
            synthetic_options.scenario.class_count = classes;
            synthetic_options.scenario.feature_count = features;
            synthetic_options.scenario.context_dim = context_dim;
            synthetic_options.scenario.noise_scale = noise;
            synthetic_options.scenario.baseline_fraction = baseline_fraction;
            synthetic_options.scenario.class_means =
                ctxlearn::data::default_class_means(classes, features);
            synthetic_options.scenario.coupling =
                ctxlearn::data::default_coupling(features, context_dim, coupling_scale);
            return run_synthetic(synthetic_options,
                                 ctxlearn::report::format_from_string(format));
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 0;
}
