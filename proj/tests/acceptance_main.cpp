// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  The vowel criteria need the real vowel data file; its
// location comes from CTXLEARN_VOWEL_DATA or the compiled-in default, and a
// missing file fails those criteria explicitly rather than skipping them.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ctxlearn/classify.hpp"
#include "ctxlearn/core.hpp"
#include "ctxlearn/data.hpp"
#include "ctxlearn/experiments.hpp"
#include "ctxlearn/featrole.hpp"
#include "ctxlearn/normalize.hpp"
#include "ctxlearn/report.hpp"
#include "ctxlearn/rng.hpp"
#include "ctxlearn/strategies.hpp"

#ifndef CTXLEARN_DEFAULT_VOWEL_PATH
#define CTXLEARN_DEFAULT_VOWEL_PATH "data/vowel-context.data"
#endif

namespace {

using namespace ctxlearn;

int g_failures = 0;

void report_line(int criterion, bool pass, const std::string& description,
                 const std::string& detail = "") {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << description;
    if (!detail.empty()) std::cout << " [" << detail << "]";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

std::string vowel_path() {
    if (const char* env = std::getenv("CTXLEARN_VOWEL_DATA")) return env;
    return CTXLEARN_DEFAULT_VOWEL_PATH;
}

struct VowelRun {
    bool available = false;
    std::string path;
    std::vector<double> percents;  // eight combos, canonical order
    double elapsed_seconds = 0.0;
    std::string records;
};

VowelRun run_vowel_sweep() {
    VowelRun run;
    run.path = vowel_path();
    if (!std::filesystem::exists(run.path)) return run;
    const auto start = std::chrono::steady_clock::now();
    const Dataset vowel = data::load_vowel(run.path);
    const auto report = experiments::run_vowel(vowel, experiments::VowelOptions{});
    run.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& row : report.rows) run.percents.push_back(100.0 * row.accuracy());
    run.records = report::emit_report(report, report::Format::Records);
    run.available = run.percents.size() == 8;
    return run;
}

std::string missing_data_detail(const std::string& path) {
    return "vowel data file not found at '" + path +
           "'; supply it via CTXLEARN_VOWEL_DATA or data/vowel-context.data (see README)";
}

// Reference percents for the eight-combination sweep on the standard
// speaker-independent split, canonical order (norm, expand, weight).
const double kReferencePercents[8] = {56, 58, 55, 59, 58, 64, 59, 66};

// --- criterion 6 oracle: normal equations via Gaussian elimination ---------

std::vector<double> normal_equations(const std::vector<std::vector<double>>& design,
                                     const std::vector<double>& target) {
    const std::size_t p = design.front().size();
    std::vector<std::vector<double>> ata(p, std::vector<double>(p, 0.0));
    std::vector<double> atb(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t r = 0; r < design.size(); ++r) {
                ata[i][j] += design[r][i] * design[r][j];
            }
        }
        for (std::size_t r = 0; r < design.size(); ++r) atb[i] += design[r][i] * target[r];
    }
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r) {
            if (std::abs(ata[r][col]) > std::abs(ata[pivot][col])) pivot = r;
        }
        std::swap(ata[col], ata[pivot]);
        std::swap(atb[col], atb[pivot]);
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double factor = ata[r][col] / ata[col][col];
            for (std::size_t c = col; c < p; ++c) ata[r][c] -= factor * ata[col][c];
            atb[r] -= factor * atb[col];
        }
    }
    std::vector<double> solution(p);
    for (std::size_t i = 0; i < p; ++i) solution[i] = atb[i] / ata[i][i];
    return solution;
}

Dataset plain_dataset(std::size_t primaries, int classes) {
    Dataset dataset;
    for (std::size_t f = 0; f < primaries; ++f) {
        dataset.schema.names.push_back("p" + std::to_string(f));
        dataset.schema.roles.push_back(FeatureRole::Primary);
        dataset.schema.kinds.push_back(FeatureKind::Continuous);
    }
    for (int c = 0; c < classes; ++c) dataset.schema.class_values.push_back(c);
    return dataset;
}

// --- criteria ---------------------------------------------------------------

void criterion_1_baseline(const VowelRun& run) {
    const std::string description = "vowel baseline accuracy 55.8% +/- 3pp, under 10 s";
    if (!run.available) {
        report_line(1, false, description, missing_data_detail(run.path));
        return;
    }
    std::ostringstream detail;
    detail << "baseline " << run.percents[0] << "%, " << run.elapsed_seconds << " s";
    const bool pass =
        std::abs(run.percents[0] - 55.8) <= 3.0 && run.elapsed_seconds < 10.0;
    report_line(1, pass, description, detail.str());
}

void criterion_2_all_strategies(const VowelRun& run) {
    const std::string description =
        "all three strategies reach 66% +/- 4pp and beat the baseline by >= 6pp";
    if (!run.available) {
        report_line(2, false, description, missing_data_detail(run.path));
        return;
    }
    const double baseline = run.percents[0];
    const double combined = run.percents[7];
    std::ostringstream detail;
    detail << "combined " << combined << "% vs baseline " << baseline << "%";
    const bool pass = std::abs(combined - 66.0) <= 4.0 && combined - baseline >= 6.0;
    report_line(2, pass, description, detail.str());
}

void criterion_3_full_pattern(const VowelRun& run) {
    const std::string description = "all eight combination rows within +/- 4pp of the reference";
    if (!run.available) {
        report_line(3, false, description, missing_data_detail(run.path));
        return;
    }
    std::ostringstream detail;
    bool pass = true;
    for (int i = 0; i < 8; ++i) {
        const double diff = run.percents[static_cast<std::size_t>(i)] - kReferencePercents[i];
        if (std::abs(diff) > 4.0) pass = false;
        if (i > 0) detail << ", ";
        detail << "row" << i << " " << (diff >= 0 ? "+" : "") << diff;
    }
    report_line(3, pass, description, detail.str());
}

void criterion_4_synergy(const VowelRun& run) {
    const std::string description =
        "synergy: combined gain exceeds the sum of the single-strategy gains";
    if (!run.available) {
        report_line(4, false, description, missing_data_detail(run.path));
        return;
    }
    const double baseline = run.percents[0];
    const double single_sum = (run.percents[4] - baseline) + (run.percents[2] - baseline) +
                              (run.percents[1] - baseline);
    const double combined = run.percents[7] - baseline;
    std::ostringstream detail;
    detail << "combined gain " << combined << "pp vs summed single gains " << single_sum << "pp";
    report_line(4, combined > single_sum, description, detail.str());
}

void criterion_5_synthetic() {
    const std::string description =
        "contextual-linear beats every context-free normalization by >= 5pp (10-seed mean) "
        "and matches avgdev within 2pp when coupling is zero, under 30 s";
    const auto start = std::chrono::steady_clock::now();

    const auto accuracy_of = [](const report::ExperimentReport& rep, const std::string& config) {
        for (const auto& row : rep.rows) {
            if (row.config == config) return row.accuracy();
        }
        throw Error("missing row " + config);
    };

    double margin_sum = 0.0;
    double agreement_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        experiments::SyntheticOptions options;
        options.scenario = data::default_scenario(seed);
        const auto shifted = experiments::run_synthetic(options);
        double best_plain = 0.0;
        for (const char* name : {"none", "minmax", "avgdev", "percentile", "baseline-avgdev"}) {
            best_plain = std::max(best_plain,
                                  accuracy_of(shifted, std::string("classifier=nn norm=") + name));
        }
        margin_sum += accuracy_of(shifted, "classifier=nn norm=contextual-linear") - best_plain;

        options.scenario = data::default_scenario(seed, 0.0);
        const auto unshifted = experiments::run_synthetic(options);
        agreement_sum += std::abs(accuracy_of(unshifted, "classifier=nn norm=contextual-linear") -
                                  accuracy_of(unshifted, "classifier=nn norm=avgdev"));
    }
    const double mean_margin = 100.0 * margin_sum / 10.0;
    const double mean_agreement = 100.0 * agreement_sum / 10.0;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ostringstream detail;
    detail << "mean margin " << mean_margin << "pp, mean coupling-0 gap " << mean_agreement
           << "pp, " << elapsed << " s";
    const bool pass = mean_margin >= 5.0 && mean_agreement <= 2.0 && elapsed < 30.0;
    report_line(5, pass, description, detail.str());
}

void criterion_6_mlr_oracle() {
    const std::string description =
        "mlr coefficients match the normal-equations oracle to 1e-8 on 100 random fixtures";
    rng::SplitMix64 random(60606);
    double worst = 0.0;
    for (int fixture = 0; fixture < 100; ++fixture) {
        const std::size_t columns = static_cast<std::size_t>(random.uniform_int(1, 8));
        const std::size_t rows =
            columns + 2 + static_cast<std::size_t>(random.uniform_int(0, 18));
        const int classes = random.uniform_int(2, 5);
        Dataset train = plain_dataset(columns, classes);
        for (std::size_t r = 0; r < rows; ++r) {
            Observation obs;
            obs.label = random.uniform_int(0, classes - 1);
            for (std::size_t c = 0; c < columns; ++c) {
                obs.features.push_back(random.uniform(-10.0, 10.0));
            }
            train.observations.push_back(std::move(obs));
        }
        const classify::LinearModel model = classify::mlr_fit(train);
        if (model.rank_deficient) {
            report_line(6, false, description, "unexpected rank deficiency");
            return;
        }
        std::vector<std::vector<double>> design;
        for (const auto& obs : train.observations) {
            std::vector<double> row = {1.0};
            row.insert(row.end(), obs.features.begin(), obs.features.end());
            design.push_back(std::move(row));
        }
        for (int c = 0; c < classes; ++c) {
            std::vector<double> indicator;
            for (const auto& obs : train.observations) {
                indicator.push_back(obs.label == c ? 1.0 : 0.0);
            }
            const auto expected = normal_equations(design, indicator);
            for (std::size_t i = 0; i < expected.size(); ++i) {
                worst = std::max(worst,
                                 std::abs(model.coefficients[static_cast<std::size_t>(c)][i] -
                                          expected[i]));
            }
        }
    }
    std::ostringstream detail;
    detail << "worst coefficient difference " << worst;
    report_line(6, worst < 1e-8, description, detail.str());
}

void criterion_7_invariants() {
    const std::string description = "invariant suites (normalization, classifiers, roles)";
    std::string failure;
    rng::SplitMix64 random(70707);

    const auto fail = [&](const std::string& what) {
        if (failure.empty()) failure = what;
    };

    // (x - mu)/sigma identity and invertibility at 1e-9
    for (int trial = 0; trial < 200 && failure.empty(); ++trial) {
        const double x = random.uniform(-100.0, 100.0);
        if ((x - 0.0) / 1.0 != x) fail("identity transform changed a value");
        const double mu = random.uniform(-50.0, 50.0);
        const double sigma = std::max(kSigmaFloor, random.uniform(0.01, 20.0));
        const double v = (x - mu) / sigma;
        if (std::abs(v * sigma + mu - x) > 1e-9 * std::max(1.0, std::abs(x))) {
            fail("normalization failed to invert within 1e-9");
        }
    }

    // per-group mean 0 / deviation 1 after group-stats normalization
    {
        Dataset train = plain_dataset(3, 2);
        for (int group = 0; group < 4; ++group) {
            const double offset = random.uniform(-20.0, 20.0);
            for (int r = 0; r < 7; ++r) {
                Observation obs;
                obs.label = r % 2;
                obs.group = group;
                obs.features = {offset + random.uniform(-3.0, 3.0),
                                offset * 2 + random.uniform(-1.0, 1.0),
                                random.uniform(-5.0, 5.0)};
                train.observations.push_back(std::move(obs));
            }
        }
        const auto estimator =
            normalize::fit_context_estimator(train, normalize::EstimatorKind::GroupStats);
        const Dataset normalized = normalize::apply_contextual(estimator, train);
        for (int group = 0; group < 4 && failure.empty(); ++group) {
            for (std::size_t f = 0; f < 3; ++f) {
                std::vector<double> values;
                for (const auto& obs : normalized.observations) {
                    if (obs.group == group) values.push_back(obs.features[f]);
                }
                const MeanStd stats = mean_stddev(values);
                if (std::abs(stats.mean) > 1e-9 || std::abs(stats.stddev - 1.0) > 1e-9) {
                    fail("per-group statistics off after normalization");
                }
            }
        }
    }

    // 1-NN positive-scaling invariance
    {
        Dataset train = plain_dataset(2, 3);
        for (int r = 0; r < 30; ++r) {
            Observation obs;
            obs.label = random.uniform_int(0, 2);
            obs.features = {random.uniform(-5.0, 5.0), random.uniform(-5.0, 5.0)};
            train.observations.push_back(std::move(obs));
        }
        const auto model = classify::nn_fit(train);
        Dataset scaled = train;
        for (auto& obs : scaled.observations) {
            for (double& value : obs.features) value *= 37.5;
        }
        const auto scaled_model = classify::nn_fit(scaled);
        for (int q = 0; q < 50 && failure.empty(); ++q) {
            const std::vector<double> x = {random.uniform(-5.0, 5.0), random.uniform(-5.0, 5.0)};
            if (model.predict(x) != scaled_model.predict({x[0] * 37.5, x[1] * 37.5})) {
                fail("1-NN prediction changed under positive scaling");
            }
        }
    }

    // MLR affine argmax invariance at 1e-8
    {
        Dataset train = plain_dataset(3, 3);
        for (int r = 0; r < 40; ++r) {
            Observation obs;
            obs.label = random.uniform_int(0, 2);
            obs.features = {random.uniform(-4.0, 4.0), random.uniform(-4.0, 4.0),
                            random.uniform(-4.0, 4.0)};
            train.observations.push_back(std::move(obs));
        }
        double transform[3][3];
        double shift[3];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                transform[i][j] = random.uniform(-1.0, 1.0) + (i == j ? 3.0 : 0.0);
            }
            shift[i] = random.uniform(-2.0, 2.0);
        }
        const auto apply_transform = [&](const std::vector<double>& x) {
            std::vector<double> out(3);
            for (int i = 0; i < 3; ++i) {
                out[static_cast<std::size_t>(i)] = shift[i];
                for (int j = 0; j < 3; ++j) {
                    out[static_cast<std::size_t>(i)] +=
                        transform[i][j] * x[static_cast<std::size_t>(j)];
                }
            }
            return out;
        };
        Dataset mapped = train;
        for (auto& obs : mapped.observations) obs.features = apply_transform(obs.features);
        const auto original = classify::mlr_fit(train);
        const auto transformed = classify::mlr_fit(mapped);
        for (int q = 0; q < 50 && failure.empty(); ++q) {
            const std::vector<double> x = {random.uniform(-4.0, 4.0), random.uniform(-4.0, 4.0),
                                           random.uniform(-4.0, 4.0)};
            const auto tx = apply_transform(x);
            for (std::size_t c = 0; c < 3; ++c) {
                if (std::abs(original.response(x, c) - transformed.response(tx, c)) > 1e-8) {
                    fail("mlr responses moved under an affine map");
                }
            }
            if (original.predict(x) != transformed.predict(tx)) {
                fail("mlr argmax changed under an affine map");
            }
        }
    }

    // weight positivity
    {
        Dataset train = plain_dataset(2, 2);
        for (int group = 0; group < 3; ++group) {
            for (int label = 0; label < 2; ++label) {
                for (int r = 0; r < 3; ++r) {
                    Observation obs;
                    obs.label = label;
                    obs.group = group;
                    obs.features = {random.uniform(-3.0, 3.0) + label,
                                    random.uniform(-3.0, 3.0)};
                    train.observations.push_back(std::move(obs));
                }
            }
        }
        const auto weights = strategies::compute_weights(train);
        for (double w : weights.weights) {
            if (!(w > 0.0) || !std::isfinite(w)) fail("non-positive weight");
        }
    }

    // percentile range and monotonicity
    {
        Dataset train = plain_dataset(1, 2);
        for (int r = 0; r < 25; ++r) {
            Observation obs;
            obs.label = r % 2;
            obs.features = {random.uniform(-50.0, 50.0)};
            train.observations.push_back(std::move(obs));
        }
        const auto model = normalize::fit_plain(train, normalize::Method::Percentile);
        double previous = -1.0;
        for (double x = -60.0; x <= 60.0 && failure.empty(); x += 1.3) {
            const double value = normalize::apply_plain(model, {x})[0];
            if (value < 0.0 || value > 1.0) fail("percentile output left [0,1]");
            if (value < previous) fail("percentile output not monotone");
            previous = value;
        }
    }

    // exact role recovery on the three constructed tables
    {
        const auto table_dataset = [](const std::vector<std::vector<int>>& rows) {
            Dataset dataset;
            const std::size_t features = rows.front().size() - 1;
            for (std::size_t f = 0; f < features; ++f) {
                dataset.schema.names.push_back("x" + std::to_string(f + 1));
                dataset.schema.roles.push_back(FeatureRole::Primary);
                dataset.schema.kinds.push_back(FeatureKind::Discrete);
            }
            dataset.schema.class_values = {0, 1};
            for (const auto& row : rows) {
                Observation obs;
                obs.label = row[0];
                for (std::size_t f = 0; f < features; ++f) {
                    obs.features.push_back(static_cast<double>(row[f + 1]));
                }
                dataset.observations.push_back(std::move(obs));
            }
            return dataset;
        };

        const auto xor_report = featrole::classify_roles(
            table_dataset({{0, 0, 0}, {1, 0, 1}, {1, 1, 0}, {0, 1, 1}}), 1e-9);
        if (xor_report.features[0].role != FeatureRole::Contextual ||
            xor_report.features[1].role != FeatureRole::Contextual) {
            fail("xor roles wrong");
        }

        const auto copy_report = featrole::classify_roles(
            table_dataset({{0, 0, 0}, {0, 0, 1}, {1, 1, 0}, {1, 1, 1}}), 1e-9);
        if (copy_report.features[0].role != FeatureRole::Primary ||
            copy_report.features[1].role != FeatureRole::Irrelevant) {
            fail("copy+coin roles wrong");
        }

        const auto flip_report = featrole::classify_roles(
            table_dataset({{0, 0, 0}, {1, 1, 0}, {0, 0, 0}, {1, 1, 0}, {0, 0, 0}, {1, 1, 0},
                           {1, 0, 1}, {0, 1, 1}}),
            1e-9);
        if (flip_report.features[0].role != FeatureRole::Primary ||
            flip_report.features[1].role != FeatureRole::Contextual ||
            flip_report.pairs.size() != 1 || !flip_report.pairs[0].sensitive) {
            fail("biased flip roles or sensitivity pair wrong");
        }
    }

    report_line(7, failure.empty(), description, failure);
}

void criterion_8_determinism(const VowelRun& first_vowel) {
    const std::string description = "identical seeds yield byte-identical structured records";
    experiments::SyntheticOptions options;
    options.scenario = data::default_scenario(7);
    const std::string a =
        report::emit_report(experiments::run_synthetic(options), report::Format::Records);
    const std::string b =
        report::emit_report(experiments::run_synthetic(options), report::Format::Records);
    bool pass = a == b && !a.empty();
    std::string detail = "synthetic records identical";
    if (first_vowel.available) {
        const VowelRun second = run_vowel_sweep();
        pass = pass && second.records == first_vowel.records;
        detail += ", vowel records identical";
    }
    if (!pass) detail = "records differ between runs";
    report_line(8, pass, description, detail);
}

}  // namespace

int main() {
    try {
        const VowelRun vowel = run_vowel_sweep();
        criterion_1_baseline(vowel);
        criterion_2_all_strategies(vowel);
        criterion_3_full_pattern(vowel);
        criterion_4_synergy(vowel);
        criterion_5_synthetic();
        criterion_6_mlr_oracle();
        criterion_7_invariants();
        criterion_8_determinism(vowel);
    } catch (const std::exception& error) {
        std::cerr << "acceptance suite aborted: " << error.what() << std::endl;
        return 2;
    }
    std::cout << (g_failures == 0 ? "all criteria passed"
                                  : std::to_string(g_failures) + " criteria failed")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
