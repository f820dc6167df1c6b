#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include "ctxlearn/core.hpp"
#include "ctxlearn/featrole.hpp"
#include "ctxlearn/rng.hpp"

using namespace ctxlearn;
using namespace ctxlearn::featrole;

namespace {

// --- independent enumeration oracle -----------------------------------------
// Works directly on raw rows (label first, then features) by filtering and
// counting; shares no code with the detector under test.

using Row = std::vector<int>;  // [label, f0, f1, ...]
using Table = std::vector<Row>;

double oracle_prob(const Table& table, const std::function<bool(const Row&)>& event) {
    std::size_t hits = 0;
    for (const Row& row : table) {
        if (event(row)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(table.size());
}

std::set<int> oracle_values(const Table& table, std::size_t column) {
    std::set<int> values;
    for (const Row& row : table) values.insert(row[column]);
    return values;
}

bool oracle_primary(const Table& table, std::size_t feature, double tolerance) {
    const std::size_t column = feature + 1;
    for (int value : oracle_values(table, column)) {
        const double p_condition =
            oracle_prob(table, [&](const Row& r) { return r[column] == value; });
        if (p_condition <= 0.0) continue;
        for (int label : oracle_values(table, 0)) {
            const double joint = oracle_prob(
                table, [&](const Row& r) { return r[0] == label && r[column] == value; });
            const double marginal = oracle_prob(table, [&](const Row& r) { return r[0] == label; });
            if (std::abs(joint / p_condition - marginal) > tolerance) return true;
        }
    }
    return false;
}

bool oracle_contextual(const Table& table, std::size_t feature, double tolerance) {
    if (oracle_primary(table, feature, tolerance)) return false;
    const std::size_t column = feature + 1;
    for (const Row& assignment : table) {  // every supported full assignment
        const auto matches_all = [&](const Row& r) {
            for (std::size_t c = 1; c < r.size(); ++c) {
                if (r[c] != assignment[c]) return false;
            }
            return true;
        };
        const auto matches_others = [&](const Row& r) {
            for (std::size_t c = 1; c < r.size(); ++c) {
                if (c != column && r[c] != assignment[c]) return false;
            }
            return true;
        };
        const double left = oracle_prob(table,
                                        [&](const Row& r) {
                                            return r[0] == assignment[0] && matches_all(r);
                                        }) /
                            oracle_prob(table, matches_all);
        const double right = oracle_prob(table,
                                         [&](const Row& r) {
                                             return r[0] == assignment[0] && matches_others(r);
                                         }) /
                             oracle_prob(table, matches_others);
        if (std::abs(left - right) > tolerance) return true;
    }
    return false;
}

bool oracle_sensitive(const Table& table, std::size_t primary, std::size_t contextual,
                      double tolerance) {
    const std::size_t pcol = primary + 1;
    const std::size_t ccol = contextual + 1;
    for (int pv : oracle_values(table, pcol)) {
        for (int cv : oracle_values(table, ccol)) {
            const double p_both = oracle_prob(
                table, [&](const Row& r) { return r[pcol] == pv && r[ccol] == cv; });
            if (p_both <= 0.0) continue;
            const double p_primary =
                oracle_prob(table, [&](const Row& r) { return r[pcol] == pv; });
            for (int label : oracle_values(table, 0)) {
                const double with_context =
                    oracle_prob(table,
                                [&](const Row& r) {
                                    return r[0] == label && r[pcol] == pv && r[ccol] == cv;
                                }) /
                    p_both;
                const double without_context =
                    oracle_prob(table,
                                [&](const Row& r) { return r[0] == label && r[pcol] == pv; }) /
                    p_primary;
                if (std::abs(with_context - without_context) > tolerance) return true;
            }
        }
    }
    return false;
}

// --- fixtures ----------------------------------------------------------------

Dataset from_table(const Table& table, std::size_t feature_count) {
    Dataset dataset;
    std::set<int> labels;
    for (const Row& row : table) labels.insert(row[0]);
    for (std::size_t f = 0; f < feature_count; ++f) {
        dataset.schema.names.push_back("x" + std::to_string(f + 1));
        dataset.schema.roles.push_back(FeatureRole::Primary);
        dataset.schema.kinds.push_back(FeatureKind::Discrete);
    }
    dataset.schema.class_values.assign(labels.begin(), labels.end());
    for (const Row& row : table) {
        Observation obs;
        obs.label = row[0];
        for (std::size_t f = 0; f < feature_count; ++f) {
            obs.features.push_back(static_cast<double>(row[f + 1]));
        }
        dataset.observations.push_back(std::move(obs));
    }
    return dataset;
}

Table xor_table() {
    return {{0, 0, 0}, {1, 0, 1}, {1, 1, 0}, {0, 1, 1}};
}

Table copy_and_coin_table() {
    return {{0, 0, 0}, {0, 0, 1}, {1, 1, 0}, {1, 1, 1}};
}

// x0 = x1 when x2 = 0 (weight 3), x0 = !x1 when x2 = 1 (weight 1), so
// p(x2=0) = 0.75 and x1 carries a marginal signal while x2 only flips it.
Table biased_flip_table() {
    Table table;
    for (int copy = 0; copy < 3; ++copy) {
        table.push_back({0, 0, 0});
        table.push_back({1, 1, 0});
    }
    table.push_back({1, 0, 1});
    table.push_back({0, 1, 1});
    return table;
}

Table coin_extension_table() {  // x0 = x1 xor x2; x3 an independent coin
    Table table;
    for (int a = 0; a <= 1; ++a) {
        for (int b = 0; b <= 1; ++b) {
            for (int c = 0; c <= 1; ++c) {
                table.push_back({a ^ b, a, b, c});
            }
        }
    }
    return table;
}

RoleReport report_of(const Table& table, std::size_t features, double tolerance = 1e-9) {
    return classify_roles(from_table(table, features), tolerance);
}

}  // namespace

TEST_CASE("estimate_distribution yields uniform quarters on the XOR table", "[featrole]") {
    const auto dist = estimate_distribution(from_table(xor_table(), 2));
    REQUIRE(dist.cells().size() == 4);
    double total_probability = 0.0;
    for (const auto& cell : dist.cells()) {
        CHECK(cell.count / dist.total() == Catch::Approx(0.25));
        total_probability += cell.count / dist.total();
    }
    CHECK(std::abs(total_probability - 1.0) < 1e-12);
}

TEST_CASE("estimate_distribution is invariant to duplicating every row", "[featrole]") {
    Table doubled = xor_table();
    const Table original = doubled;
    doubled.insert(doubled.end(), original.begin(), original.end());

    const auto dist4 = estimate_distribution(from_table(original, 2));
    const auto dist8 = estimate_distribution(from_table(doubled, 2));
    REQUIRE(dist4.cells().size() == dist8.cells().size());
    for (std::size_t i = 0; i < dist4.cells().size(); ++i) {
        CHECK(dist4.cells()[i].count / dist4.total() ==
              Catch::Approx(dist8.cells()[i].count / dist8.total()));
    }
}

TEST_CASE("estimate_distribution rejects continuous columns", "[featrole]") {
    Dataset dataset = from_table(xor_table(), 2);
    dataset.schema.kinds[1] = FeatureKind::Continuous;
    CHECK_THROWS_AS(estimate_distribution(dataset), Error);
}

TEST_CASE("estimate_distribution enforces the cell budget and feature limit", "[featrole]") {
    const Dataset dataset = from_table(coin_extension_table(), 3);
    DistributionOptions options;
    options.max_cells = 8;  // 2 classes x 2^3 assignments = 16 > 8
    CHECK_THROWS_AS(estimate_distribution(dataset, options), Error);

    DistributionOptions narrow;
    narrow.max_features = 2;
    CHECK_THROWS_AS(estimate_distribution(dataset, narrow), Error);
}

TEST_CASE("a copied feature is primary with gap 0.5", "[featrole]") {
    const auto dist = estimate_distribution(from_table(copy_and_coin_table(), 2));
    const auto witness = is_primary(dist, 0, 1e-9);
    CHECK(witness.primary);
    CHECK(witness.gap == Catch::Approx(0.5));
}

TEST_CASE("XOR inputs are not primary but are contextual", "[featrole]") {
    const auto dist = estimate_distribution(from_table(xor_table(), 2));
    for (std::size_t feature : {std::size_t{0}, std::size_t{1}}) {
        CHECK_FALSE(is_primary(dist, feature, 1e-9).primary);
        const auto witness = is_contextual(dist, feature, 1e-9);
        CHECK(witness.contextual);
        CHECK(witness.gap == Catch::Approx(0.5));
    }
}

TEST_CASE("an independent coin is neither primary nor contextual", "[featrole]") {
    const Table table = coin_extension_table();
    CHECK_FALSE(oracle_primary(table, 2, 1e-9));
    CHECK_FALSE(oracle_contextual(table, 2, 1e-9));

    const auto dist = estimate_distribution(from_table(table, 3));
    CHECK_FALSE(is_primary(dist, 2, 1e-9).primary);
    CHECK_FALSE(is_contextual(dist, 2, 1e-9).contextual);
}

TEST_CASE("a primary feature is excluded from the contextual test", "[featrole]") {
    const auto dist = estimate_distribution(from_table(copy_and_coin_table(), 2));
    const auto witness = is_contextual(dist, 0, 1e-9);
    CHECK_FALSE(witness.contextual);
    CHECK(witness.excluded_as_primary);
}

TEST_CASE("index bounds are checked", "[featrole]") {
    const auto dist = estimate_distribution(from_table(xor_table(), 2));
    CHECK_THROWS_AS(is_primary(dist, 2, 1e-9), Error);
    CHECK_THROWS_AS(is_contextual(dist, 5, 1e-9), Error);
    CHECK_THROWS_AS(is_primary(dist, 0, -1.0), Error);
}

TEST_CASE("classify_roles on the XOR table: both features contextual, no pairs", "[featrole]") {
    const RoleReport report = report_of(xor_table(), 2);
    REQUIRE(report.features.size() == 2);
    CHECK(report.features[0].role == FeatureRole::Contextual);
    CHECK(report.features[1].role == FeatureRole::Contextual);
    CHECK(report.pairs.empty());
}

TEST_CASE("classify_roles on copy+coin: primary and irrelevant", "[featrole]") {
    const RoleReport report = report_of(copy_and_coin_table(), 2);
    REQUIRE(report.features.size() == 2);
    CHECK(report.features[0].role == FeatureRole::Primary);
    CHECK(report.features[1].role == FeatureRole::Irrelevant);
    CHECK(report.pairs.empty());  // no contextual partner for the primary
}

TEST_CASE("classify_roles on the biased flip table finds the sensitive pair", "[featrole]") {
    const Table table = biased_flip_table();

    // oracle agreement first
    CHECK(oracle_primary(table, 0, 1e-9));
    CHECK_FALSE(oracle_primary(table, 1, 1e-9));
    CHECK(oracle_contextual(table, 1, 1e-9));
    CHECK(oracle_sensitive(table, 0, 1, 1e-9));

    const RoleReport report = report_of(table, 2);
    REQUIRE(report.features.size() == 2);
    CHECK(report.features[0].role == FeatureRole::Primary);
    CHECK(report.features[0].gap == Catch::Approx(0.25));
    CHECK(report.features[1].role == FeatureRole::Contextual);
    CHECK(report.features[1].gap == Catch::Approx(0.75));

    REQUIRE(report.pairs.size() == 1);
    CHECK(report.pairs[0].primary_index == 0);
    CHECK(report.pairs[0].contextual_index == 1);
    CHECK(report.pairs[0].sensitive);
    CHECK(report.pairs[0].gap == Catch::Approx(0.75));
}

TEST_CASE("role report is invariant to row permutation and duplication", "[featrole][property]") {
    rng::SplitMix64 random(99);
    const Table base = biased_flip_table();
    const RoleReport reference = report_of(base, 2);

    Table shuffled = base;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1],
                  shuffled[static_cast<std::size_t>(random.uniform_int(0, static_cast<int>(i) - 1))]);
    }
    Table doubled = base;
    doubled.insert(doubled.end(), base.begin(), base.end());

    for (const Table& variant : {shuffled, doubled}) {
        const RoleReport report = report_of(variant, 2);
        REQUIRE(report.features.size() == reference.features.size());
        for (std::size_t f = 0; f < report.features.size(); ++f) {
            CHECK(report.features[f].role == reference.features[f].role);
            CHECK(report.features[f].gap == Catch::Approx(reference.features[f].gap));
        }
        REQUIRE(report.pairs.size() == reference.pairs.size());
        for (std::size_t p = 0; p < report.pairs.size(); ++p) {
            CHECK(report.pairs[p].sensitive == reference.pairs[p].sensitive);
            CHECK(report.pairs[p].gap == Catch::Approx(reference.pairs[p].gap));
        }
    }
}

TEST_CASE("detected roles match the oracle on random discrete tables", "[featrole][property]") {
    rng::SplitMix64 random(4711);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t features = static_cast<std::size_t>(random.uniform_int(2, 3));
        const int rows = random.uniform_int(4, 24);
        Table table;
        for (int r = 0; r < rows; ++r) {
            Row row;
            row.push_back(random.uniform_int(0, 1));
            for (std::size_t f = 0; f < features; ++f) row.push_back(random.uniform_int(0, 1));
            table.push_back(std::move(row));
        }
        const RoleReport report = report_of(table, features);
        for (std::size_t f = 0; f < features; ++f) {
            FeatureRole expected = FeatureRole::Irrelevant;
            if (oracle_primary(table, f, 1e-9)) {
                expected = FeatureRole::Primary;
            } else if (oracle_contextual(table, f, 1e-9)) {
                expected = FeatureRole::Contextual;
            }
            INFO("trial " << trial << " feature " << f);
            CHECK(report.features[f].role == expected);
        }
        for (const auto& pair : report.pairs) {
            INFO("trial " << trial << " pair " << pair.primary_index << "/"
                          << pair.contextual_index);
            CHECK(pair.sensitive ==
                  oracle_sensitive(table, pair.primary_index, pair.contextual_index, 1e-9));
        }
    }
}
