#include <doctest.h>

#include <cmath>

#include "basketlab/error.hpp"
#include "basketlab/ingest.hpp"
#include "basketlab/synthetic.hpp"

using namespace basketlab;

namespace {

SyntheticSpec base_spec() {
    SyntheticSpec spec;
    spec.item_count = 10;
    spec.basket_count = 4000;
    spec.day_span = 20;
    spec.base_probabilities.assign(10, 0.25);
    spec.seed = 77;
    return spec;
}

// empirical P(consequent | antecedent) over the generated baskets
double conditional_rate(const TransactionTable& table, std::uint32_t a,
                        std::uint32_t c) {
    std::uint64_t ante = 0, joint = 0;
    for (const auto& row : table.rows) {
        if (row.quantity_of(a) == 0) continue;
        ++ante;
        if (row.quantity_of(c) > 0) ++joint;
    }
    return ante == 0 ? 0.0 : static_cast<double>(joint) / static_cast<double>(ante);
}

} // namespace

TEST_SUITE("synthetic") {

TEST_CASE("probability one forces the consequent everywhere") {
    auto spec = base_spec();
    spec.rules.push_back(PlantedRule{{2}, {7}, 1.0});
    const auto table = generate_synthetic(spec);
    for (const auto& row : table.rows)
        if (row.quantity_of(2) > 0) CHECK(row.quantity_of(7) > 0);
}

TEST_CASE("probability zero leaves the consequent at its base rate") {
    auto spec = base_spec();
    spec.rules.push_back(PlantedRule{{2}, {7}, 0.0});
    const auto table = generate_synthetic(spec);
    CHECK(conditional_rate(table, 2, 7) == doctest::Approx(0.25).epsilon(0.15));
}

TEST_CASE("large sample concentrates near the planted probability") {
    auto spec = base_spec();
    spec.basket_count = 10000;
    spec.base_probabilities.assign(10, 0.3);
    spec.rules.push_back(PlantedRule{{1}, {5}, 0.9});
    const auto table = generate_synthetic(spec);
    CHECK(std::abs(conditional_rate(table, 1, 5) - 0.9) <= 0.02);
}

TEST_CASE("two-item antecedents couple only full matches") {
    auto spec = base_spec();
    spec.rules.push_back(PlantedRule{{0, 1}, {9}, 1.0});
    const auto table = generate_synthetic(spec);
    for (const auto& row : table.rows)
        if (row.quantity_of(0) > 0 && row.quantity_of(1) > 0)
            CHECK(row.quantity_of(9) > 0);
}

TEST_CASE("generation is deterministic per seed") {
    const auto a = generate_synthetic(base_spec());
    const auto b = generate_synthetic(base_spec());
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].date == b.rows[i].date);
        CHECK(a.rows[i].quantities == b.rows[i].quantities);
    }
    auto other = base_spec();
    other.seed = 78;
    const auto c = generate_synthetic(other);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.rows.size() && !any_difference; ++i)
        any_difference = a.rows[i].quantities != c.rows[i].quantities;
    CHECK(any_difference);
}

TEST_CASE("dates stay within the configured span") {
    const auto spec = base_spec();
    const auto table = generate_synthetic(spec);
    for (const auto& row : table.rows) {
        CHECK(row.date >= spec.start_day);
        CHECK(row.date - spec.start_day < static_cast<std::int32_t>(spec.day_span));
    }
}

TEST_CASE("bad specs are rejected") {
    auto spec = base_spec();
    spec.rules.push_back(PlantedRule{{1}, {1}, 0.5}); // overlapping sides
    CHECK_THROWS_AS(generate_synthetic(spec), Error);
    spec = base_spec();
    spec.rules.push_back(PlantedRule{{1}, {2}, 1.5});
    CHECK_THROWS_AS(generate_synthetic(spec), Error);
    spec = base_spec();
    spec.item_count = 0;
    CHECK_THROWS_AS(generate_synthetic(spec), Error);
    spec = base_spec();
    spec.base_probabilities.assign(3, 0.5); // wrong length
    CHECK_THROWS_AS(generate_synthetic(spec), Error);
}

} // TEST_SUITE
