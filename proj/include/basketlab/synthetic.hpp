#pragma once

#include <cstdint>
#include <vector>

#include "basketlab/dataset.hpp"

namespace basketlab {

struct PlantedRule {
    std::vector<std::uint32_t> antecedent;
    std::vector<std::uint32_t> consequent;
    double probability = 1.0; // P(consequent present | antecedent present)
};

struct SyntheticSpec {
    std::uint32_t item_count = 0;
    std::uint32_t basket_count = 0;
    std::uint32_t day_span = 1;
    Day start_day = make_day(2014, 1, 1);
    std::vector<double> base_probabilities; // per item; empty = 0.1 everywhere
    std::vector<PlantedRule> rules;
    std::uint64_t seed = 0;
};

// Seeded basket generator. Items are drawn independently at their base
// probabilities, then each planted rule overrides its consequent on baskets
// containing the full antecedent: present with the rule's probability, absent
// otherwise. probability == 0 applies no override at all, leaving the
// consequent at its independent base rate. Quantities for present items are
// drawn in 1..3. Deterministic per seed. Item codes are "it0", "it1", ...
TransactionTable generate_synthetic(const SyntheticSpec& spec);

} // namespace basketlab
