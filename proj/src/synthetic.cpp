#include "basketlab/synthetic.hpp"

#include <algorithm>

#include "basketlab/error.hpp"
#include "basketlab/rng.hpp"

namespace basketlab {

namespace {

void validate(const SyntheticSpec& spec) {
    if (spec.item_count < 1) throw Error::usage("item_count must be at least 1");
    if (spec.basket_count < 1) throw Error::usage("basket_count must be at least 1");
    if (spec.day_span < 1) throw Error::usage("day_span must be at least 1");
    if (!spec.base_probabilities.empty() &&
        spec.base_probabilities.size() != spec.item_count)
        throw Error::usage("base_probabilities must have one entry per item");
    for (double p : spec.base_probabilities)
        if (p < 0.0 || p > 1.0)
            throw Error::usage("base probabilities must be in [0,1]");
    for (const auto& rule : spec.rules) {
        if (rule.probability < 0.0 || rule.probability > 1.0)
            throw Error::usage("planted rule probability must be in [0,1]");
        if (rule.antecedent.empty() || rule.consequent.empty())
            throw Error::usage("planted rule sides must be non-empty");
        for (auto i : rule.antecedent)
            if (i >= spec.item_count) throw Error::usage("planted antecedent item out of range");
        for (auto i : rule.consequent) {
            if (i >= spec.item_count) throw Error::usage("planted consequent item out of range");
            if (std::find(rule.antecedent.begin(), rule.antecedent.end(), i) !=
                rule.antecedent.end())
                throw Error::usage("planted rule sides must be disjoint");
        }
    }
}

} // namespace

TransactionTable generate_synthetic(const SyntheticSpec& spec) {
    validate(spec);

    TransactionTable table;
    for (std::uint32_t i = 0; i < spec.item_count; ++i)
        table.catalog.add("it" + std::to_string(i));

    std::vector<double> base = spec.base_probabilities;
    if (base.empty()) base.assign(spec.item_count, 0.1);

    Rng rng(spec.seed);
    std::vector<bool> present(spec.item_count);
    table.rows.reserve(spec.basket_count);
    for (std::uint32_t b = 0; b < spec.basket_count; ++b) {
        for (std::uint32_t i = 0; i < spec.item_count; ++i)
            present[i] = rng.bernoulli(base[i]);

        for (const auto& rule : spec.rules) {
            if (rule.probability == 0.0) continue;
            const bool has_antecedent =
                std::all_of(rule.antecedent.begin(), rule.antecedent.end(),
                            [&](std::uint32_t i) { return present[i]; });
            if (!has_antecedent) continue;
            const bool fire = rng.bernoulli(rule.probability);
            for (auto i : rule.consequent) present[i] = fire;
        }

        TransactionRow row;
        row.date = spec.start_day + static_cast<std::int32_t>(rng.below(spec.day_span));
        for (std::uint32_t i = 0; i < spec.item_count; ++i)
            if (present[i])
                row.quantities.emplace_back(i, 1 + static_cast<std::uint32_t>(rng.below(3)));
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace basketlab
