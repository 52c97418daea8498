#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace basketlab {

// Percent agreement between a predicted and an actual count:
// round_half_up(100 * min(p,r) / max(p,r)). Two zeros agree perfectly (100).
int prediction_accuracy(double predicted, double actual);

// Per-product, per-day accuracy grid with the average row. The average
// accuracy column is the mean of the already-rounded per-product percentages;
// the average count columns are rounded half-up to one decimal.
struct AccuracyReport {
    std::vector<std::string> products;
    std::vector<std::vector<std::uint64_t>> predicted;  // [product][day]
    std::vector<std::vector<std::uint64_t>> actual;     // [product][day]
    std::vector<std::vector<int>> accuracy_pct;         // [product][day]
    std::vector<double> avg_predicted;                  // per day, 1 decimal
    std::vector<double> avg_actual;                     // per day, 1 decimal
    std::vector<int> avg_accuracy_pct;                  // per day
    int threshold_pct = 70;
    int validity_horizon = 0;
};

AccuracyReport accuracy_table(const std::vector<std::string>& products,
                              const std::vector<std::vector<std::uint64_t>>& predicted,
                              const std::vector<std::vector<std::uint64_t>>& actual,
                              int threshold_pct = 70);

// Length of the longest prefix whose every entry meets the threshold: the
// number of leading days on which forecast-extended rules stay trustworthy.
int validity_horizon(const std::vector<int>& avg_accuracy_pct, int threshold_pct);

} // namespace basketlab
