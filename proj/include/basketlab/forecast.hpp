#pragma once

#include <cstdint>
#include <vector>

#include "basketlab/dataset.hpp"
#include "basketlab/model_tree.hpp"

namespace basketlab {

struct ForecastParams {
    std::uint32_t lag_window = 7;
    std::uint32_t horizon = 5;
    bool smoothing = true;
    TreeParams tree;
};

// Autoregressive training table for one item: row t has target totals[t] and
// features (day ordinal t, day-of-week, totals[t-1] .. totals[t-w]).
InstanceTable build_instances(const DailySeries& series, std::uint32_t item,
                              std::uint32_t lag_window);

// Iterated one-step-ahead forecast. Day +1 uses the true trailing lags; each
// later day rolls the previous reported count into the window. Raw outputs
// are clamped at zero and rounded half-up, so the results are counts.
std::vector<std::uint64_t> forecast_horizon(const ModelTree& tree,
                                            const DailySeries& series,
                                            std::uint32_t item,
                                            const ForecastParams& params);

} // namespace basketlab
