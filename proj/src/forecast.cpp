#include "basketlab/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "basketlab/error.hpp"

namespace basketlab {

InstanceTable build_instances(const DailySeries& series, std::uint32_t item,
                              std::uint32_t lag_window) {
    if (lag_window < 1) throw Error::data("lag window must be at least 1");
    if (item >= series.catalog.size())
        throw Error::data("item index outside catalog");
    if (series.num_days <= lag_window)
        throw Error::data("series of " + std::to_string(series.num_days) +
                          " days is too short for lag window " +
                          std::to_string(lag_window));

    InstanceTable table;
    table.feature_names.reserve(2 + lag_window);
    table.feature_names.emplace_back("day_ordinal");
    table.feature_names.emplace_back("day_of_week");
    for (std::uint32_t l = 1; l <= lag_window; ++l)
        table.feature_names.push_back("lag_" + std::to_string(l));

    const auto& totals = series.totals[item];
    for (std::uint32_t t = lag_window; t < series.num_days; ++t) {
        std::vector<double> row;
        row.reserve(table.feature_names.size());
        row.push_back(static_cast<double>(t));
        row.push_back(static_cast<double>(day_of_week(series.day(t))));
        for (std::uint32_t l = 1; l <= lag_window; ++l)
            row.push_back(static_cast<double>(totals[t - l]));
        table.features.push_back(std::move(row));
        table.targets.push_back(static_cast<double>(totals[t]));
    }
    return table;
}

std::vector<std::uint64_t> forecast_horizon(const ModelTree& tree,
                                            const DailySeries& series,
                                            std::uint32_t item,
                                            const ForecastParams& params) {
    if (params.horizon < 1) throw Error::data("forecast horizon must be at least 1");
    const std::uint32_t w = params.lag_window;
    if (item >= series.catalog.size())
        throw Error::data("item index outside catalog");
    if (series.num_days < w)
        throw Error::data("series shorter than the lag window");
    if (tree.feature_count() != 2 + static_cast<std::size_t>(w))
        throw Error::data("tree was trained with a different lag window");

    std::vector<double> history(series.totals[item].begin(),
                                series.totals[item].end());
    std::vector<std::uint64_t> out;
    out.reserve(params.horizon);
    for (std::uint32_t step = 0; step < params.horizon; ++step) {
        const std::size_t t = history.size();
        std::vector<double> row;
        row.reserve(2 + w);
        row.push_back(static_cast<double>(t));
        row.push_back(static_cast<double>(
            day_of_week(series.start + static_cast<std::int32_t>(t))));
        for (std::uint32_t l = 1; l <= w; ++l) row.push_back(history[t - l]);
        const double raw = tree.predict(row, params.smoothing);
        const auto count =
            static_cast<std::uint64_t>(std::llround(std::max(0.0, raw)));
        out.push_back(count);
        history.push_back(static_cast<double>(count));
    }
    return out;
}

} // namespace basketlab
