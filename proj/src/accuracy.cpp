#include "basketlab/accuracy.hpp"

#include <algorithm>
#include <cmath>

#include "basketlab/error.hpp"

namespace basketlab {

namespace {

// Half-up rounding for non-negative values.
long long round_half_up(double x) { return std::llround(x); }

double round_1dp(double x) {
    return static_cast<double>(round_half_up(x * 10.0)) / 10.0;
}

} // namespace

int prediction_accuracy(double predicted, double actual) {
    if (predicted < 0.0 || actual < 0.0)
        throw Error::data("prediction accuracy requires non-negative inputs");
    if (predicted == 0.0 && actual == 0.0) return 100;
    const double lo = std::min(predicted, actual);
    const double hi = std::max(predicted, actual);
    return static_cast<int>(round_half_up(100.0 * lo / hi));
}

AccuracyReport accuracy_table(const std::vector<std::string>& products,
                              const std::vector<std::vector<std::uint64_t>>& predicted,
                              const std::vector<std::vector<std::uint64_t>>& actual,
                              int threshold_pct) {
    if (products.empty()) throw Error::data("accuracy table requires at least one product");
    if (predicted.size() != products.size() || actual.size() != products.size())
        throw Error::data("accuracy table shape mismatch: product count");
    const std::size_t days = predicted.front().size();
    if (days == 0) throw Error::data("accuracy table requires at least one day");
    for (std::size_t i = 0; i < products.size(); ++i)
        if (predicted[i].size() != days || actual[i].size() != days)
            throw Error::data("accuracy table shape mismatch for product '" +
                              products[i] + "'");
    if (threshold_pct < 0 || threshold_pct > 100)
        throw Error::data("threshold_pct must be in [0,100]");

    AccuracyReport report;
    report.products = products;
    report.predicted = predicted;
    report.actual = actual;
    report.threshold_pct = threshold_pct;
    report.accuracy_pct.resize(products.size());
    for (std::size_t i = 0; i < products.size(); ++i) {
        report.accuracy_pct[i].reserve(days);
        for (std::size_t d = 0; d < days; ++d)
            report.accuracy_pct[i].push_back(
                prediction_accuracy(static_cast<double>(predicted[i][d]),
                                    static_cast<double>(actual[i][d])));
    }

    const double n = static_cast<double>(products.size());
    for (std::size_t d = 0; d < days; ++d) {
        double sum_p = 0.0, sum_r = 0.0, sum_pct = 0.0;
        for (std::size_t i = 0; i < products.size(); ++i) {
            sum_p += static_cast<double>(predicted[i][d]);
            sum_r += static_cast<double>(actual[i][d]);
            sum_pct += report.accuracy_pct[i][d];
        }
        report.avg_predicted.push_back(round_1dp(sum_p / n));
        report.avg_actual.push_back(round_1dp(sum_r / n));
        report.avg_accuracy_pct.push_back(
            static_cast<int>(round_half_up(sum_pct / n)));
    }

    report.validity_horizon = validity_horizon(report.avg_accuracy_pct, threshold_pct);
    return report;
}

int validity_horizon(const std::vector<int>& avg_accuracy_pct, int threshold_pct) {
    if (avg_accuracy_pct.empty())
        throw Error::data("validity horizon requires a non-empty accuracy vector");
    int horizon = 0;
    for (int pct : avg_accuracy_pct) {
        if (pct < threshold_pct) break;
        ++horizon;
    }
    return horizon;
}

} // namespace basketlab
