#include "drsim/forecast/metrics.hpp"

#include <cmath>
#include <vector>

#include "drsim/error.hpp"

namespace drsim::forecast {

EvalMetrics compute_metrics(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty() || actual.size() != predicted.size()) {
        throw ShapeMismatchError("metrics need equally sized, non-empty inputs");
    }
    const auto n = static_cast<double>(actual.size());
    double abs_sum = 0.0;
    double pct_sum = 0.0;
    std::size_t pct_terms = 0;
    double mean = 0.0;
    for (double y : actual) {
        mean += y;
    }
    mean /= n;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double err = actual[i] - predicted[i];
        abs_sum += std::abs(err);
        if (std::abs(actual[i]) > kMapeEpsilon) {
            pct_sum += std::abs(err) / std::abs(actual[i]);
            ++pct_terms;
        }
        ss_res += err * err;
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (pct_terms == 0) {
        throw AllTargetsNearZeroError();
    }
    EvalMetrics m;
    m.mae = abs_sum / n;
    m.mape = 100.0 * pct_sum / static_cast<double>(pct_terms);
    // Constant targets: R^2 is 1 for an exact fit and -inf-like otherwise; report 0.
    m.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return m;
}

namespace {

EvalMetrics score(const WindowDataset& set, const Eigen::MatrixXd& pred, const NormParams& norm,
                  MetricScale scale) {
    std::vector<double> actual;
    std::vector<double> predicted;
    actual.reserve(static_cast<std::size_t>(pred.size()));
    predicted.reserve(static_cast<std::size_t>(pred.size()));
    for (std::size_t s = 0; s < set.size(); ++s) {
        for (std::size_t k = 0; k < set.horizon; ++k) {
            double y = set.y[s][k];
            double p = pred(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s));
            if (scale == MetricScale::Denormalized) {
                y = norm.denormalize(y);
                p = norm.denormalize(p);
            }
            actual.push_back(y);
            predicted.push_back(p);
        }
    }
    return compute_metrics(actual, predicted);
}

}  // namespace

EvalMetrics evaluate(const ForecastModel& model, const WindowDataset& test_set, MetricScale scale) {
    if (test_set.empty()) {
        throw InsufficientDataError("test set is empty");
    }
    return score(test_set, forward_batch(model, test_set.x), model.norm, scale);
}

EvalMetrics evaluate_persistence(const WindowDataset& test_set, const NormParams& norm, MetricScale scale) {
    if (test_set.empty()) {
        throw InsufficientDataError("test set is empty");
    }
    Eigen::MatrixXd pred(static_cast<Eigen::Index>(test_set.horizon), static_cast<Eigen::Index>(test_set.size()));
    for (std::size_t s = 0; s < test_set.size(); ++s) {
        pred.col(static_cast<Eigen::Index>(s)).setConstant(test_set.x[s].back());
    }
    return score(test_set, pred, norm, scale);
}

}  // namespace drsim::forecast
