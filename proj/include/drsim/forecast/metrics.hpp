#pragma once

#include <span>

#include "drsim/forecast/dataset.hpp"
#include "drsim/forecast/lstm.hpp"

namespace drsim::forecast {

struct EvalMetrics {
    double mae = 0.0;
    double mape = 0.0;  // percent
    double r2 = 0.0;
};

/// Targets with |y| <= this are left out of MAPE.
inline constexpr double kMapeEpsilon = 1e-8;

/// MAE, MAPE (%) and R^2 of `predicted` against `actual`.
/// Throws AllTargetsNearZeroError when no target qualifies for MAPE.
EvalMetrics compute_metrics(std::span<const double> actual, std::span<const double> predicted);

enum class MetricScale { Denormalized, Normalized };

/// Runs the model over `test_set` (normalized windows) and scores it.
EvalMetrics evaluate(const ForecastModel& model, const WindowDataset& test_set,
                     MetricScale scale = MetricScale::Denormalized);

/// Scores the persistence forecaster (repeat the last input) on the same set.
EvalMetrics evaluate_persistence(const WindowDataset& test_set, const NormParams& norm,
                                 MetricScale scale = MetricScale::Denormalized);

}  // namespace drsim::forecast
