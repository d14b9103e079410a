#include "drsim/forecast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "drsim/error.hpp"

namespace drsim::forecast {

NormParams::NormParams(double min, double max) : min_(min), max_(max) {
    if (!(max > min) || !std::isfinite(min) || !std::isfinite(max)) {
        throw DegenerateRangeError();
    }
}

Normalized minmax_normalize(std::span<const double> values) {
    if (values.size() < 2) {
        throw InsufficientDataError("min-max normalization needs at least 2 values");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    NormParams norm(*lo, *hi);
    return {normalize_with(values, norm), norm};
}

std::vector<double> normalize_with(std::span<const double> values, const NormParams& norm) {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [&](double x) { return norm.normalize(x); });
    return out;
}

std::vector<double> denormalize(std::span<const double> values, const NormParams& norm) {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [&](double x) { return norm.denormalize(x); });
    return out;
}

std::size_t window_count(std::size_t n, std::size_t lookback, std::size_t horizon) {
    if (lookback == 0 || horizon == 0) {
        throw std::invalid_argument("lookback and horizon must be positive");
    }
    if (n < lookback + horizon) {
        throw InsufficientDataError("series of length " + std::to_string(n) + " is shorter than lookback + horizon (" +
                                    std::to_string(lookback + horizon) + ")");
    }
    return n - lookback - horizon + 1;
}

WindowDataset make_windows(std::span<const double> values, std::size_t lookback, std::size_t horizon) {
    const std::size_t count = window_count(values.size(), lookback, horizon);
    WindowDataset ds;
    ds.lookback = lookback;
    ds.horizon = horizon;
    ds.x.reserve(count);
    ds.y.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto xs = values.subspan(i, lookback);
        const auto ys = values.subspan(i + lookback, horizon);
        ds.x.emplace_back(xs.begin(), xs.end());
        ds.y.emplace_back(ys.begin(), ys.end());
    }
    return ds;
}

std::pair<WindowDataset, WindowDataset> chrono_split(const WindowDataset& dataset, double test_ratio) {
    if (!(test_ratio > 0.0 && test_ratio < 1.0)) {
        throw std::invalid_argument("test ratio must lie in (0, 1)");
    }
    const std::size_t n = dataset.size();
    const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_ratio));
    if (n_test == 0 || n_test >= n) {
        throw EmptySplitError("split of " + std::to_string(n) + " samples at ratio " + std::to_string(test_ratio) +
                              " leaves an empty side");
    }
    const std::size_t n_train = n - n_test;
    WindowDataset train{dataset.lookback, dataset.horizon, {}, {}};
    WindowDataset test{dataset.lookback, dataset.horizon, {}, {}};
    train.x.assign(dataset.x.begin(), dataset.x.begin() + static_cast<std::ptrdiff_t>(n_train));
    train.y.assign(dataset.y.begin(), dataset.y.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.x.assign(dataset.x.begin() + static_cast<std::ptrdiff_t>(n_train), dataset.x.end());
    test.y.assign(dataset.y.begin() + static_cast<std::ptrdiff_t>(n_train), dataset.y.end());
    return {std::move(train), std::move(test)};
}

}  // namespace drsim::forecast
