#pragma once

// Min-max scaling, sliding-window sample construction and the
// chronological train/test split.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace drsim::forecast {

/// Scaling constants; construction rejects max <= min.
class NormParams {
public:
    NormParams(double min, double max);

    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }

    double normalize(double x) const noexcept { return (x - min_) / (max_ - min_); }
    double denormalize(double x) const noexcept { return x * (max_ - min_) + min_; }

    bool operator==(const NormParams&) const = default;

private:
    double min_;
    double max_;
};

struct Normalized {
    std::vector<double> values;
    NormParams norm;
};

/// x' = (x - min) / (max - min). Needs at least two values and max > min.
Normalized minmax_normalize(std::span<const double> values);

/// Scales with existing constants (e.g. statistics of the training prefix).
std::vector<double> normalize_with(std::span<const double> values, const NormParams& norm);
std::vector<double> denormalize(std::span<const double> values, const NormParams& norm);

/// Supervised samples: X[i] = values[i, i+L), Y[i] = values[i+L, i+L+H).
struct WindowDataset {
    std::size_t lookback = 3;
    std::size_t horizon = 1;
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> y;

    std::size_t size() const noexcept { return x.size(); }
    bool empty() const noexcept { return x.empty(); }
};

WindowDataset make_windows(std::span<const double> values, std::size_t lookback = 3, std::size_t horizon = 1);

/// Number of samples make_windows yields; throws InsufficientDataError when N < L + H.
std::size_t window_count(std::size_t n, std::size_t lookback, std::size_t horizon);

/// Test set = last floor(n * test_ratio) samples; no shuffling.
std::pair<WindowDataset, WindowDataset> chrono_split(const WindowDataset& dataset, double test_ratio = 0.2);

}  // namespace drsim::forecast
