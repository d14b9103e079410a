#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "drsim/forecast/dataset.hpp"
#include "drsim/forecast/lstm.hpp"

namespace drsim::forecast {

enum class Optimizer { Adam, Sgd };

std::optional<Optimizer> parse_optimizer(std::string_view name);

struct TrainConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    std::uint64_t seed = 0;
    bool shuffle = true;  // reshuffle mini-batches each epoch (seeded)
};

struct TrainResult {
    ForecastModel model;
    std::vector<double> loss_trace;  // mean training MSE per epoch
};

/// Mini-batch training on MSE from a seeded initialization.
/// Throws NonFiniteLossError carrying the zero-based epoch index.
TrainResult train(const WindowDataset& train_set, const ModelConfig& model_config, const TrainConfig& config);

/// Same, continuing from `initial` (its config and norm are kept).
TrainResult train(const WindowDataset& train_set, ForecastModel initial, const TrainConfig& config);

}  // namespace drsim::forecast
