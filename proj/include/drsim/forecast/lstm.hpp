#pragma once

// Stacked LSTM regressor with a dense head.
//
// Each layer stores its four gates stacked row-wise in the order
// (input, forget, cell, output): W is (4h x in), U is (4h x h), b is (4h).
// The head maps the last layer's final hidden state to `horizon` outputs.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "drsim/forecast/dataset.hpp"

namespace drsim::forecast {

enum class Gate : int { Input = 0, Forget = 1, Cell = 2, Output = 3 };
inline constexpr int kGateCount = 4;

struct ModelConfig {
    std::size_t lookback = 3;
    std::size_t horizon = 1;
    std::vector<std::size_t> hidden = {128, 128};

    bool operator==(const ModelConfig&) const = default;
};

struct LstmLayerParams {
    Eigen::MatrixXd w;  // (4h x in)
    Eigen::MatrixXd u;  // (4h x h)
    Eigen::VectorXd b;  // (4h)

    LstmLayerParams() = default;
    LstmLayerParams(Eigen::Index in, Eigen::Index hidden);

    Eigen::Index input_width() const { return w.cols(); }
    Eigen::Index hidden_size() const { return u.cols(); }

    // Per-gate views, each (h x in), (h x h) and (h).
    auto w_gate(Gate g) { return w.middleRows(static_cast<int>(g) * hidden_size(), hidden_size()); }
    auto w_gate(Gate g) const { return w.middleRows(static_cast<int>(g) * hidden_size(), hidden_size()); }
    auto u_gate(Gate g) { return u.middleRows(static_cast<int>(g) * hidden_size(), hidden_size()); }
    auto u_gate(Gate g) const { return u.middleRows(static_cast<int>(g) * hidden_size(), hidden_size()); }
    auto b_gate(Gate g) { return b.segment(static_cast<int>(g) * hidden_size(), hidden_size()); }
    auto b_gate(Gate g) const { return b.segment(static_cast<int>(g) * hidden_size(), hidden_size()); }
};

/// Trainable parameters. Also used as the gradient structure.
struct LstmParams {
    std::vector<LstmLayerParams> layers;
    Eigen::MatrixXd head_w;  // (horizon x h_last)
    Eigen::VectorXd head_b;  // (horizon)

    /// Contiguous storage of every parameter array.
    std::vector<std::span<double>> blocks();
    std::vector<std::span<const double>> blocks() const;

    std::size_t size() const;
    void set_zero();
    bool all_finite() const;

    bool operator==(const LstmParams& other) const;
};

struct ForecastModel {
    ModelConfig config;
    LstmParams params;
    NormParams norm{0.0, 1.0};

    bool operator==(const ForecastModel&) const = default;
};

/// sum over layers of 4(in*h + h^2 + h), plus horizon * (h_last + 1) for the head.
std::size_t param_count(const ModelConfig& config);

/// Parameter arrays shaped for `config`, all zero. Throws std::invalid_argument
/// for an empty layer list or zero widths.
LstmParams zero_params(const ModelConfig& config);

/// Seeded init: weights uniform in +-1/sqrt(h) per layer, biases zero except
/// the forget gate (1.0). The head uses +-1/sqrt(h_last).
ForecastModel init_model(const ModelConfig& config, std::uint64_t seed);

/// Runs one normalized window through the network; returns `horizon` values.
std::vector<double> forward(const ForecastModel& model, std::span<const double> window);

/// Batched forward pass over samples; result is (horizon x batch).
Eigen::MatrixXd forward_batch(const ForecastModel& model, std::span<const std::vector<double>> windows);

struct GradientResult {
    LstmParams grad;
    double loss = 0.0;  // mean squared error over batch and horizon
};

/// Exact gradient of the batch MSE by backpropagation through time.
GradientResult gradients(const ForecastModel& model, std::span<const std::vector<double>> x,
                         std::span<const std::vector<double>> y);

/// MSE only, without the backward pass.
double batch_loss(const ForecastModel& model, std::span<const std::vector<double>> x,
                  std::span<const std::vector<double>> y);

}  // namespace drsim::forecast
