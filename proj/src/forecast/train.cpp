#include "drsim/forecast/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "drsim/error.hpp"

namespace drsim::forecast {

namespace {

class Adam {
public:
    explicit Adam(const LstmParams& shape, double lr) : lr_(lr) {
        for (const auto& b : shape.blocks()) {
            m_.emplace_back(b.size(), 0.0);
            v_.emplace_back(b.size(), 0.0);
        }
    }

    void step(LstmParams& params, const LstmParams& grad) {
        ++t_;
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
        auto p_blocks = params.blocks();
        const auto g_blocks = grad.blocks();
        for (std::size_t k = 0; k < p_blocks.size(); ++k) {
            auto p = p_blocks[k];
            const auto g = g_blocks[k];
            auto& m = m_[k];
            auto& v = v_[k];
            for (std::size_t i = 0; i < p.size(); ++i) {
                m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
                v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
                p[i] -= lr_ * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kEps);
            }
        }
    }

private:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    double lr_;
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

void sgd_step(LstmParams& params, const LstmParams& grad, double lr) {
    auto p_blocks = params.blocks();
    const auto g_blocks = grad.blocks();
    for (std::size_t k = 0; k < p_blocks.size(); ++k) {
        for (std::size_t i = 0; i < p_blocks[k].size(); ++i) {
            p_blocks[k][i] -= lr * g_blocks[k][i];
        }
    }
}

}  // namespace

std::optional<Optimizer> parse_optimizer(std::string_view name) {
    if (name == "adam") return Optimizer::Adam;
    if (name == "sgd") return Optimizer::Sgd;
    return std::nullopt;
}

TrainResult train(const WindowDataset& train_set, const ModelConfig& model_config, const TrainConfig& config) {
    return train(train_set, init_model(model_config, config.seed), config);
}

TrainResult train(const WindowDataset& train_set, ForecastModel initial, const TrainConfig& config) {
    if (train_set.empty()) {
        throw InsufficientDataError("training set is empty");
    }
    if (config.batch_size == 0) {
        throw std::invalid_argument("batch size must be positive");
    }
    if (train_set.lookback != initial.config.lookback || train_set.horizon != initial.config.horizon) {
        throw ShapeMismatchError("dataset lookback/horizon do not match the model");
    }

    TrainResult result{std::move(initial), {}};
    auto& model = result.model;
    Adam adam(model.params, config.learning_rate);

    // Separate stream from the initializer so batch order does not alias the weights.
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<std::vector<double>> bx;
    std::vector<std::vector<double>> by;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.shuffle) {
            std::shuffle(order.begin(), order.end(), rng);
        }
        double weighted = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            bx.clear();
            by.clear();
            for (std::size_t k = start; k < end; ++k) {
                bx.push_back(train_set.x[order[k]]);
                by.push_back(train_set.y[order[k]]);
            }
            const auto g = gradients(model, bx, by);
            if (!std::isfinite(g.loss) || !g.grad.all_finite()) {
                throw NonFiniteLossError(epoch);
            }
            weighted += g.loss * static_cast<double>(end - start);
            if (config.optimizer == Optimizer::Adam) {
                adam.step(model.params, g.grad);
            } else {
                sgd_step(model.params, g.grad, config.learning_rate);
            }
        }
        const double epoch_loss = weighted / static_cast<double>(order.size());
        if (!std::isfinite(epoch_loss) || !model.params.all_finite()) {
            throw NonFiniteLossError(epoch);
        }
        result.loss_trace.push_back(epoch_loss);
    }
    return result;
}

}  // namespace drsim::forecast
