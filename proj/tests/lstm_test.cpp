#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "drsim/error.hpp"
#include "drsim/forecast/lstm.hpp"

using namespace drsim;
using namespace drsim::forecast;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Counts the entries of arrays built for `config` one by one.
std::size_t counted_params(const ModelConfig& config) {
    const auto p = zero_params(config);
    std::size_t n = 0;
    for (const auto& layer : p.layers) {
        n += static_cast<std::size_t>(layer.w.size() + layer.u.size() + layer.b.size());
    }
    return n + static_cast<std::size_t>(p.head_w.size() + p.head_b.size());
}

ForecastModel random_model(std::mt19937_64& rng, const ModelConfig& config, double scale) {
    auto model = init_model(config, rng());
    std::uniform_real_distribution<double> u(-scale, scale);
    for (auto block : model.params.blocks()) {
        for (auto& v : block) v = u(rng);
    }
    return model;
}

std::vector<std::vector<double>> random_rows(std::mt19937_64& rng, std::size_t rows, std::size_t width) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> out(rows, std::vector<double>(width));
    for (auto& r : out) {
        for (auto& v : r) v = u(rng);
    }
    return out;
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over all parameters.
double max_gradient_error(const ForecastModel& model, const std::vector<std::vector<double>>& x,
                          const std::vector<std::vector<double>>& y, double step, double floor) {
    const auto analytic = gradients(model, x, y);
    const auto grad_blocks = analytic.grad.blocks();
    ForecastModel probe = model;
    auto blocks = probe.params.blocks();
    double worst = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (std::size_t i = 0; i < blocks[b].size(); ++i) {
            const double saved = blocks[b][i];
            blocks[b][i] = saved + step;
            const double up = batch_loss(probe, x, y);
            blocks[b][i] = saved - step;
            const double down = batch_loss(probe, x, y);
            blocks[b][i] = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double a = grad_blocks[b][i];
            const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
            worst = std::max(worst, err);
        }
    }
    return worst;
}

}  // namespace

TEST(ParamCount, ClosedFormMatchesKnownSizes) {
    EXPECT_EQ(param_count({3, 1, {128, 128}}), 198273u);
    EXPECT_EQ(param_count({3, 1, {1}}), 14u);
    EXPECT_EQ(param_count({3, 1, {8}}), 329u);
}

TEST(ParamCount, ClosedFormMatchesConstructedArrays) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> layers(1, 3), width(1, 40), horizon(1, 4);
    for (int trial = 0; trial < 10; ++trial) {
        ModelConfig c;
        c.horizon = horizon(rng);
        c.hidden.resize(layers(rng));
        for (auto& h : c.hidden) h = width(rng);
        EXPECT_EQ(param_count(c), counted_params(c));
        EXPECT_EQ(init_model(c, 1).params.size(), param_count(c));
    }
}

TEST(ParamCount, RejectsEmptyLayers) {
    EXPECT_THROW(zero_params({3, 1, {}}), std::invalid_argument);
    EXPECT_THROW(zero_params({3, 1, {4, 0}}), std::invalid_argument);
}

TEST(Forward, ZeroNetworkOutputsZero) {
    ForecastModel m;
    m.config = {3, 1, {4, 4}};
    m.params = zero_params(m.config);
    EXPECT_EQ(forward(m, std::vector<double>{0.3, 0.9, -1.0}), std::vector<double>({0.0}));
}

TEST(Forward, WrongWindowLengthThrows) {
    const auto m = init_model({3, 1, {4}}, 0);
    EXPECT_THROW(forward(m, std::vector<double>{1.0, 2.0}), ShapeMismatchError);
}

TEST(Forward, ScalarCellMatchesHandComputation) {
    ForecastModel m;
    m.config = {1, 1, {1}};
    m.params = zero_params(m.config);
    auto& l = m.params.layers[0];
    const double wi = 0.3, wf = -0.2, wg = 0.7, wo = 0.5;
    const double bi = 0.1, bf = 0.4, bg = -0.3, bo = 0.2;
    l.w_gate(Gate::Input)(0, 0) = wi;
    l.w_gate(Gate::Forget)(0, 0) = wf;
    l.w_gate(Gate::Cell)(0, 0) = wg;
    l.w_gate(Gate::Output)(0, 0) = wo;
    l.b_gate(Gate::Input)(0) = bi;
    l.b_gate(Gate::Forget)(0) = bf;
    l.b_gate(Gate::Cell)(0) = bg;
    l.b_gate(Gate::Output)(0) = bo;
    m.params.head_w(0, 0) = 1.5;
    m.params.head_b(0) = -0.25;

    const double x = 1.0;
    const double i = sigmoid(wi * x + bi);
    const double f = sigmoid(wf * x + bf);
    const double g = std::tanh(wg * x + bg);
    const double o = sigmoid(wo * x + bo);
    const double c = f * 0.0 + i * g;
    const double h = o * std::tanh(c);
    EXPECT_NEAR(forward(m, std::vector<double>{x})[0], 1.5 * h - 0.25, 1e-15);
}

TEST(Forward, TwoStepRecurrenceMatchesHandComputation) {
    ForecastModel m;
    m.config = {2, 1, {1}};
    m.params = zero_params(m.config);
    auto& l = m.params.layers[0];
    const double w[4] = {0.4, -0.3, 0.9, 0.2}, u[4] = {0.5, 0.6, -0.7, 0.8}, b[4] = {0.0, 1.0, 0.1, -0.1};
    for (int k = 0; k < 4; ++k) {
        l.w(k, 0) = w[k];
        l.u(k, 0) = u[k];
        l.b(k) = b[k];
    }
    m.params.head_w(0, 0) = 1.0;
    double h = 0.0, c = 0.0;
    for (double x : {0.2, 0.8}) {
        const double i = sigmoid(w[0] * x + u[0] * h + b[0]);
        const double f = sigmoid(w[1] * x + u[1] * h + b[1]);
        const double g = std::tanh(w[2] * x + u[2] * h + b[2]);
        const double o = sigmoid(w[3] * x + u[3] * h + b[3]);
        c = f * c + i * g;
        h = o * std::tanh(c);
    }
    EXPECT_NEAR(forward(m, std::vector<double>{0.2, 0.8})[0], h, 1e-15);
}

TEST(Forward, SaturatedGatesReduceToClosedForm) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Eigen::Index h = 3;
    ForecastModel m;
    m.config = {1, 1, {static_cast<std::size_t>(h)}};
    m.params = zero_params(m.config);
    auto& l = m.params.layers[0];
    for (Eigen::Index r = 0; r < h; ++r) {
        l.w_gate(Gate::Cell)(r, 0) = u(rng);
        l.b_gate(Gate::Cell)(r) = u(rng);
        l.b_gate(Gate::Input)(r) = 50.0;
        l.b_gate(Gate::Output)(r) = 50.0;
        l.b_gate(Gate::Forget)(r) = -50.0;
        m.params.head_w(0, r) = u(rng);
    }
    const double x = 0.6;
    double expected = 0.0;
    for (Eigen::Index r = 0; r < h; ++r) {
        const double hr = std::tanh(std::tanh(l.w_gate(Gate::Cell)(r, 0) * x + l.b_gate(Gate::Cell)(r)));
        expected += m.params.head_w(0, r) * hr;
    }
    EXPECT_NEAR(forward(m, std::vector<double>{x})[0], expected, 1e-12);
}

TEST(Forward, OutputBoundedByHeadWeights) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        ModelConfig c{3, 2, {static_cast<std::size_t>(1 + trial % 6), static_cast<std::size_t>(1 + trial % 4)}};
        const auto m = random_model(rng, c, 3.0);
        const auto window = random_rows(rng, 1, 3)[0];
        const auto out = forward(m, window);
        for (Eigen::Index k = 0; k < m.params.head_w.rows(); ++k) {
            const double bound = m.params.head_w.row(k).cwiseAbs().sum() + std::abs(m.params.head_b(k));
            EXPECT_LE(std::abs(out[static_cast<std::size_t>(k)]), bound);
        }
    }
}

TEST(Forward, BatchMatchesSingleWindows) {
    std::mt19937_64 rng(2);
    const auto m = random_model(rng, {3, 2, {5, 3}}, 1.0);
    const auto x = random_rows(rng, 7, 3);
    const auto batch = forward_batch(m, x);
    ASSERT_EQ(batch.rows(), 2);
    ASSERT_EQ(batch.cols(), 7);
    for (std::size_t s = 0; s < x.size(); ++s) {
        const auto single = forward(m, x[s]);
        for (std::size_t k = 0; k < 2; ++k) {
            EXPECT_NEAR(batch(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)), single[k], 1e-14);
        }
    }
}

TEST(InitModel, SeededRangesAndForgetBias) {
    const ModelConfig c{3, 1, {16, 8}};
    const auto a = init_model(c, 5);
    EXPECT_EQ(a, init_model(c, 5));
    EXPECT_FALSE(a == init_model(c, 6));
    const double bound0 = 1.0 / std::sqrt(16.0);
    EXPECT_LE(a.params.layers[0].w.cwiseAbs().maxCoeff(), bound0);
    EXPECT_LE(a.params.layers[0].u.cwiseAbs().maxCoeff(), bound0);
    EXPECT_TRUE((a.params.layers[1].b_gate(Gate::Forget).array() == 1.0).all());
    EXPECT_TRUE((a.params.layers[1].b_gate(Gate::Input).array() == 0.0).all());
    EXPECT_LE(a.params.head_w.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(8.0));
}

TEST(Gradients, MatchCentralDifferences) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        ModelConfig c;
        c.lookback = 3;
        c.horizon = 1 + trial % 2;
        c.hidden = trial % 2 == 0 ? std::vector<std::size_t>{static_cast<std::size_t>(1 + trial % 8)}
                                  : std::vector<std::size_t>{static_cast<std::size_t>(1 + trial % 8), 4};
        const auto m = random_model(rng, c, 0.8);
        const auto x = random_rows(rng, 5, 3);
        const auto y = random_rows(rng, 5, c.horizon);
        EXPECT_LT(max_gradient_error(m, x, y, 1e-5, 1e-6), 1e-4) << "trial " << trial;
    }
}

TEST(Gradients, ZeroModelZeroTargetsIsStationaryOnHeadBias) {
    ForecastModel m;
    m.config = {3, 1, {4}};
    m.params = zero_params(m.config);
    const std::vector<std::vector<double>> x = {{0.1, 0.5, 0.9}, {0.3, 0.2, 0.7}};
    const std::vector<std::vector<double>> y = {{0.0}, {0.0}};
    const auto g = gradients(m, x, y);
    EXPECT_EQ(g.loss, 0.0);
    EXPECT_EQ(g.grad.head_b(0), 0.0);
    const double step = 1e-5;
    ForecastModel up = m, down = m;
    up.params.head_b(0) = step;
    down.params.head_b(0) = -step;
    EXPECT_NEAR((batch_loss(up, x, y) - batch_loss(down, x, y)) / (2 * step), 0.0, 1e-12);
}

TEST(Gradients, DuplicatedSampleLeavesMeanGradientUnchanged) {
    std::mt19937_64 rng(7);
    const auto m = random_model(rng, {3, 1, {6}}, 0.7);
    const auto x = random_rows(rng, 1, 3);
    const auto y = random_rows(rng, 1, 1);
    const auto single = gradients(m, x, y);
    const auto doubled = gradients(m, std::vector<std::vector<double>>{x[0], x[0]},
                                   std::vector<std::vector<double>>{y[0], y[0]});
    EXPECT_NEAR(single.loss, doubled.loss, 1e-15);
    const auto a = single.grad.blocks();
    const auto b = doubled.grad.blocks();
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < a[k].size(); ++i) {
            EXPECT_NEAR(a[k][i], b[k][i], 1e-14 * std::max(1.0, std::abs(a[k][i])));
        }
    }
}

TEST(Gradients, LossMatchesForwardPass) {
    std::mt19937_64 rng(12);
    const auto m = random_model(rng, {3, 2, {4, 4}}, 1.0);
    const auto x = random_rows(rng, 6, 3);
    const auto y = random_rows(rng, 6, 2);
    double sum = 0.0;
    for (std::size_t s = 0; s < x.size(); ++s) {
        const auto p = forward(m, x[s]);
        for (std::size_t k = 0; k < 2; ++k) sum += (p[k] - y[s][k]) * (p[k] - y[s][k]);
    }
    EXPECT_NEAR(gradients(m, x, y).loss, sum / 12.0, 1e-14);
    EXPECT_NEAR(batch_loss(m, x, y), sum / 12.0, 1e-14);
}
