#include "drsim/forecast/lstm.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "drsim/error.hpp"

namespace drsim::forecast {

namespace {

using Eigen::ArrayXXd;
using Eigen::Index;
using Eigen::MatrixXd;

Index as_index(std::size_t n) { return static_cast<Index>(n); }

ArrayXXd sigmoid(const ArrayXXd& z) { return 1.0 / (1.0 + (-z).exp()); }

// Activations of one layer at one time step, each (h x batch).
struct StepCache {
    MatrixXd i, f, g, o;
    MatrixXd c, tanh_c, h;
};

struct LayerCache {
    std::vector<MatrixXd> inputs;  // x_t, (in x batch)
    std::vector<StepCache> steps;
};

// Layer-0 inputs: one (1 x batch) row per time step.
std::vector<MatrixXd> input_sequence(const ModelConfig& config, std::span<const std::vector<double>> windows) {
    const Index batch = as_index(windows.size());
    std::vector<MatrixXd> seq(config.lookback, MatrixXd(1, batch));
    for (Index s = 0; s < batch; ++s) {
        const auto& w = windows[static_cast<std::size_t>(s)];
        if (w.size() != config.lookback) {
            throw ShapeMismatchError("window length " + std::to_string(w.size()) + " does not match lookback " +
                                     std::to_string(config.lookback));
        }
        for (std::size_t t = 0; t < config.lookback; ++t) {
            seq[t](0, s) = w[t];
        }
    }
    return seq;
}

// Forward pass keeping every activation needed for BPTT.
std::vector<LayerCache> run_layers(const ForecastModel& model, std::vector<MatrixXd> seq) {
    const Index batch = seq.empty() ? 0 : seq.front().cols();
    std::vector<LayerCache> caches;
    caches.reserve(model.params.layers.size());
    for (const auto& layer : model.params.layers) {
        const Index h = layer.hidden_size();
        LayerCache cache;
        cache.inputs = std::move(seq);
        MatrixXd h_prev = MatrixXd::Zero(h, batch);
        MatrixXd c_prev = MatrixXd::Zero(h, batch);
        std::vector<MatrixXd> outputs;
        outputs.reserve(cache.inputs.size());
        for (const auto& x : cache.inputs) {
            MatrixXd z = layer.w * x + layer.u * h_prev;
            z.colwise() += layer.b;
            StepCache st;
            st.i = sigmoid(z.middleRows(0, h).array()).matrix();
            st.f = sigmoid(z.middleRows(h, h).array()).matrix();
            st.g = z.middleRows(2 * h, h).array().tanh().matrix();
            st.o = sigmoid(z.middleRows(3 * h, h).array()).matrix();
            st.c = (st.f.array() * c_prev.array() + st.i.array() * st.g.array()).matrix();
            st.tanh_c = st.c.array().tanh().matrix();
            st.h = (st.o.array() * st.tanh_c.array()).matrix();
            h_prev = st.h;
            c_prev = st.c;
            outputs.push_back(st.h);
            cache.steps.push_back(std::move(st));
        }
        seq = std::move(outputs);
        caches.push_back(std::move(cache));
    }
    return caches;
}

MatrixXd head_output(const ForecastModel& model, const MatrixXd& h_last) {
    MatrixXd out = model.params.head_w * h_last;
    out.colwise() += model.params.head_b;
    return out;
}

MatrixXd target_matrix(const ModelConfig& config, std::span<const std::vector<double>> y) {
    MatrixXd out(as_index(config.horizon), as_index(y.size()));
    for (std::size_t s = 0; s < y.size(); ++s) {
        if (y[s].size() != config.horizon) {
            throw ShapeMismatchError("target length " + std::to_string(y[s].size()) + " does not match horizon " +
                                     std::to_string(config.horizon));
        }
        for (std::size_t k = 0; k < config.horizon; ++k) {
            out(as_index(k), as_index(s)) = y[s][k];
        }
    }
    return out;
}

void validate_config(const ModelConfig& config) {
    if (config.hidden.empty()) {
        throw std::invalid_argument("model needs at least one LSTM layer");
    }
    if (config.lookback == 0 || config.horizon == 0) {
        throw std::invalid_argument("lookback and horizon must be positive");
    }
    for (auto h : config.hidden) {
        if (h == 0) {
            throw std::invalid_argument("hidden sizes must be positive");
        }
    }
}

}  // namespace

LstmLayerParams::LstmLayerParams(Index in, Index hidden)
    : w(MatrixXd::Zero(kGateCount * hidden, in)),
      u(MatrixXd::Zero(kGateCount * hidden, hidden)),
      b(Eigen::VectorXd::Zero(kGateCount * hidden)) {}

std::vector<std::span<double>> LstmParams::blocks() {
    std::vector<std::span<double>> out;
    for (auto& l : layers) {
        out.emplace_back(l.w.data(), static_cast<std::size_t>(l.w.size()));
        out.emplace_back(l.u.data(), static_cast<std::size_t>(l.u.size()));
        out.emplace_back(l.b.data(), static_cast<std::size_t>(l.b.size()));
    }
    out.emplace_back(head_w.data(), static_cast<std::size_t>(head_w.size()));
    out.emplace_back(head_b.data(), static_cast<std::size_t>(head_b.size()));
    return out;
}

std::vector<std::span<const double>> LstmParams::blocks() const {
    auto mut = const_cast<LstmParams*>(this)->blocks();
    return {mut.begin(), mut.end()};
}

std::size_t LstmParams::size() const {
    std::size_t n = 0;
    for (const auto& b : blocks()) {
        n += b.size();
    }
    return n;
}

void LstmParams::set_zero() {
    for (auto b : blocks()) {
        std::fill(b.begin(), b.end(), 0.0);
    }
}

bool LstmParams::all_finite() const {
    for (const auto& b : blocks()) {
        for (double v : b) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
    }
    return true;
}

bool LstmParams::operator==(const LstmParams& other) const {
    if (layers.size() != other.layers.size()) {
        return false;
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& a = layers[i];
        const auto& b = other.layers[i];
        if (a.w.rows() != b.w.rows() || a.w.cols() != b.w.cols() || a.u.cols() != b.u.cols()) {
            return false;
        }
        if (a.w != b.w || a.u != b.u || a.b != b.b) {
            return false;
        }
    }
    return head_w.rows() == other.head_w.rows() && head_w.cols() == other.head_w.cols() && head_w == other.head_w &&
           head_b == other.head_b;
}

std::size_t param_count(const ModelConfig& config) {
    validate_config(config);
    std::size_t total = 0;
    std::size_t in = 1;
    for (auto h : config.hidden) {
        total += 4 * (in * h + h * h + h);
        in = h;
    }
    return total + config.horizon * (config.hidden.back() + 1);
}

LstmParams zero_params(const ModelConfig& config) {
    validate_config(config);
    LstmParams p;
    Index in = 1;
    for (auto h : config.hidden) {
        p.layers.emplace_back(in, as_index(h));
        in = as_index(h);
    }
    p.head_w = MatrixXd::Zero(as_index(config.horizon), in);
    p.head_b = Eigen::VectorXd::Zero(as_index(config.horizon));
    return p;
}

ForecastModel init_model(const ModelConfig& config, std::uint64_t seed) {
    ForecastModel model;
    model.config = config;
    model.params = zero_params(config);
    std::mt19937_64 rng(seed);
    auto fill = [&rng](auto& m, double bound) {
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Index j = 0; j < m.cols(); ++j) {
            for (Index i = 0; i < m.rows(); ++i) {
                m(i, j) = dist(rng);
            }
        }
    };
    for (auto& layer : model.params.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.hidden_size()));
        fill(layer.w, bound);
        fill(layer.u, bound);
        layer.b_gate(Gate::Forget).setOnes();
    }
    fill(model.params.head_w, 1.0 / std::sqrt(static_cast<double>(config.hidden.back())));
    return model;
}

Eigen::MatrixXd forward_batch(const ForecastModel& model, std::span<const std::vector<double>> windows) {
    auto caches = run_layers(model, input_sequence(model.config, windows));
    return head_output(model, caches.back().steps.back().h);
}

std::vector<double> forward(const ForecastModel& model, std::span<const double> window) {
    if (window.size() != model.config.lookback) {
        throw ShapeMismatchError("window length " + std::to_string(window.size()) + " does not match lookback " +
                                 std::to_string(model.config.lookback));
    }
    const std::vector<std::vector<double>> one{std::vector<double>(window.begin(), window.end())};
    const MatrixXd out = forward_batch(model, one);
    return {out.data(), out.data() + out.size()};
}

double batch_loss(const ForecastModel& model, std::span<const std::vector<double>> x,
                  std::span<const std::vector<double>> y) {
    if (x.empty() || x.size() != y.size()) {
        throw ShapeMismatchError("batch must be non-empty with one target per window");
    }
    const MatrixXd diff = forward_batch(model, x) - target_matrix(model.config, y);
    return diff.squaredNorm() / static_cast<double>(diff.size());
}

GradientResult gradients(const ForecastModel& model, std::span<const std::vector<double>> x,
                         std::span<const std::vector<double>> y) {
    if (x.empty() || x.size() != y.size()) {
        throw ShapeMismatchError("batch must be non-empty with one target per window");
    }
    const auto caches = run_layers(model, input_sequence(model.config, x));
    const MatrixXd& h_top = caches.back().steps.back().h;
    const MatrixXd diff = head_output(model, h_top) - target_matrix(model.config, y);

    GradientResult result;
    result.loss = diff.squaredNorm() / static_cast<double>(diff.size());
    result.grad = zero_params(model.config);
    auto& grad = result.grad;

    const MatrixXd d_out = diff * (2.0 / static_cast<double>(diff.size()));
    grad.head_w = d_out * h_top.transpose();
    grad.head_b = d_out.rowwise().sum();

    const std::size_t steps = model.config.lookback;
    const Index batch = h_top.cols();

    // Gradient flowing into each step's hidden output from above.
    std::vector<MatrixXd> d_h_ext(steps);
    for (std::size_t t = 0; t + 1 < steps; ++t) {
        d_h_ext[t] = MatrixXd::Zero(h_top.rows(), batch);
    }
    d_h_ext[steps - 1] = model.params.head_w.transpose() * d_out;

    for (std::size_t li = model.params.layers.size(); li-- > 0;) {
        const auto& layer = model.params.layers[li];
        const auto& cache = caches[li];
        auto& g_layer = grad.layers[li];
        const Index h = layer.hidden_size();

        MatrixXd d_h_next = MatrixXd::Zero(h, batch);
        MatrixXd d_c_next = MatrixXd::Zero(h, batch);
        std::vector<MatrixXd> d_x(steps);
        MatrixXd dz(kGateCount * h, batch);

        for (std::size_t t = steps; t-- > 0;) {
            const auto& st = cache.steps[t];
            const MatrixXd c_prev = t > 0 ? cache.steps[t - 1].c : MatrixXd::Zero(h, batch);
            const MatrixXd h_prev = t > 0 ? cache.steps[t - 1].h : MatrixXd::Zero(h, batch);

            const Eigen::ArrayXXd d_h = (d_h_ext[t] + d_h_next).array();
            const Eigen::ArrayXXd d_o = d_h * st.tanh_c.array();
            const Eigen::ArrayXXd d_c =
                d_c_next.array() + d_h * st.o.array() * (1.0 - st.tanh_c.array().square());
            const Eigen::ArrayXXd d_i = d_c * st.g.array();
            const Eigen::ArrayXXd d_g = d_c * st.i.array();
            const Eigen::ArrayXXd d_f = d_c * c_prev.array();

            dz.middleRows(0, h) = (d_i * st.i.array() * (1.0 - st.i.array())).matrix();
            dz.middleRows(h, h) = (d_f * st.f.array() * (1.0 - st.f.array())).matrix();
            dz.middleRows(2 * h, h) = (d_g * (1.0 - st.g.array().square())).matrix();
            dz.middleRows(3 * h, h) = (d_o * st.o.array() * (1.0 - st.o.array())).matrix();

            d_c_next = (d_c * st.f.array()).matrix();
            g_layer.w.noalias() += dz * cache.inputs[t].transpose();
            g_layer.u.noalias() += dz * h_prev.transpose();
            g_layer.b += dz.rowwise().sum();
            d_h_next = layer.u.transpose() * dz;
            d_x[t] = layer.w.transpose() * dz;
        }
        d_h_ext = std::move(d_x);
    }
    return result;
}

}  // namespace drsim::forecast
