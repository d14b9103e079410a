#include "drsim/forecast/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "drsim/error.hpp"

namespace drsim::forecast {

namespace {

constexpr std::uint32_t kMaxWidth = 1u << 16;

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) {
        b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffu);
    }
    out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) {
        b[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    }
    out.write(b.data(), b.size());
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) {
        throw CheckpointError("checkpoint truncated");
    }
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | b[static_cast<std::size_t>(i)];
    }
    return v;
}

double get_f64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) {
        throw CheckpointError("checkpoint truncated");
    }
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) {
        bits = (bits << 8) | b[static_cast<std::size_t>(i)];
    }
    return std::bit_cast<double>(bits);
}

// Writes a stored (out x in) block as an (in x out) row-major array.
template <typename Block>
void put_transposed(std::ostream& out, const Block& m) {
    for (Eigen::Index r = 0; r < m.cols(); ++r) {
        for (Eigen::Index c = 0; c < m.rows(); ++c) {
            put_f64(out, m(c, r));
        }
    }
}

template <typename Block>
void get_transposed(std::istream& in, Block&& m) {
    for (Eigen::Index r = 0; r < m.cols(); ++r) {
        for (Eigen::Index c = 0; c < m.rows(); ++c) {
            m(c, r) = get_f64(in);
        }
    }
}

constexpr std::array<Gate, 4> kGateOrder = {Gate::Input, Gate::Forget, Gate::Cell, Gate::Output};

}  // namespace

void write_checkpoint(std::ostream& out, const ForecastModel& model) {
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(model.params.layers.size()));
    for (const auto& layer : model.params.layers) {
        put_u32(out, static_cast<std::uint32_t>(layer.input_width()));
        put_u32(out, static_cast<std::uint32_t>(layer.hidden_size()));
    }
    put_u32(out, static_cast<std::uint32_t>(model.config.lookback));
    put_u32(out, static_cast<std::uint32_t>(model.config.horizon));
    put_f64(out, model.norm.min());
    put_f64(out, model.norm.max());
    for (const auto& layer : model.params.layers) {
        for (auto g : kGateOrder) put_transposed(out, layer.w_gate(g));
        for (auto g : kGateOrder) put_transposed(out, layer.u_gate(g));
        for (auto g : kGateOrder) {
            const auto b = layer.b_gate(g);
            for (Eigen::Index i = 0; i < b.size(); ++i) put_f64(out, b(i));
        }
    }
    put_transposed(out, model.params.head_w);
    for (Eigen::Index i = 0; i < model.params.head_b.size(); ++i) put_f64(out, model.params.head_b(i));
    if (!out) {
        throw CheckpointError("failed writing checkpoint");
    }
}

ForecastModel read_checkpoint(std::istream& in) {
    char magic[sizeof(kCheckpointMagic)] = {};
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw CheckpointError("not a model checkpoint (bad magic)");
    }
    if (const auto version = get_u32(in); version != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t n_layers = get_u32(in);
    if (n_layers == 0 || n_layers > 64) {
        throw CheckpointError("implausible layer count " + std::to_string(n_layers));
    }
    ModelConfig config;
    config.hidden.clear();
    std::uint32_t expected_in = 1;
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        const auto in_w = get_u32(in);
        const auto hid = get_u32(in);
        if (in_w != expected_in || hid == 0 || hid > kMaxWidth) {
            throw CheckpointError("inconsistent widths for layer " + std::to_string(l));
        }
        config.hidden.push_back(hid);
        expected_in = hid;
    }
    config.lookback = get_u32(in);
    config.horizon = get_u32(in);
    if (config.lookback == 0 || config.horizon == 0 || config.lookback > kMaxWidth || config.horizon > kMaxWidth) {
        throw CheckpointError("invalid lookback/horizon in checkpoint");
    }
    const double lo = get_f64(in);
    const double hi = get_f64(in);

    ForecastModel model;
    model.config = config;
    try {
        model.norm = NormParams(lo, hi);
    } catch (const DegenerateRangeError&) {
        throw CheckpointError("checkpoint carries a degenerate normalization range");
    }
    model.params = zero_params(config);
    for (auto& layer : model.params.layers) {
        for (auto g : kGateOrder) get_transposed(in, layer.w_gate(g));
        for (auto g : kGateOrder) get_transposed(in, layer.u_gate(g));
        for (auto g : kGateOrder) {
            auto b = layer.b_gate(g);
            for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = get_f64(in);
        }
    }
    get_transposed(in, model.params.head_w);
    for (Eigen::Index i = 0; i < model.params.head_b.size(); ++i) model.params.head_b(i) = get_f64(in);
    if (in.peek() != std::char_traits<char>::eof()) {
        throw CheckpointError("trailing bytes after checkpoint payload");
    }
    if (!model.params.all_finite()) {
        throw CheckpointError("checkpoint contains non-finite parameters");
    }
    return model;
}

void save_checkpoint(const std::string& path, const ForecastModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw CheckpointError("cannot open '" + path + "' for writing");
    }
    write_checkpoint(out, model);
}

ForecastModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError("cannot open checkpoint '" + path + "'");
    }
    return read_checkpoint(in);
}

}  // namespace drsim::forecast
