#include "drsim/trace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace drsim::trace {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSlotsPerDay = 288.0;  // 5-min slots

std::vector<double> sinusoid_mix(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    std::normal_distribution<double> noise(0.0, 0.01);
    const double p_day = phase(rng);
    const double p_4h = phase(rng);
    const double p_1h = phase(rng);
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto x = static_cast<double>(t);
        v[t] = 0.5 + 0.20 * std::sin(kTwoPi * x / kSlotsPerDay + p_day) +
               0.08 * std::sin(kTwoPi * x / 48.0 + p_4h) + 0.05 * std::sin(kTwoPi * x / 12.0 + p_1h) +
               noise(rng);
    }
    return v;
}

std::vector<double> logistic_chaotic(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> start(0.1, 0.9);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    constexpr double r = 3.9;
    double x = start(rng);
    const double p_day = phase(rng);
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) {
        x = r * x * (1.0 - x);
        v[t] = 0.3 + 0.15 * std::sin(kTwoPi * static_cast<double>(t) / kSlotsPerDay + p_day) + 0.25 * x;
    }
    return v;
}

std::vector<double> step_bursts(std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> seg_len(20, 100);
    std::uniform_real_distribution<double> level(0.2, 0.6);
    std::bernoulli_distribution burst_start(0.03);
    std::uniform_int_distribution<std::size_t> burst_len(1, 6);
    std::uniform_real_distribution<double> burst_height(0.2, 0.4);
    std::normal_distribution<double> noise(0.0, 0.01);

    std::vector<double> v(n);
    std::size_t seg_left = 0;
    std::size_t burst_left = 0;
    double base = 0.0;
    double burst = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (seg_left == 0) {
            seg_left = seg_len(rng);
            base = level(rng);
        }
        --seg_left;
        if (burst_left == 0 && burst_start(rng)) {
            burst_left = burst_len(rng);
            burst = burst_height(rng);
        }
        double value = base + noise(rng);
        if (burst_left > 0) {
            value += burst;
            --burst_left;
        }
        v[t] = value;
    }
    return v;
}

}  // namespace

std::optional<SynthProfile> parse_synth_profile(std::string_view name) {
    if (name == "sinusoid-mix") return SynthProfile::SinusoidMix;
    if (name == "logistic-chaotic") return SynthProfile::LogisticChaotic;
    if (name == "step-bursts") return SynthProfile::StepBursts;
    return std::nullopt;
}

std::string_view to_string(SynthProfile profile) {
    switch (profile) {
        case SynthProfile::SinusoidMix: return "sinusoid-mix";
        case SynthProfile::LogisticChaotic: return "logistic-chaotic";
        case SynthProfile::StepBursts: return "step-bursts";
    }
    return "unknown";
}

SlotSeries synth_trace(std::size_t length, std::uint64_t seed, SynthProfile profile) {
    if (length == 0) {
        throw std::invalid_argument("synthetic trace length must be >= 1");
    }
    std::mt19937_64 rng(seed);
    SlotSeries series;
    series.origin_us = 0;
    series.slot_seconds = 300;
    switch (profile) {
        case SynthProfile::SinusoidMix: series.values = sinusoid_mix(length, rng); break;
        case SynthProfile::LogisticChaotic: series.values = logistic_chaotic(length, rng); break;
        case SynthProfile::StepBursts: series.values = step_bursts(length, rng); break;
    }
    for (auto& v : series.values) {
        v = std::max(v, 0.0);
    }
    return series;
}

}  // namespace drsim::trace
