#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "drsim/trace/trace_ingest.hpp"

namespace drsim::trace {

/// Shapes of the synthetic desk-scale stand-ins for the cluster usage series.
enum class SynthProfile {
    SinusoidMix,     // daily + sub-daily harmonics with light noise
    LogisticChaotic, // logistic map (r = 3.9) riding on a daily cycle
    StepBursts,      // piecewise-constant load levels with short bursts
};

std::optional<SynthProfile> parse_synth_profile(std::string_view name);
std::string_view to_string(SynthProfile profile);

/// Deterministic for a given (length, seed, profile); every value is >= 0.
/// Slots are 300 s wide and the series starts at origin 0.
SlotSeries synth_trace(std::size_t length, std::uint64_t seed, SynthProfile profile);

}  // namespace drsim::trace
