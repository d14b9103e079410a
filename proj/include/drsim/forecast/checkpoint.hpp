#pragma once

// Binary model checkpoints.
//
// Layout (all integers u32 little-endian, all reals f64 little-endian):
//   magic "DRSLSTM1" (8 bytes), version, layer count,
//   per layer: input width, hidden width,
//   lookback, horizon, norm min, norm max,
//   per layer: W_i W_f W_g W_o (in x h), U_i U_f U_g U_o (h x h), b_i b_f b_g b_o (h),
//   head weights (h_last x horizon), head bias (horizon).
// Matrices are row-major with rows indexing the input side.

#include <iosfwd>
#include <string>

#include "drsim/forecast/lstm.hpp"

namespace drsim::forecast {

inline constexpr char kCheckpointMagic[8] = {'D', 'R', 'S', 'L', 'S', 'T', 'M', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const ForecastModel& model);
ForecastModel read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const ForecastModel& model);
/// Throws CheckpointError on I/O failure or a malformed file.
ForecastModel load_checkpoint(const std::string& path);

}  // namespace drsim::forecast
