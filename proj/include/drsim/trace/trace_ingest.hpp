#pragma once

// Task-resource-usage trace parsing and fixed-interval slot aggregation.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace drsim::trace {

inline constexpr std::int64_t kMicrosPerSecond = 1'000'000;

/// Column layout of a delimiter-separated usage table. The defaults follow
/// the ClusterData-2011 task usage table: start, end, ..., mean CPU rate.
struct TraceSchema {
    std::size_t start_col = 0;
    std::size_t end_col = 1;
    std::size_t cpu_col = 5;
    char delimiter = ',';
    bool has_header = false;

    /// Throws std::invalid_argument when column indices collide.
    void validate() const;
};

struct UsageRecord {
    std::int64_t start_us = 0;
    std::int64_t end_us = 0;
    double cpu_rate = 0.0;  // core-seconds per second

    bool operator==(const UsageRecord&) const = default;
};

enum class ParseMode { Strict, Lenient };

struct ParseResult {
    std::vector<UsageRecord> records;
    std::size_t skipped = 0;  // rows rejected in lenient mode
};

/// Aggregated cluster CPU usage, one value per slot starting at origin_us.
struct SlotSeries {
    std::int64_t origin_us = 0;
    std::int64_t slot_seconds = 300;
    std::vector<double> values;

    bool operator==(const SlotSeries&) const = default;
};

/// One UsageRecord per well-formed row, in input order. Row indices in
/// errors are zero-based over data rows (the header, if any, is not counted).
/// Blank lines are ignored.
ParseResult parse_usage_records(std::istream& input, const TraceSchema& schema = {},
                                ParseMode mode = ParseMode::Strict);

/// Writes records back as rows under `schema`; unused columns are left empty.
void write_usage_records(std::ostream& out, std::span<const UsageRecord> records,
                         const TraceSchema& schema = {});

/// Overlap-weighted aggregation: slot k receives
/// sum_r cpu_rate(r) * |r ∩ slot k| / slot_length.
/// Slots are aligned to multiples of the slot length; the series runs from the
/// boundary at or before the earliest start to the first boundary at or after
/// the latest end (at least one slot).
SlotSeries aggregate_to_slots(std::span<const UsageRecord> records, std::int64_t slot_seconds = 300);

// SlotSeries serialization: `slot_index,value` table and a JSON document.
void write_series_csv(std::ostream& out, const SlotSeries& series);
void write_series_json(std::ostream& out, const SlotSeries& series);
SlotSeries read_series_csv(std::istream& in, std::int64_t slot_seconds = 300);
SlotSeries read_series_json(std::istream& in);

/// Reads a series file, choosing the JSON reader when the content starts with '{'.
SlotSeries load_series(const std::string& path);
void save_series(const std::string& path, const SlotSeries& series, bool as_json);

}  // namespace drsim::trace
