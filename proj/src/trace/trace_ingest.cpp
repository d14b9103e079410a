#include "drsim/trace/trace_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include <json.hpp>

#include "drsim/error.hpp"

namespace drsim::trace {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(delim, pos);
        if (next == std::string_view::npos) {
            fields.push_back(trim(line.substr(pos)));
            break;
        }
        fields.push_back(trim(line.substr(pos, next - pos)));
        pos = next + 1;
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    if (text.empty()) {
        return false;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// Throws RecordParseError describing why `line` is not a valid row.
UsageRecord parse_row(std::string_view line, std::size_t row, const TraceSchema& schema) {
    const auto fields = split(line, schema.delimiter);
    const std::size_t needed = std::max({schema.start_col, schema.end_col, schema.cpu_col}) + 1;
    if (fields.size() < needed) {
        throw RecordParseError(row, "expected at least " + std::to_string(needed) + " columns, got " +
                                        std::to_string(fields.size()));
    }
    UsageRecord rec;
    if (!parse_number(fields[schema.start_col], rec.start_us)) {
        throw RecordParseError(row, "non-numeric start time '" + std::string(fields[schema.start_col]) + "'");
    }
    if (!parse_number(fields[schema.end_col], rec.end_us)) {
        throw RecordParseError(row, "non-numeric end time '" + std::string(fields[schema.end_col]) + "'");
    }
    if (!parse_number(fields[schema.cpu_col], rec.cpu_rate) || !std::isfinite(rec.cpu_rate)) {
        throw RecordParseError(row, "non-numeric cpu rate '" + std::string(fields[schema.cpu_col]) + "'");
    }
    if (rec.end_us <= rec.start_us) {
        throw RecordParseError(row, "end time must be after start time");
    }
    if (rec.cpu_rate < 0.0) {
        throw RecordParseError(row, "negative cpu rate");
    }
    return rec;
}

}  // namespace

void TraceSchema::validate() const {
    if (start_col == end_col || start_col == cpu_col || end_col == cpu_col) {
        throw std::invalid_argument("trace schema column indices must be pairwise distinct");
    }
}

ParseResult parse_usage_records(std::istream& input, const TraceSchema& schema, ParseMode mode) {
    schema.validate();
    ParseResult result;
    std::string line;
    bool header_pending = schema.has_header;
    std::size_t row = 0;
    while (std::getline(input, line)) {
        if (trim(line).empty()) {
            continue;
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        try {
            result.records.push_back(parse_row(line, row, schema));
        } catch (const RecordParseError&) {
            if (mode == ParseMode::Strict) {
                throw;
            }
            ++result.skipped;
        }
        ++row;
    }
    return result;
}

void write_usage_records(std::ostream& out, std::span<const UsageRecord> records, const TraceSchema& schema) {
    schema.validate();
    const std::size_t width = std::max({schema.start_col, schema.end_col, schema.cpu_col}) + 1;
    std::vector<std::string> cells(width);
    for (const auto& r : records) {
        std::fill(cells.begin(), cells.end(), std::string{});
        cells[schema.start_col] = std::to_string(r.start_us);
        cells[schema.end_col] = std::to_string(r.end_us);
        cells[schema.cpu_col] = format_double(r.cpu_rate);
        for (std::size_t i = 0; i < width; ++i) {
            if (i > 0) {
                out << schema.delimiter;
            }
            out << cells[i];
        }
        out << '\n';
    }
}

SlotSeries aggregate_to_slots(std::span<const UsageRecord> records, std::int64_t slot_seconds) {
    if (records.empty()) {
        throw EmptyTraceError();
    }
    if (slot_seconds <= 0) {
        throw std::invalid_argument("slot_seconds must be positive");
    }
    std::int64_t t_min = std::numeric_limits<std::int64_t>::max();
    std::int64_t t_max = std::numeric_limits<std::int64_t>::min();
    for (const auto& r : records) {
        t_min = std::min(t_min, r.start_us);
        t_max = std::max(t_max, r.end_us);
    }
    const std::int64_t slot_us = slot_seconds * kMicrosPerSecond;
    // Slots sit on whole multiples of the slot length; origin is the boundary at or before the first start.
    const std::int64_t origin = t_min - (((t_min % slot_us) + slot_us) % slot_us);
    const std::int64_t span = t_max - origin;
    const auto n_slots = std::max<std::size_t>(1, static_cast<std::size_t>((span + slot_us - 1) / slot_us));

    // Overlaps are accumulated in integer microseconds per record, then scaled.
    std::vector<double> acc(n_slots, 0.0);
    for (const auto& r : records) {
        const std::int64_t s = r.start_us - origin;
        const std::int64_t e = std::min(r.end_us - origin, static_cast<std::int64_t>(n_slots) * slot_us);
        for (std::int64_t k = s / slot_us; k * slot_us < e; ++k) {
            const std::int64_t lo = std::max(s, k * slot_us);
            const std::int64_t hi = std::min(e, (k + 1) * slot_us);
            acc[static_cast<std::size_t>(k)] += r.cpu_rate * static_cast<double>(hi - lo);
        }
    }
    SlotSeries series;
    series.origin_us = origin;
    series.slot_seconds = slot_seconds;
    series.values.resize(n_slots);
    const auto slot_len = static_cast<double>(slot_us);
    std::transform(acc.begin(), acc.end(), series.values.begin(), [&](double a) { return a / slot_len; });
    return series;
}

void write_series_csv(std::ostream& out, const SlotSeries& series) {
    out << "slot_index,value\n";
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out << i << ',' << format_double(series.values[i]) << '\n';
    }
}

void write_series_json(std::ostream& out, const SlotSeries& series) {
    nlohmann::json doc;
    doc["origin_us"] = series.origin_us;
    doc["slot_seconds"] = series.slot_seconds;
    doc["values"] = series.values;
    out << doc.dump(2) << '\n';
}

SlotSeries read_series_csv(std::istream& in, std::int64_t slot_seconds) {
    SlotSeries series;
    series.slot_seconds = slot_seconds;
    std::string line;
    std::size_t row = 0;
    bool first = true;
    while (std::getline(in, line)) {
        const auto text = trim(line);
        if (text.empty()) {
            continue;
        }
        const auto fields = split(text, ',');
        double value = 0.0;
        const bool ok = fields.size() >= 2 && parse_number(fields[1], value);
        if (!ok) {
            if (first) {  // header
                first = false;
                continue;
            }
            throw RecordParseError(row, "expected 'slot_index,value'");
        }
        first = false;
        series.values.push_back(value);
        ++row;
    }
    return series;
}

SlotSeries read_series_json(std::istream& in) {
    const auto doc = nlohmann::json::parse(in);
    SlotSeries series;
    series.origin_us = doc.value("origin_us", std::int64_t{0});
    series.slot_seconds = doc.value("slot_seconds", std::int64_t{300});
    series.values = doc.at("values").get<std::vector<double>>();
    return series;
}

SlotSeries load_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open series file '" + path + "'");
    }
    const auto c = static_cast<char>((in >> std::ws).peek());
    if (c == '{') {
        return read_series_json(in);
    }
    return read_series_csv(in);
}

void save_series(const std::string& path, const SlotSeries& series, bool as_json) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write series file '" + path + "'");
    }
    if (as_json) {
        write_series_json(out, series);
    } else {
        write_series_csv(out, series);
    }
}

}  // namespace drsim::trace
