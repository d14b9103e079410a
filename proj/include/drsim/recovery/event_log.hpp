#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace drsim::recovery {

enum class EventKind { Detection, Alert, Selection, Warning, CommandIssued, RestoreCompleted };

const char* to_string(EventKind kind);

struct LogEntry {
    EventKind kind;
    double timestamp_s = 0.0;
    std::string cluster;
    nlohmann::json details = nlohmann::json::object();
};

/// Structured record of what the pipeline did, in emission order.
class EventLog {
public:
    void record(EventKind kind, double timestamp_s, std::string cluster, nlohmann::json details = nlohmann::json::object());

    const std::vector<LogEntry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

    nlohmann::json to_json() const;
    /// One JSON object per line.
    std::string to_jsonl() const;

private:
    std::vector<LogEntry> entries_;
};

}  // namespace drsim::recovery
