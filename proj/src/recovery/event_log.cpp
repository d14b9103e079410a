#include "drsim/recovery/event_log.hpp"

namespace drsim::recovery {

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Detection: return "detection";
        case EventKind::Alert: return "alert";
        case EventKind::Selection: return "selection";
        case EventKind::Warning: return "warning";
        case EventKind::CommandIssued: return "command_issued";
        case EventKind::RestoreCompleted: return "restore_completed";
    }
    return "unknown";
}

void EventLog::record(EventKind kind, double timestamp_s, std::string cluster, nlohmann::json details) {
    entries_.push_back({kind, timestamp_s, std::move(cluster), std::move(details)});
}

namespace {

nlohmann::json entry_json(const LogEntry& e) {
    return {{"kind", to_string(e.kind)}, {"timestamp_s", e.timestamp_s}, {"cluster", e.cluster}, {"details", e.details}};
}

}  // namespace

nlohmann::json EventLog::to_json() const {
    auto out = nlohmann::json::array();
    for (const auto& e : entries_) {
        out.push_back(entry_json(e));
    }
    return out;
}

std::string EventLog::to_jsonl() const {
    std::string out;
    for (const auto& e : entries_) {
        out += entry_json(e).dump();
        out += '\n';
    }
    return out;
}

}  // namespace drsim::recovery
