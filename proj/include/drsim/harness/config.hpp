#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "drsim/recovery/policy.hpp"
#include "drsim/sim/world.hpp"

namespace drsim::harness {

/// One experiment: the managed clusters, the app that is backed up and
/// restored, and how targets are chosen.
///
/// File form (JSON): cluster `initial_utilization` is given in percent,
/// millicores as integers and durations in seconds. `policy` is either a
/// string (forecast | current | random | replay) or an object
/// {"kind": ..., "targets": [...]} for replay.
struct ScenarioConfig {
    std::vector<sim::ClusterSpec> clusters;  // initial_utilization as a fraction here
    sim::AppSpec app{"app", 200, 20.0};
    std::string source_cluster;
    std::size_t rounds = 10;
    recovery::PolicyKind policy = recovery::PolicyKind::CurrentLowest;
    std::vector<std::string> replay_targets;
    double detection_interval_s = 15.0;
    double overhead_s = 0.5;
    std::int64_t slot_seconds = 300;
    std::uint64_t seed = 0;
    double degradation_threshold = 0.80;
    std::string model_path;
    bool strict_more = false;

    bool operator==(const ScenarioConfig&) const = default;

    /// Throws ConfigInvalidError on the first broken invariant.
    void validate() const;
};

/// `origin` names the source in error messages (usually the file path).
ScenarioConfig parse_config(const nlohmann::json& doc, const std::string& origin = "<config>");
/// Throws ConfigParseError (unreadable file, bad JSON, unknown key, wrong type)
/// or ConfigInvalidError.
ScenarioConfig load_config(const std::string& path);

nlohmann::json config_to_json(const ScenarioConfig& config);
std::string dump_config(const ScenarioConfig& config);

}  // namespace drsim::harness
