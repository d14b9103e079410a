#pragma once

// Automatic recovery flow: detect a disconnected cluster, check which
// clusters can host its workload, pick a target and restore the latest backup.

#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "drsim/recovery/event_log.hpp"
#include "drsim/recovery/policy.hpp"
#include "drsim/sim/world.hpp"

namespace drsim::recovery {

struct DisconnectEvent {
    std::string cluster;
    double failed_at_s = 0.0;
    double detected_at_s = 0.0;

    double delay_s() const { return detected_at_s - failed_at_s; }
};

/// First poll instant k * interval (k >= 0) at or after `t_s`.
double next_poll(double t_s, double interval_s);

/// Polls cluster connectivity on the global grid t = 0, I, 2I, ... and reports
/// each failure once. A poll observes state inclusively at its own timestamp.
class DisconnectMonitor {
public:
    explicit DisconnectMonitor(double interval_s = 15.0);

    double interval() const noexcept { return interval_s_; }

    /// New events whose detection poll is at or before world.now().
    std::vector<DisconnectEvent> poll(const sim::World& world);

    /// Earliest detection instant among failures not yet reported, if any.
    std::optional<double> next_detection(const sim::World& world) const;

private:
    double interval_s_;
    std::set<std::pair<std::string, double>> reported_;  // (cluster, failed_at)
};

/// Single-shot detection over a world, as a fresh monitor would see it.
std::vector<DisconnectEvent> detect(const sim::World& world, double interval_s = 15.0);

struct RecoveryTimeline {
    std::string affected;
    std::string target;
    std::string backup_name;
    double failed_at_s = 0.0;
    double detected_at_s = 0.0;
    double command_issued_at_s = 0.0;
    double restore_completed_at_s = 0.0;

    /// A: failure to restored service.
    double recovery_time() const { return restore_completed_at_s - failed_at_s; }
    /// B: restore command to restored service.
    double restoration_time() const { return restore_completed_at_s - command_issued_at_s; }
    double overhead() const { return command_issued_at_s - detected_at_s; }
    double detection_delay() const { return detected_at_s - failed_at_s; }

    bool operator==(const RecoveryTimeline&) const = default;
};

/// Issues the restore of `backup` onto `target` at the world's current time.
/// Returns the timeline fragment with the command and completion instants set.
/// Throws TargetDisconnectedError.
RecoveryTimeline execute_restore(sim::World& world, const std::string& target, const sim::BackupRecord& backup);

struct RecoveryOptions {
    ViabilityRule viability = ViabilityRule::AtLeast;
    double overhead_s = 0.5;
    double degradation_threshold = 0.80;  // selections above it are logged as warnings
};

using RecoveryOutcome = std::variant<RecoveryTimeline, Alert>;

/// Drives one recovery end to end: advances the world to the poll that detects
/// the pending failure, compares resources, selects a target, looks up the
/// latest backup and runs the restore to completion.
///
/// Exactly one undetected failure must be pending (PipelineStateError
/// otherwise). BackupNotFoundError propagates; NoViableCluster comes back as
/// an Alert with the world left at the detection instant.
RecoveryOutcome run_recovery(sim::World& world, DisconnectMonitor& monitor, SelectionPolicy& policy,
                             const RecoveryOptions& options = {}, EventLog* log = nullptr);

}  // namespace drsim::recovery
