#include "drsim/recovery/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "drsim/error.hpp"

namespace drsim::recovery {

double next_poll(double t_s, double interval_s) {
    if (!(interval_s > 0.0)) {
        throw std::invalid_argument("detection interval must be positive");
    }
    return std::ceil(t_s / interval_s) * interval_s;
}

DisconnectMonitor::DisconnectMonitor(double interval_s) : interval_s_(interval_s) {
    if (!(interval_s > 0.0)) {
        throw std::invalid_argument("detection interval must be positive");
    }
}

std::vector<DisconnectEvent> DisconnectMonitor::poll(const sim::World& world) {
    std::vector<DisconnectEvent> events;
    for (const auto& c : world.clusters()) {
        if (!c.failed_at_s) {
            continue;
        }
        const double failed = *c.failed_at_s;
        const double detected = next_poll(failed, interval_s_);
        if (detected > world.now() || reported_.contains({c.spec.name, failed})) {
            continue;
        }
        reported_.insert({c.spec.name, failed});
        events.push_back({c.spec.name, failed, detected});
    }
    return events;
}

std::optional<double> DisconnectMonitor::next_detection(const sim::World& world) const {
    std::optional<double> best;
    for (const auto& c : world.clusters()) {
        if (!c.failed_at_s || reported_.contains({c.spec.name, *c.failed_at_s})) {
            continue;
        }
        const double detected = next_poll(*c.failed_at_s, interval_s_);
        if (!best || detected < *best) {
            best = detected;
        }
    }
    return best;
}

std::vector<DisconnectEvent> detect(const sim::World& world, double interval_s) {
    DisconnectMonitor monitor(interval_s);
    return monitor.poll(world);
}

RecoveryTimeline execute_restore(sim::World& world, const std::string& target, const sim::BackupRecord& backup) {
    const auto pending = world.schedule_restore(target, backup);
    RecoveryTimeline t;
    t.affected = backup.source_cluster;
    t.target = target;
    t.backup_name = backup.backup_name;
    t.command_issued_at_s = pending.issued_at_s;
    t.restore_completed_at_s = pending.complete_at_s;
    return t;
}

RecoveryOutcome run_recovery(sim::World& world, DisconnectMonitor& monitor, SelectionPolicy& policy,
                             const RecoveryOptions& options, EventLog* log) {
    if (!(options.overhead_s >= 0.0)) {
        throw std::invalid_argument("pipeline overhead must be non-negative");
    }
    auto emit = [log](EventKind kind, double t, const std::string& cluster, nlohmann::json details) {
        if (log != nullptr) {
            log->record(kind, t, cluster, std::move(details));
        }
    };

    // Monitoring and event detection.
    const auto detect_at = monitor.next_detection(world);
    if (!detect_at) {
        throw PipelineStateError("no pending cluster failure to recover from");
    }
    world.advance_to(std::max(world.now(), *detect_at));
    const auto events = monitor.poll(world);
    if (events.size() != 1) {
        throw PipelineStateError("expected exactly one newly detected disconnection, got " +
                                 std::to_string(events.size()));
    }
    const auto& event = events.front();
    emit(EventKind::Detection, event.detected_at_s, event.cluster,
         {{"failed_at_s", event.failed_at_s}, {"delay_s", event.delay_s()}});

    // Resource comparison and alert.
    auto compared = compare_resources(world, event.cluster, options.viability);
    if (auto* alert = std::get_if<Alert>(&compared)) {
        emit(EventKind::Alert, world.now(), event.cluster, {{"alert", to_string(alert->kind)}, {"message", alert->message}});
        return *alert;
    }
    const auto& candidates = std::get<CandidateSet>(compared);

    // Target selection.
    const auto selection = select_target(candidates, policy, world);
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& [name, score] : selection.scores) {
        scores.push_back({{"cluster", name}, {"score", score}});
    }
    emit(EventKind::Selection, world.now(), selection.target,
         {{"policy", to_string(policy.kind())}, {"candidates", candidates.candidates}, {"scores", scores}});
    if (world.utilization(selection.target) >= options.degradation_threshold) {
        emit(EventKind::Warning, world.now(), selection.target,
             {{"reason", "target at or above degradation threshold"},
              {"utilization", world.utilization(selection.target)}});
    }

    // Restoration execution.
    const auto backup = world.backups().latest(event.cluster);
    world.advance_to(std::max(world.now(), event.detected_at_s + options.overhead_s));
    auto timeline = execute_restore(world, selection.target, backup);
    timeline.failed_at_s = event.failed_at_s;
    timeline.detected_at_s = event.detected_at_s;
    emit(EventKind::CommandIssued, timeline.command_issued_at_s, selection.target,
         {{"backup_name", backup.backup_name}, {"source_cluster", backup.source_cluster}});

    world.advance_to(timeline.restore_completed_at_s);
    emit(EventKind::RestoreCompleted, timeline.restore_completed_at_s, selection.target,
         {{"app", backup.app.name},
          {"recovery_time_s", timeline.recovery_time()},
          {"restoration_time_s", timeline.restoration_time()},
          {"utilization", world.utilization(selection.target)}});
    return timeline;
}

}  // namespace drsim::recovery
