#pragma once

// Deterministic discrete-time model of managed clusters, running apps,
// injected failures and an object-store backup repository.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace drsim::sim {

struct ClusterSpec {
    std::string name;
    int order_index = 0;
    std::int64_t alloc_millicores = 4000;
    double initial_utilization = 0.0;  // fraction of alloc used by background load

    bool operator==(const ClusterSpec&) const = default;
};

struct AppSpec {
    std::string name;
    std::int64_t cpu_millicores = 200;
    double restore_duration_s = 20.0;

    bool operator==(const AppSpec&) const = default;
};

enum class ClusterStatus { Active, Disconnected };

const char* to_string(ClusterStatus status);

struct ClusterState {
    ClusterSpec spec;
    std::optional<double> failed_at_s;          // observable as Disconnected from this instant
    std::vector<double> utilization_history;    // one sample per slot boundary, starting at t = 0
    std::vector<AppSpec> running_apps;          // may hold several copies of one app

    ClusterStatus status_at(double t) const {
        return failed_at_s && t >= *failed_at_s ? ClusterStatus::Disconnected : ClusterStatus::Active;
    }
    bool runs(const std::string& app) const;
};

struct BackupRecord {
    std::string source_cluster;
    AppSpec app;
    double created_at_s = 0.0;
    std::string backup_name;

    bool operator==(const BackupRecord&) const = default;
};

/// Append-only store standing in for the shared bucket; it outlives cluster failures.
class BackupStore {
public:
    /// Appends a record named "<cluster>-<app>-<sequence>".
    BackupRecord add(const std::string& cluster, const AppSpec& app, double now_s);

    /// Record with the greatest created_at_s for `cluster`; ties go to the later insertion.
    /// Throws BackupNotFoundError.
    const BackupRecord& latest(const std::string& cluster) const;

    std::span<const BackupRecord> records() const { return records_; }

private:
    std::vector<BackupRecord> records_;
    std::uint64_t next_sequence_ = 1;
};

struct PendingRestore {
    std::string target;
    BackupRecord backup;
    double issued_at_s = 0.0;
    double complete_at_s = 0.0;
};

struct SimClock {
    double now_s = 0.0;
    std::int64_t slot_seconds = 300;
};

struct WorldOptions {
    std::int64_t slot_seconds = 300;
    double history_noise_std = 0.0;  // optional jitter on history samples only
    std::uint64_t noise_seed = 0;
};

class World {
public:
    /// Throws std::invalid_argument on duplicate names/order indices or a
    /// non-positive allocation.
    explicit World(std::vector<ClusterSpec> specs, WorldOptions options = {});

    const SimClock& clock() const noexcept { return clock_; }
    double now() const noexcept { return clock_.now_s; }
    std::int64_t slot_seconds() const noexcept { return clock_.slot_seconds; }

    std::span<const ClusterState> clusters() const { return clusters_; }
    const ClusterState& cluster(const std::string& name) const;  // throws UnknownClusterError
    bool has_cluster(const std::string& name) const;

    ClusterStatus status(const std::string& name) const;
    /// (initial load + running app load) / alloc, clamped to [0, 1]. App load
    /// only counts while the cluster is Active.
    double utilization(const std::string& name) const;

    /// Last `count` history samples, left-padded with the earliest sample.
    std::vector<double> recent_history(const std::string& name, std::size_t count) const;

    /// Moves the clock forward, sampling history at each crossed slot boundary
    /// and completing restores in time order (a completion at a boundary lands
    /// before that boundary's sample).
    void advance(double dt_s);
    void advance_to(double t_s);

    void start_app(const std::string& cluster, const AppSpec& app);
    /// Removes one instance; returns false when none is running.
    bool stop_app(const std::string& cluster, const std::string& app);

    /// The cluster is Disconnected for every observation at t >= at_s.
    /// Throws AlreadyDisconnectedError if a failure is already recorded.
    void inject_failure(const std::string& cluster, double at_s);
    /// Clears a recorded failure so the cluster is Active again.
    void reconnect(const std::string& cluster);

    /// Backs up an app running on `cluster` at the current time. Throws AppNotRunningError.
    BackupRecord create_backup(const std::string& cluster, const std::string& app);
    const BackupStore& backups() const noexcept { return store_; }

    /// Schedules `backup.app` to start on `target` at now + restore duration.
    /// Throws TargetDisconnectedError.
    PendingRestore schedule_restore(const std::string& target, const BackupRecord& backup);
    std::span<const PendingRestore> pending_restores() const { return pending_; }

    nlohmann::json snapshot() const;

private:
    ClusterState& mutable_cluster(const std::string& name);
    void sample_history();
    void complete_restores_until(double t_s);

    std::vector<ClusterState> clusters_;
    SimClock clock_;
    BackupStore store_;
    std::vector<PendingRestore> pending_;
    WorldOptions options_;
    std::mt19937_64 noise_rng_;
};

}  // namespace drsim::sim
