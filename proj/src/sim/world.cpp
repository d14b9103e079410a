#include "drsim/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "drsim/error.hpp"

namespace drsim::sim {

const char* to_string(ClusterStatus status) {
    return status == ClusterStatus::Active ? "Active" : "Disconnected";
}

bool ClusterState::runs(const std::string& app) const {
    return std::any_of(running_apps.begin(), running_apps.end(), [&](const AppSpec& a) { return a.name == app; });
}

BackupRecord BackupStore::add(const std::string& cluster, const AppSpec& app, double now_s) {
    BackupRecord rec;
    rec.source_cluster = cluster;
    rec.app = app;
    rec.created_at_s = now_s;
    rec.backup_name = cluster + "-" + app.name + "-" + std::to_string(next_sequence_++);
    records_.push_back(rec);
    return rec;
}

const BackupRecord& BackupStore::latest(const std::string& cluster) const {
    const BackupRecord* best = nullptr;
    for (const auto& r : records_) {
        if (r.source_cluster == cluster && (best == nullptr || r.created_at_s >= best->created_at_s)) {
            best = &r;
        }
    }
    if (best == nullptr) {
        throw BackupNotFoundError(cluster);
    }
    return *best;
}

World::World(std::vector<ClusterSpec> specs, WorldOptions options)
    : options_(options), noise_rng_(options.noise_seed) {
    if (options.slot_seconds <= 0) {
        throw std::invalid_argument("slot_seconds must be positive");
    }
    if (specs.empty()) {
        throw std::invalid_argument("world needs at least one cluster");
    }
    clock_.slot_seconds = options.slot_seconds;
    std::set<std::string> names;
    std::set<int> indices;
    for (auto& spec : specs) {
        if (spec.alloc_millicores <= 0) {
            throw std::invalid_argument("cluster '" + spec.name + "' needs a positive allocation");
        }
        if (!(spec.initial_utilization >= 0.0 && spec.initial_utilization <= 1.0)) {
            throw std::invalid_argument("cluster '" + spec.name + "' initial utilization must lie in [0, 1]");
        }
        if (!names.insert(spec.name).second) {
            throw std::invalid_argument("duplicate cluster name '" + spec.name + "'");
        }
        if (!indices.insert(spec.order_index).second) {
            throw std::invalid_argument("duplicate order index " + std::to_string(spec.order_index));
        }
        ClusterState state;
        state.spec = std::move(spec);
        clusters_.push_back(std::move(state));
    }
    std::stable_sort(clusters_.begin(), clusters_.end(),
                     [](const ClusterState& a, const ClusterState& b) { return a.spec.order_index < b.spec.order_index; });
    sample_history();
}

const ClusterState& World::cluster(const std::string& name) const {
    for (const auto& c : clusters_) {
        if (c.spec.name == name) {
            return c;
        }
    }
    throw UnknownClusterError(name);
}

ClusterState& World::mutable_cluster(const std::string& name) {
    return const_cast<ClusterState&>(std::as_const(*this).cluster(name));
}

bool World::has_cluster(const std::string& name) const {
    return std::any_of(clusters_.begin(), clusters_.end(), [&](const ClusterState& c) { return c.spec.name == name; });
}

ClusterStatus World::status(const std::string& name) const { return cluster(name).status_at(now()); }

double World::utilization(const std::string& name) const {
    const auto& c = cluster(name);
    const auto alloc = static_cast<double>(c.spec.alloc_millicores);
    std::int64_t app_mc = 0;
    if (c.status_at(now()) == ClusterStatus::Active) {
        for (const auto& app : c.running_apps) {
            app_mc += app.cpu_millicores;
        }
    }
    // Background load is expressed in millicores so equal loads compare equal.
    const double load = c.spec.initial_utilization * alloc + static_cast<double>(app_mc);
    return std::clamp(load / alloc, 0.0, 1.0);
}

std::vector<double> World::recent_history(const std::string& name, std::size_t count) const {
    const auto& hist = cluster(name).utilization_history;
    std::vector<double> out(count, hist.front());
    const std::size_t take = std::min(count, hist.size());
    std::copy(hist.end() - static_cast<std::ptrdiff_t>(take), hist.end(),
              out.end() - static_cast<std::ptrdiff_t>(take));
    return out;
}

void World::sample_history() {
    for (auto& c : clusters_) {
        double u = utilization(c.spec.name);
        if (options_.history_noise_std > 0.0) {
            std::normal_distribution<double> noise(0.0, options_.history_noise_std);
            u = std::clamp(u + noise(noise_rng_), 0.0, 1.0);
        }
        c.utilization_history.push_back(u);
    }
}

void World::complete_restores_until(double t_s) {
    // Completions strictly in time order; equal times keep scheduling order.
    while (true) {
        auto it = std::min_element(pending_.begin(), pending_.end(), [](const PendingRestore& a, const PendingRestore& b) {
            return a.complete_at_s < b.complete_at_s;
        });
        if (it == pending_.end() || it->complete_at_s > t_s) {
            return;
        }
        clock_.now_s = std::max(clock_.now_s, it->complete_at_s);
        mutable_cluster(it->target).running_apps.push_back(it->backup.app);
        pending_.erase(it);
    }
}

void World::advance(double dt_s) {
    if (!(dt_s >= 0.0)) {
        throw std::invalid_argument("cannot advance by a negative duration");
    }
    advance_to(now() + dt_s);
}

void World::advance_to(double t_s) {
    if (t_s < now()) {
        throw std::invalid_argument("cannot move the clock backwards");
    }
    const auto slot = static_cast<double>(clock_.slot_seconds);
    while (true) {
        const double next_boundary = static_cast<double>(clusters_.front().utilization_history.size()) * slot;
        if (next_boundary > t_s) {
            break;
        }
        complete_restores_until(next_boundary);
        clock_.now_s = next_boundary;
        sample_history();
    }
    complete_restores_until(t_s);
    clock_.now_s = t_s;
}

void World::start_app(const std::string& cluster, const AppSpec& app) {
    if (app.cpu_millicores < 0) {
        throw std::invalid_argument("app load must be non-negative");
    }
    mutable_cluster(cluster).running_apps.push_back(app);
}

bool World::stop_app(const std::string& cluster, const std::string& app) {
    auto& apps = mutable_cluster(cluster).running_apps;
    const auto it = std::find_if(apps.begin(), apps.end(), [&](const AppSpec& a) { return a.name == app; });
    if (it == apps.end()) {
        return false;
    }
    apps.erase(it);
    return true;
}

void World::inject_failure(const std::string& cluster, double at_s) {
    auto& c = mutable_cluster(cluster);
    if (c.failed_at_s) {
        throw AlreadyDisconnectedError(cluster);
    }
    if (at_s < now()) {
        throw std::invalid_argument("failure time lies in the past");
    }
    c.failed_at_s = at_s;
}

void World::reconnect(const std::string& cluster) { mutable_cluster(cluster).failed_at_s.reset(); }

BackupRecord World::create_backup(const std::string& cluster, const std::string& app) {
    const auto& c = this->cluster(cluster);
    const auto it = std::find_if(c.running_apps.begin(), c.running_apps.end(),
                                 [&](const AppSpec& a) { return a.name == app; });
    if (it == c.running_apps.end()) {
        throw AppNotRunningError(app, cluster);
    }
    return store_.add(cluster, *it, now());
}

PendingRestore World::schedule_restore(const std::string& target, const BackupRecord& backup) {
    if (status(target) != ClusterStatus::Active) {
        throw TargetDisconnectedError(target);
    }
    PendingRestore p;
    p.target = target;
    p.backup = backup;
    p.issued_at_s = now();
    p.complete_at_s = now() + backup.app.restore_duration_s;
    pending_.push_back(p);
    return p;
}

nlohmann::json World::snapshot() const {
    nlohmann::json doc;
    doc["now_s"] = now();
    doc["slot_seconds"] = clock_.slot_seconds;
    auto& clusters = doc["clusters"] = nlohmann::json::array();
    for (const auto& c : clusters_) {
        nlohmann::json apps = nlohmann::json::array();
        for (const auto& a : c.running_apps) {
            apps.push_back(a.name);
        }
        clusters.push_back({
            {"name", c.spec.name},
            {"order_index", c.spec.order_index},
            {"alloc_millicores", c.spec.alloc_millicores},
            {"status", to_string(c.status_at(now()))},
            {"utilization", utilization(c.spec.name)},
            {"history", c.utilization_history},
            {"running_apps", apps},
        });
    }
    auto& backups = doc["backups"] = nlohmann::json::array();
    for (const auto& b : store_.records()) {
        backups.push_back({{"backup_name", b.backup_name},
                           {"source_cluster", b.source_cluster},
                           {"app", b.app.name},
                           {"created_at_s", b.created_at_s}});
    }
    auto& pending = doc["pending_restores"] = nlohmann::json::array();
    for (const auto& p : pending_) {
        pending.push_back({{"target", p.target},
                           {"backup_name", p.backup.backup_name},
                           {"issued_at_s", p.issued_at_s},
                           {"complete_at_s", p.complete_at_s}});
    }
    return doc;
}

}  // namespace drsim::sim
