#include "drsim/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "drsim/error.hpp"

namespace drsim::harness {

namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys = {
    "clusters",   "app",  "source_cluster",        "rounds",     "policy",      "replay_targets",
    "detection_interval_s", "overhead_s", "slot_seconds", "seed", "degradation_threshold", "model_path",
    "strict_more",
};
const std::set<std::string> kClusterKeys = {"name", "order_index", "alloc_millicores", "initial_utilization"};
const std::set<std::string> kAppKeys = {"name", "cpu_millicores", "restore_duration_s"};

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& reason) const {
        throw ConfigParseError(origin_, key, reason);
    }

    void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) const {
        if (!obj.is_object()) {
            fail(prefix.empty() ? "<root>" : prefix, "expected an object");
        }
        for (const auto& [k, _] : obj.items()) {
            if (!allowed.contains(k)) {
                fail(prefix + k, "unknown key");
            }
        }
    }

    template <typename T>
    T get(const json& obj, const std::string& key, const std::string& path, T fallback) const {
        if (!obj.contains(key)) {
            return fallback;
        }
        return get_required<T>(obj, key, path);
    }

    template <typename T>
    T get_required(const json& obj, const std::string& key, const std::string& path) const {
        if (!obj.contains(key)) {
            fail(path, "missing required key");
        }
        const auto& v = obj.at(key);
        if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) fail(path, "expected a string");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) fail(path, "expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) fail(path, "expected an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_unsigned() == false && v.get<std::int64_t>() < 0) fail(path, "must be non-negative");
            }
        } else {
            if (!v.is_number()) fail(path, "expected a number");
        }
        return v.get<T>();
    }

private:
    std::string origin_;
};

// Percent value whose division by 100 reproduces `fraction` exactly.
double to_percent(double fraction) {
    double p = fraction * 100.0;
    for (int step = 0; step < 8 && p / 100.0 != fraction; ++step) {
        p = std::nextafter(p, p / 100.0 < fraction ? INFINITY : -INFINITY);
    }
    return p;
}

}  // namespace

void ScenarioConfig::validate() const {
    if (clusters.empty()) {
        throw ConfigInvalidError("at least one cluster is required");
    }
    std::set<std::string> names;
    std::set<int> indices;
    for (const auto& c : clusters) {
        if (c.name.empty()) throw ConfigInvalidError("cluster names must be non-empty");
        if (!names.insert(c.name).second) throw ConfigInvalidError("duplicate cluster name '" + c.name + "'");
        if (!indices.insert(c.order_index).second) {
            throw ConfigInvalidError("duplicate order_index " + std::to_string(c.order_index));
        }
        if (c.alloc_millicores <= 0) throw ConfigInvalidError("cluster '" + c.name + "' needs alloc_millicores > 0");
        if (!(c.initial_utilization >= 0.0 && c.initial_utilization <= 1.0)) {
            throw ConfigInvalidError("cluster '" + c.name + "' initial_utilization must lie in [0, 100] percent");
        }
    }
    if (!names.contains(source_cluster)) {
        throw ConfigInvalidError("source_cluster '" + source_cluster + "' is not a configured cluster");
    }
    if (app.name.empty()) throw ConfigInvalidError("app name must be non-empty");
    if (app.cpu_millicores < 0) throw ConfigInvalidError("app cpu_millicores must be >= 0");
    if (!(app.restore_duration_s >= 0.0)) throw ConfigInvalidError("app restore_duration_s must be >= 0");
    if (!(detection_interval_s > 0.0)) throw ConfigInvalidError("detection_interval_s must be > 0");
    if (!(overhead_s >= 0.0 && overhead_s < 1.0)) throw ConfigInvalidError("overhead_s must lie in [0, 1)");
    if (slot_seconds <= 0) throw ConfigInvalidError("slot_seconds must be > 0");
    if (!(degradation_threshold > 0.0 && degradation_threshold <= 1.0)) {
        throw ConfigInvalidError("degradation_threshold must lie in (0, 1]");
    }
    if (policy == recovery::PolicyKind::Replay) {
        if (replay_targets.size() < rounds) {
            throw ConfigInvalidError("replay list has " + std::to_string(replay_targets.size()) +
                                     " targets for " + std::to_string(rounds) + " rounds");
        }
        for (const auto& t : replay_targets) {
            if (!names.contains(t)) throw ConfigInvalidError("replay target '" + t + "' is not a configured cluster");
        }
    }
}

ScenarioConfig parse_config(const nlohmann::json& doc, const std::string& origin) {
    const Reader r(origin);
    r.reject_unknown(doc, kTopLevelKeys, "");
    ScenarioConfig cfg;

    if (!doc.contains("clusters") || !doc.at("clusters").is_array()) {
        r.fail("clusters", "expected a list of clusters");
    }
    int position = 0;
    for (const auto& c : doc.at("clusters")) {
        const std::string path = "clusters[" + std::to_string(position) + "]";
        r.reject_unknown(c, kClusterKeys, path + ".");
        sim::ClusterSpec spec;
        spec.name = r.get_required<std::string>(c, "name", path + ".name");
        spec.order_index = r.get<int>(c, "order_index", path + ".order_index", position);
        spec.alloc_millicores = r.get<std::int64_t>(c, "alloc_millicores", path + ".alloc_millicores", 4000);
        spec.initial_utilization = r.get<double>(c, "initial_utilization", path + ".initial_utilization", 0.0) / 100.0;
        cfg.clusters.push_back(std::move(spec));
        ++position;
    }

    if (doc.contains("app")) {
        const auto& a = doc.at("app");
        r.reject_unknown(a, kAppKeys, "app.");
        cfg.app.name = r.get<std::string>(a, "name", "app.name", cfg.app.name);
        cfg.app.cpu_millicores = r.get<std::int64_t>(a, "cpu_millicores", "app.cpu_millicores", cfg.app.cpu_millicores);
        cfg.app.restore_duration_s =
            r.get<double>(a, "restore_duration_s", "app.restore_duration_s", cfg.app.restore_duration_s);
    }

    cfg.source_cluster = r.get_required<std::string>(doc, "source_cluster", "source_cluster");
    cfg.rounds = r.get<std::size_t>(doc, "rounds", "rounds", cfg.rounds);

    if (doc.contains("policy")) {
        const auto& p = doc.at("policy");
        std::string kind;
        if (p.is_string()) {
            kind = p.get<std::string>();
        } else if (p.is_object()) {
            r.reject_unknown(p, {"kind", "targets"}, "policy.");
            kind = r.get_required<std::string>(p, "kind", "policy.kind");
            if (p.contains("targets")) {
                if (!p.at("targets").is_array()) r.fail("policy.targets", "expected a list of cluster names");
                for (const auto& t : p.at("targets")) {
                    if (!t.is_string()) r.fail("policy.targets", "expected cluster names");
                    cfg.replay_targets.push_back(t.get<std::string>());
                }
            }
        } else {
            r.fail("policy", "expected a policy name or object");
        }
        const auto parsed = recovery::parse_policy_kind(kind);
        if (!parsed) {
            r.fail("policy", "unknown policy '" + kind + "' (expected forecast, current, random or replay)");
        }
        cfg.policy = *parsed;
    }
    if (doc.contains("replay_targets")) {
        if (!doc.at("replay_targets").is_array()) r.fail("replay_targets", "expected a list of cluster names");
        for (const auto& t : doc.at("replay_targets")) {
            if (!t.is_string()) r.fail("replay_targets", "expected cluster names");
            cfg.replay_targets.push_back(t.get<std::string>());
        }
    }

    cfg.detection_interval_s = r.get<double>(doc, "detection_interval_s", "detection_interval_s", cfg.detection_interval_s);
    cfg.overhead_s = r.get<double>(doc, "overhead_s", "overhead_s", cfg.overhead_s);
    cfg.slot_seconds = r.get<std::int64_t>(doc, "slot_seconds", "slot_seconds", cfg.slot_seconds);
    cfg.seed = r.get<std::uint64_t>(doc, "seed", "seed", cfg.seed);
    cfg.degradation_threshold =
        r.get<double>(doc, "degradation_threshold", "degradation_threshold", cfg.degradation_threshold);
    cfg.model_path = r.get<std::string>(doc, "model_path", "model_path", cfg.model_path);
    cfg.strict_more = r.get<bool>(doc, "strict_more", "strict_more", cfg.strict_more);

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigParseError(path, "<file>", "cannot open file");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigParseError(path, "<document>", e.what());
    }
    return parse_config(doc, path);
}

nlohmann::json config_to_json(const ScenarioConfig& config) {
    json doc;
    auto& clusters = doc["clusters"] = json::array();
    for (const auto& c : config.clusters) {
        clusters.push_back({{"name", c.name},
                            {"order_index", c.order_index},
                            {"alloc_millicores", c.alloc_millicores},
                            {"initial_utilization", to_percent(c.initial_utilization)}});
    }
    doc["app"] = {{"name", config.app.name},
                  {"cpu_millicores", config.app.cpu_millicores},
                  {"restore_duration_s", config.app.restore_duration_s}};
    doc["source_cluster"] = config.source_cluster;
    doc["rounds"] = config.rounds;
    if (config.policy == recovery::PolicyKind::Replay) {
        doc["policy"] = {{"kind", "replay"}, {"targets", config.replay_targets}};
    } else {
        doc["policy"] = recovery::to_string(config.policy);
        if (!config.replay_targets.empty()) {
            doc["replay_targets"] = config.replay_targets;
        }
    }
    doc["detection_interval_s"] = config.detection_interval_s;
    doc["overhead_s"] = config.overhead_s;
    doc["slot_seconds"] = config.slot_seconds;
    doc["seed"] = config.seed;
    doc["degradation_threshold"] = config.degradation_threshold;
    if (!config.model_path.empty()) {
        doc["model_path"] = config.model_path;
    }
    doc["strict_more"] = config.strict_more;
    return doc;
}

std::string dump_config(const ScenarioConfig& config) { return config_to_json(config).dump(2) + "\n"; }

}  // namespace drsim::harness
