#include "drsim/recovery/policy.hpp"

#include <algorithm>

#include "drsim/error.hpp"

namespace drsim::recovery {

const char* to_string(AlertKind kind) {
    switch (kind) {
        case AlertKind::NoViableCluster: return "NoViableCluster";
    }
    return "unknown";
}

std::variant<CandidateSet, Alert> compare_resources(const sim::World& world, const std::string& affected,
                                                    ViabilityRule rule) {
    const auto& failed = world.cluster(affected);
    if (world.status(affected) != sim::ClusterStatus::Disconnected) {
        throw PipelineStateError("cluster '" + affected + "' is not disconnected");
    }
    const auto needed = failed.spec.alloc_millicores;
    CandidateSet set;
    set.affected = affected;
    // World keeps clusters sorted by order index.
    for (const auto& c : world.clusters()) {
        if (c.spec.name == affected || c.status_at(world.now()) != sim::ClusterStatus::Active) {
            continue;
        }
        const auto alloc = c.spec.alloc_millicores;
        const bool viable = rule == ViabilityRule::AtLeast ? alloc >= needed : alloc > needed;
        if (viable) {
            set.candidates.push_back(c.spec.name);
        }
    }
    if (set.candidates.empty()) {
        return Alert{AlertKind::NoViableCluster, affected,
                     "no active cluster has enough CPU cores to restore '" + affected + "'"};
    }
    return set;
}

LstmPredictor::LstmPredictor(forecast::ForecastModel model) : model_(std::move(model)) {
    if (model_.config.horizon == 0) {
        throw ShapeMismatchError("predictor model needs a horizon of at least one slot");
    }
}

double LstmPredictor::predict(std::span<const double> window) const {
    const auto normalized = forecast::normalize_with(window, model_.norm);
    return model_.norm.denormalize(forecast::forward(model_, normalized).front());
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
    if (name == "forecast") return PolicyKind::Forecast;
    if (name == "current") return PolicyKind::CurrentLowest;
    if (name == "random") return PolicyKind::Random;
    if (name == "replay") return PolicyKind::Replay;
    return std::nullopt;
}

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Forecast: return "forecast";
        case PolicyKind::CurrentLowest: return "current";
        case PolicyKind::Random: return "random";
        case PolicyKind::Replay: return "replay";
    }
    return "unknown";
}

std::size_t argmin_first(std::span<const double> scores) {
    return static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
}

namespace {

Selection pick_lowest(const CandidateSet& candidates, std::vector<double> scores) {
    Selection sel;
    sel.target = candidates.candidates[argmin_first(scores)];
    for (std::size_t i = 0; i < scores.size(); ++i) {
        sel.scores.emplace_back(candidates.candidates[i], scores[i]);
    }
    return sel;
}

}  // namespace

Selection CurrentLowestPolicy::choose(const CandidateSet& candidates, const sim::World& world) {
    std::vector<double> scores;
    for (const auto& name : candidates.candidates) {
        scores.push_back(world.utilization(name));
    }
    return pick_lowest(candidates, std::move(scores));
}

ForecastPolicy::ForecastPolicy(std::shared_ptr<const UtilizationPredictor> predictor)
    : predictor_(std::move(predictor)) {
    if (!predictor_) {
        throw std::invalid_argument("forecast policy needs a predictor");
    }
}

Selection ForecastPolicy::choose(const CandidateSet& candidates, const sim::World& world) {
    std::vector<double> scores;
    for (const auto& name : candidates.candidates) {
        scores.push_back(predictor_->predict(world.recent_history(name, predictor_->lookback())));
    }
    return pick_lowest(candidates, std::move(scores));
}

Selection RandomPolicy::choose(const CandidateSet& candidates, const sim::World&) {
    std::uniform_int_distribution<std::size_t> pick(0, candidates.candidates.size() - 1);
    return {candidates.candidates[pick(rng_)], {}};
}

Selection ReplayPolicy::choose(const CandidateSet& candidates, const sim::World&) {
    if (cursor_ >= targets_.size()) {
        throw ReplayExhaustedError();
    }
    const auto& target = targets_[cursor_++];
    const auto& cands = candidates.candidates;
    if (std::find(cands.begin(), cands.end(), target) == cands.end()) {
        throw SelectionError("replayed target '" + target + "' is not a viable candidate");
    }
    return {target, {}};
}

Selection select_target(const CandidateSet& candidates, SelectionPolicy& policy, const sim::World& world) {
    if (candidates.candidates.empty()) {
        throw SelectionError("no candidates to select from");
    }
    if (candidates.candidates.size() == 1) {
        return {candidates.candidates.front(), {}};
    }
    auto sel = policy.choose(candidates, world);
    if (sel.target == candidates.affected) {
        throw SelectionError("policy selected the affected cluster");
    }
    return sel;
}

}  // namespace drsim::recovery
