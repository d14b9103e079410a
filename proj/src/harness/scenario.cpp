#include "drsim/harness/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "drsim/error.hpp"
#include "drsim/forecast/checkpoint.hpp"

namespace drsim::harness {

namespace {

// Independent, reproducible streams for failure offsets and policy choices.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

constexpr std::uint64_t kOffsetStream = 1;
constexpr std::uint64_t kPolicyStream = 2;

std::vector<double> column_utilizations(const sim::World& world, const std::vector<std::string>& columns) {
    std::vector<double> out;
    out.reserve(columns.size());
    for (const auto& c : columns) {
        out.push_back(world.utilization(c));
    }
    return out;
}

}  // namespace

bool ScenarioReport::any_halted() const {
    return std::any_of(rows.begin(), rows.end(), [](const RoundRow& r) { return r.halted; });
}

void finalize_report(ScenarioReport& report) {
    report.flagged.clear();
    const auto& last = report.final_utilization();
    for (std::size_t i = 0; i < report.columns.size() && i < last.size(); ++i) {
        if (last[i] >= report.threshold) {
            report.flagged.push_back(report.columns[i]);
        }
    }
    ReportSummary s;
    for (const auto& row : report.rows) {
        if (!row.timeline) {
            continue;
        }
        ++s.completed_rounds;
        s.mean_recovery_s += row.timeline->recovery_time();
        s.mean_restoration_s += row.timeline->restoration_time();
        s.mean_gap_s += row.timeline->recovery_time() - row.timeline->restoration_time();
    }
    if (s.completed_rounds > 0) {
        const auto n = static_cast<double>(s.completed_rounds);
        s.mean_recovery_s /= n;
        s.mean_restoration_s /= n;
        s.mean_gap_s /= n;
    }
    report.summary = s;
}

std::shared_ptr<const recovery::UtilizationPredictor> load_predictor(const std::string& model_path) {
    if (model_path.empty()) {
        throw ModelLoadError("forecast policy needs a model_path");
    }
    try {
        return std::make_shared<recovery::LstmPredictor>(forecast::load_checkpoint(model_path));
    } catch (const CheckpointError& e) {
        throw ModelLoadError(std::string("cannot load model: ") + e.what());
    }
}

std::unique_ptr<recovery::SelectionPolicy> make_policy(const ScenarioConfig& config, recovery::PolicyKind kind,
                                                       std::uint64_t seed,
                                                       std::shared_ptr<const recovery::UtilizationPredictor> predictor) {
    switch (kind) {
        case recovery::PolicyKind::Forecast:
            if (!predictor) {
                predictor = load_predictor(config.model_path);
            }
            return std::make_unique<recovery::ForecastPolicy>(std::move(predictor));
        case recovery::PolicyKind::CurrentLowest:
            return std::make_unique<recovery::CurrentLowestPolicy>();
        case recovery::PolicyKind::Random:
            return std::make_unique<recovery::RandomPolicy>(stream_seed(seed, kPolicyStream));
        case recovery::PolicyKind::Replay:
            return std::make_unique<recovery::ReplayPolicy>(config.replay_targets);
    }
    throw std::invalid_argument("unknown policy kind");
}

ScenarioReport run_scenario(const ScenarioConfig& config, recovery::EventLog* log) {
    auto policy = make_policy(config, config.policy, config.seed);
    return run_scenario(config, *policy, log);
}

ScenarioReport run_scenario(const ScenarioConfig& config, recovery::SelectionPolicy& policy, recovery::EventLog* log) {
    config.validate();
    sim::World world(config.clusters, sim::WorldOptions{config.slot_seconds, 0.0, 0});
    recovery::DisconnectMonitor monitor(config.detection_interval_s);
    const recovery::RecoveryOptions options{
        config.strict_more ? recovery::ViabilityRule::StrictlyMore : recovery::ViabilityRule::AtLeast,
        config.overhead_s, config.degradation_threshold};

    ScenarioReport report;
    report.policy = recovery::to_string(policy.kind());
    report.seed = config.seed;
    report.threshold = config.degradation_threshold;
    for (const auto& c : world.clusters()) {
        if (c.spec.name != config.source_cluster) {
            report.columns.push_back(c.spec.name);
        }
    }
    report.initial = column_utilizations(world, report.columns);

    world.start_app(config.source_cluster, config.app);

    // Failures land on whole seconds strictly inside one detection interval.
    std::mt19937_64 offsets(stream_seed(config.seed, kOffsetStream));
    const auto max_offset = static_cast<std::int64_t>(std::ceil(config.detection_interval_s)) - 1;
    std::uniform_int_distribution<std::int64_t> offset_dist(0, std::max<std::int64_t>(max_offset, 0));
    const auto slot = static_cast<double>(config.slot_seconds);

    for (std::size_t round = 1; round <= config.rounds; ++round) {
        const double start = std::ceil(world.now() / slot) * slot;
        world.advance_to(start);

        // Re-arm the source so every round is a fresh single failure.
        if (world.cluster(config.source_cluster).failed_at_s) {
            world.reconnect(config.source_cluster);
        }
        if (!world.cluster(config.source_cluster).runs(config.app.name)) {
            world.start_app(config.source_cluster, config.app);
        }
        world.create_backup(config.source_cluster, config.app.name);

        std::int64_t offset = offset_dist(offsets);
        while (static_cast<double>(offset) >= config.detection_interval_s) {
            offset = offset_dist(offsets);
        }
        world.inject_failure(config.source_cluster, start + static_cast<double>(offset));

        RoundRow row;
        row.round = round;
        const auto outcome = recovery::run_recovery(world, monitor, policy, options, log);
        if (const auto* alert = std::get_if<recovery::Alert>(&outcome)) {
            row.halted = true;
            row.alert = alert->message;
        } else {
            row.timeline = std::get<recovery::RecoveryTimeline>(outcome);
            row.target = row.timeline->target;
        }
        row.utilization = column_utilizations(world, report.columns);
        report.rows.push_back(std::move(row));
    }
    finalize_report(report);
    return report;
}

std::vector<PolicyComparison> compare_policies(const ScenarioConfig& config, const std::vector<PolicySpec>& policies,
                                               std::size_t trials,
                                               std::shared_ptr<const recovery::UtilizationPredictor> predictor) {
    if (trials == 0) {
        throw std::invalid_argument("compare_policies needs at least one trial");
    }
    std::vector<PolicyComparison> out;
    for (const auto& spec : policies) {
        if (spec.kind == recovery::PolicyKind::Forecast && !predictor) {
            predictor = load_predictor(config.model_path);
        }
        PolicyComparison cmp;
        cmp.policy = recovery::to_string(spec.kind);
        cmp.trials = trials;
        std::size_t flagged_trials = 0;
        for (std::size_t k = 0; k < trials; ++k) {
            ScenarioConfig trial = config;
            trial.seed = config.seed + k;
            trial.policy = spec.kind;
            if (spec.kind == recovery::PolicyKind::Replay) {
                trial.replay_targets = spec.replay_targets.empty() ? config.replay_targets : spec.replay_targets;
            }
            auto policy = make_policy(trial, spec.kind, trial.seed, predictor);
            const auto report = run_scenario(trial, *policy);
            const auto& last = report.final_utilization();
            const auto [lo, hi] = std::minmax_element(last.begin(), last.end());
            const double spread = last.empty() ? 0.0 : *hi - *lo;
            cmp.mean_final_max += last.empty() ? 0.0 : *hi;
            cmp.mean_spread += spread;
            cmp.max_spread = std::max(cmp.max_spread, spread);
            cmp.mean_flagged += static_cast<double>(report.flagged.size());
            flagged_trials += report.flagged.empty() ? 0 : 1;
            cmp.spreads.push_back(spread);
            cmp.flagged_counts.push_back(report.flagged.size());
            cmp.halted_rounds += static_cast<std::size_t>(
                std::count_if(report.rows.begin(), report.rows.end(), [](const RoundRow& r) { return r.halted; }));
        }
        const auto n = static_cast<double>(trials);
        cmp.mean_final_max /= n;
        cmp.mean_spread /= n;
        cmp.mean_flagged /= n;
        cmp.flagged_trial_fraction = static_cast<double>(flagged_trials) / n;
        out.push_back(std::move(cmp));
    }
    return out;
}

}  // namespace drsim::harness
