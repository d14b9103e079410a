#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drsim/harness/config.hpp"
#include "drsim/recovery/event_log.hpp"
#include "drsim/recovery/pipeline.hpp"
#include "drsim/recovery/policy.hpp"

namespace drsim::harness {

struct RoundRow {
    std::size_t round = 0;  // 1-based
    bool halted = false;
    std::string target;     // empty when halted
    std::string alert;      // alert message when halted
    std::vector<double> utilization;  // per report column, fractions
    std::optional<recovery::RecoveryTimeline> timeline;

    bool operator==(const RoundRow&) const = default;
};

struct ReportSummary {
    std::size_t completed_rounds = 0;
    double mean_recovery_s = 0.0;     // A
    double mean_restoration_s = 0.0;  // B
    double mean_gap_s = 0.0;          // A - B

    bool operator==(const ReportSummary&) const = default;
};

/// Per-round utilization table plus recovery timings. Columns are every
/// cluster except the failing source, in order-index order.
struct ScenarioReport {
    std::string policy;
    std::uint64_t seed = 0;
    double threshold = 0.80;
    std::vector<std::string> columns;
    std::vector<double> initial;
    std::vector<RoundRow> rows;
    // Derived by finalize_report().
    std::vector<std::string> flagged;  // final utilization >= threshold
    ReportSummary summary;

    const std::vector<double>& final_utilization() const { return rows.empty() ? initial : rows.back().utilization; }
    bool any_halted() const;

    bool operator==(const ScenarioReport&) const = default;
};

/// Recomputes `flagged` and `summary` from the rows.
void finalize_report(ScenarioReport& report);

/// Builds the policy named in the config. Forecast loads `model_path`
/// (ModelLoadError on failure) unless `predictor` is supplied.
std::unique_ptr<recovery::SelectionPolicy> make_policy(
    const ScenarioConfig& config, recovery::PolicyKind kind, std::uint64_t seed,
    std::shared_ptr<const recovery::UtilizationPredictor> predictor = nullptr);

/// Loads a checkpoint as a predictor; wraps checkpoint errors in ModelLoadError.
std::shared_ptr<const recovery::UtilizationPredictor> load_predictor(const std::string& model_path);

/// Runs `config.rounds` single-failure rounds. Each round starts on a slot
/// boundary, re-arms the source cluster with its app, backs the app up,
/// fails the source at a seeded whole-second offset inside one detection
/// interval and runs the recovery pipeline; utilizations are sampled when the
/// restore completes.
ScenarioReport run_scenario(const ScenarioConfig& config, recovery::SelectionPolicy& policy,
                            recovery::EventLog* log = nullptr);
ScenarioReport run_scenario(const ScenarioConfig& config, recovery::EventLog* log = nullptr);

struct PolicySpec {
    recovery::PolicyKind kind = recovery::PolicyKind::CurrentLowest;
    std::vector<std::string> replay_targets;
};

struct PolicyComparison {
    std::string policy;
    std::size_t trials = 0;
    double mean_final_max = 0.0;
    double mean_spread = 0.0;            // mean of final (max - min)
    double max_spread = 0.0;
    double mean_flagged = 0.0;           // clusters >= threshold at the end
    double flagged_trial_fraction = 0.0; // trials with at least one flagged cluster
    std::size_t halted_rounds = 0;
    std::vector<double> spreads;         // per trial, in seed order
    std::vector<std::size_t> flagged_counts;
};

/// Runs every policy over seeds config.seed, config.seed + 1, ... and
/// aggregates the final-state statistics. Results keep the order of `policies`.
std::vector<PolicyComparison> compare_policies(
    const ScenarioConfig& config, const std::vector<PolicySpec>& policies, std::size_t trials,
    std::shared_ptr<const recovery::UtilizationPredictor> predictor = nullptr);

}  // namespace drsim::harness
