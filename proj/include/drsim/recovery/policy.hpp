#pragma once

// Restore-target selection: candidate filtering by allocated cores and the
// policies that pick one candidate.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "drsim/forecast/lstm.hpp"
#include "drsim/sim/world.hpp"

namespace drsim::recovery {

/// Active clusters able to host the affected cluster's workload, in managed-list order.
struct CandidateSet {
    std::string affected;
    std::vector<std::string> candidates;
};

enum class AlertKind { NoViableCluster };

const char* to_string(AlertKind kind);

/// Terminal pipeline outcome: restoration is halted and the operator notified.
struct Alert {
    AlertKind kind = AlertKind::NoViableCluster;
    std::string cluster;
    std::string message;

    bool operator==(const Alert&) const = default;
};

/// At least as many cores (the experiment's reading) or strictly more.
enum class ViabilityRule { AtLeast, StrictlyMore };

/// Candidates are Active clusters other than `affected` whose allocation
/// satisfies `rule`. Throws PipelineStateError when `affected` is not Disconnected.
std::variant<CandidateSet, Alert> compare_resources(const sim::World& world, const std::string& affected,
                                                    ViabilityRule rule = ViabilityRule::AtLeast);

/// Predicts next-slot utilization from a cluster's recent history (fractions).
class UtilizationPredictor {
public:
    virtual ~UtilizationPredictor() = default;
    virtual std::size_t lookback() const = 0;
    virtual double predict(std::span<const double> window) const = 0;
    virtual std::string name() const = 0;
};

/// Persistence: the next value equals the last observed one.
class LastValuePredictor final : public UtilizationPredictor {
public:
    explicit LastValuePredictor(std::size_t lookback = 3) : lookback_(lookback) {}
    std::size_t lookback() const override { return lookback_; }
    double predict(std::span<const double> window) const override { return window.back(); }
    std::string name() const override { return "last-value"; }

private:
    std::size_t lookback_;
};

/// Trained LSTM: normalizes with the model's constants, predicts one slot
/// ahead and maps the result back to utilization units.
class LstmPredictor final : public UtilizationPredictor {
public:
    explicit LstmPredictor(forecast::ForecastModel model);
    std::size_t lookback() const override { return model_.config.lookback; }
    double predict(std::span<const double> window) const override;
    std::string name() const override { return "lstm"; }

    const forecast::ForecastModel& model() const noexcept { return model_; }

private:
    forecast::ForecastModel model_;
};

enum class PolicyKind { Forecast, CurrentLowest, Random, Replay };

std::optional<PolicyKind> parse_policy_kind(std::string_view name);
const char* to_string(PolicyKind kind);

struct Selection {
    std::string target;
    /// Per-candidate score the choice was made on (prediction or current
    /// utilization); empty when no scoring took place.
    std::vector<std::pair<std::string, double>> scores;
};

class SelectionPolicy {
public:
    virtual ~SelectionPolicy() = default;
    virtual PolicyKind kind() const = 0;
    /// `candidates` is non-empty.
    virtual Selection choose(const CandidateSet& candidates, const sim::World& world) = 0;
};

class CurrentLowestPolicy final : public SelectionPolicy {
public:
    PolicyKind kind() const override { return PolicyKind::CurrentLowest; }
    Selection choose(const CandidateSet& candidates, const sim::World& world) override;
};

class ForecastPolicy final : public SelectionPolicy {
public:
    explicit ForecastPolicy(std::shared_ptr<const UtilizationPredictor> predictor);
    PolicyKind kind() const override { return PolicyKind::Forecast; }
    Selection choose(const CandidateSet& candidates, const sim::World& world) override;

private:
    std::shared_ptr<const UtilizationPredictor> predictor_;
};

class RandomPolicy final : public SelectionPolicy {
public:
    explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
    PolicyKind kind() const override { return PolicyKind::Random; }
    Selection choose(const CandidateSet& candidates, const sim::World& world) override;

private:
    std::mt19937_64 rng_;
};

class ReplayPolicy final : public SelectionPolicy {
public:
    explicit ReplayPolicy(std::vector<std::string> targets) : targets_(std::move(targets)) {}
    PolicyKind kind() const override { return PolicyKind::Replay; }
    /// Throws ReplayExhaustedError past the end of the list and SelectionError
    /// when the recorded target is not a candidate.
    Selection choose(const CandidateSet& candidates, const sim::World& world) override;

    std::size_t consumed() const noexcept { return cursor_; }

private:
    std::vector<std::string> targets_;
    std::size_t cursor_ = 0;
};

/// Index of the minimum score; ties resolve to the earliest position, which
/// in a CandidateSet is the lowest order index.
std::size_t argmin_first(std::span<const double> scores);

/// A lone candidate is returned without consulting the policy.
Selection select_target(const CandidateSet& candidates, SelectionPolicy& policy, const sim::World& world);

}  // namespace drsim::recovery
