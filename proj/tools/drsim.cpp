#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drsim/error.hpp"
#include "drsim/forecast/checkpoint.hpp"
#include "drsim/forecast/dataset.hpp"
#include "drsim/forecast/metrics.hpp"
#include "drsim/forecast/train.hpp"
#include "drsim/harness/config.hpp"
#include "drsim/harness/report.hpp"
#include "drsim/harness/scenario.hpp"
#include "drsim/trace/synth.hpp"
#include "drsim/trace/trace_ingest.hpp"

namespace {

using namespace drsim;

enum ExitCode : int { kOk = 0, kOther = 1, kConfig = 2, kHalted = 3, kModel = 4 };

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << text;
}

void print_metrics(const char* label, const forecast::EvalMetrics& m) {
    std::printf("%-12s MAE %.6g  MAPE %.6g%%  R2 %.6g\n", label, m.mae, m.mape, m.r2);
}

harness::ReportFormat require_format(const std::string& name) {
    const auto f = harness::parse_report_format(name);
    if (!f) {
        throw std::invalid_argument("unknown format '" + name + "' (expected text, json or csv)");
    }
    return *f;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
    std::vector<double> out;
    for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

forecast::WindowDataset normalized(const forecast::WindowDataset& raw, const forecast::NormParams& norm) {
    forecast::WindowDataset out = raw;
    for (auto& r : out.x) r = forecast::normalize_with(r, norm);
    for (auto& r : out.y) r = forecast::normalize_with(r, norm);
    return out;
}

struct IngestArgs {
    std::string trace, out;
    std::int64_t slot_seconds = 300;
    trace::TraceSchema schema;
    bool lenient = false;
    bool header = false;
    std::string format = "csv";
};

int run_ingest(const IngestArgs& a) {
    auto schema = a.schema;
    schema.has_header = a.header;
    schema.validate();
    std::ifstream in(a.trace);
    if (!in) {
        throw Error("cannot open trace '" + a.trace + "'");
    }
    const auto parsed =
        trace::parse_usage_records(in, schema, a.lenient ? trace::ParseMode::Lenient : trace::ParseMode::Strict);
    const auto series = trace::aggregate_to_slots(parsed.records, a.slot_seconds);
    std::ostringstream body;
    if (a.format == "json") {
        trace::write_series_json(body, series);
    } else {
        trace::write_series_csv(body, series);
    }
    write_output(a.out, body.str());
    std::fprintf(stderr, "ingest: %zu records, %zu skipped, %zu slots\n", parsed.records.size(), parsed.skipped,
                 series.values.size());
    return kOk;
}

struct SynthArgs {
    std::size_t length = 2016;
    std::uint64_t seed = 0;
    std::string profile = "sinusoid-mix";
    std::string out;
    std::string format = "csv";
};

int run_synth(const SynthArgs& a) {
    const auto profile = trace::parse_synth_profile(a.profile);
    if (!profile) {
        throw std::invalid_argument("unknown synth profile '" + a.profile + "'");
    }
    const auto series = trace::synth_trace(a.length, a.seed, *profile);
    std::ostringstream body;
    if (a.format == "json") {
        trace::write_series_json(body, series);
    } else {
        trace::write_series_csv(body, series);
    }
    write_output(a.out, body.str());
    return kOk;
}

struct TrainArgs {
    std::string series, out;
    std::size_t lookback = 3, horizon = 1, epochs = 50, batch = 32;
    double split = 0.2, lr = 1e-3;
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden = {128, 128};
    std::string optimizer = "adam";
    bool train_only_norm = false;
    bool normalized_metrics = false;
};

int run_train(const TrainArgs& a) {
    const auto series = trace::load_series(a.series);
    const auto opt = forecast::parse_optimizer(a.optimizer);
    if (!opt) {
        throw std::invalid_argument("unknown optimizer '" + a.optimizer + "' (expected adam or sgd)");
    }
    const auto raw = forecast::make_windows(series.values, a.lookback, a.horizon);
    auto [raw_train, raw_test] = forecast::chrono_split(raw, a.split);

    forecast::NormParams norm(0.0, 1.0);
    if (a.train_only_norm) {
        auto values = flatten(raw_train.x);
        const auto ys = flatten(raw_train.y);
        values.insert(values.end(), ys.begin(), ys.end());
        norm = forecast::minmax_normalize(values).norm;
    } else {
        norm = forecast::minmax_normalize(series.values).norm;
    }
    const auto train_set = normalized(raw_train, norm);
    const auto test_set = normalized(raw_test, norm);

    forecast::ModelConfig mc{a.lookback, a.horizon, a.hidden};
    forecast::TrainConfig tc;
    tc.epochs = a.epochs;
    tc.batch_size = a.batch;
    tc.learning_rate = a.lr;
    tc.optimizer = *opt;
    tc.seed = a.seed;
    auto result = forecast::train(train_set, mc, tc);
    result.model.norm = norm;
    forecast::save_checkpoint(a.out, result.model);

    const auto scale = a.normalized_metrics ? forecast::MetricScale::Normalized : forecast::MetricScale::Denormalized;
    std::printf("trained %zu parameters on %zu samples, %zu epochs, final loss %.6g\n",
                forecast::param_count(mc), train_set.size(), a.epochs,
                result.loss_trace.empty() ? 0.0 : result.loss_trace.back());
    print_metrics("model", forecast::evaluate(result.model, test_set, scale));
    print_metrics("persistence", forecast::evaluate_persistence(test_set, norm, scale));
    return kOk;
}

struct EvalArgs {
    std::string model, series;
    double split = 0.2;
    bool all = false;
    bool normalized_metrics = false;
};

int run_eval(const EvalArgs& a) {
    forecast::ForecastModel model;
    try {
        model = forecast::load_checkpoint(a.model);
    } catch (const CheckpointError& e) {
        throw ModelLoadError(std::string("cannot load model: ") + e.what());
    }
    const auto series = trace::load_series(a.series);
    const auto values = forecast::normalize_with(series.values, model.norm);
    auto windows = forecast::make_windows(values, model.config.lookback, model.config.horizon);
    if (!a.all) {
        windows = forecast::chrono_split(windows, a.split).second;
    }
    const auto scale = a.normalized_metrics ? forecast::MetricScale::Normalized : forecast::MetricScale::Denormalized;
    print_metrics("model", forecast::evaluate(model, windows, scale));
    print_metrics("persistence", forecast::evaluate_persistence(windows, model.norm, scale));
    return kOk;
}

struct SimulateArgs {
    std::string config, policy, format = "text", out, model, events;
    std::optional<std::uint64_t> seed;
    bool strict_more = false;
};

int run_simulate(const SimulateArgs& a) {
    auto cfg = harness::load_config(a.config);
    if (!a.policy.empty()) {
        const auto kind = recovery::parse_policy_kind(a.policy);
        if (!kind) {
            throw ConfigInvalidError("unknown policy '" + a.policy + "' (expected forecast, current, random or replay)");
        }
        cfg.policy = *kind;
    }
    if (a.seed) cfg.seed = *a.seed;
    if (!a.model.empty()) cfg.model_path = a.model;
    if (a.strict_more) cfg.strict_more = true;
    cfg.validate();
    const auto format = require_format(a.format);

    recovery::EventLog log;
    const auto report = harness::run_scenario(cfg, &log);
    write_output(a.out, harness::emit_report(report, format));
    if (!a.events.empty()) {
        write_output(a.events, log.to_jsonl());
    }
    return report.any_halted() ? kHalted : kOk;
}

struct CompareArgs {
    std::string config, format = "text", model;
    std::vector<std::string> policies = {"forecast", "random"};
    std::size_t trials = 100;
    std::optional<std::uint64_t> seed;
};

int run_compare(const CompareArgs& a) {
    auto cfg = harness::load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    if (!a.model.empty()) cfg.model_path = a.model;
    std::vector<harness::PolicySpec> specs;
    for (const auto& name : a.policies) {
        const auto kind = recovery::parse_policy_kind(name);
        if (!kind) {
            throw ConfigInvalidError("unknown policy '" + name + "' (expected forecast, current, random or replay)");
        }
        specs.push_back({*kind, {}});
    }
    const auto results = harness::compare_policies(cfg, specs, a.trials);
    std::cout << harness::emit_comparison(results, require_format(a.format));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-cluster disaster-recovery simulator with LSTM-guided target selection"};
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Aggregate a task usage trace into a slot series");
    ingest_cmd->add_option("--trace", ingest.trace, "Usage table (delimiter-separated)")->required();
    ingest_cmd->add_option("--slot-seconds", ingest.slot_seconds, "Slot length in seconds")->capture_default_str();
    ingest_cmd->add_option("--start-col", ingest.schema.start_col)->capture_default_str();
    ingest_cmd->add_option("--end-col", ingest.schema.end_col)->capture_default_str();
    ingest_cmd->add_option("--cpu-col", ingest.schema.cpu_col)->capture_default_str();
    ingest_cmd->add_flag("--header", ingest.header, "First row is a header");
    ingest_cmd->add_flag("--lenient", ingest.lenient, "Skip malformed rows instead of failing");
    ingest_cmd->add_option("--format", ingest.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    ingest_cmd->add_option("--out", ingest.out, "Output path (stdout when omitted)");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic slot series");
    synth_cmd->add_option("--length", synth.length)->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
    synth_cmd->add_option("--profile", synth.profile, "sinusoid-mix, logistic-chaotic or step-bursts")
        ->capture_default_str();
    synth_cmd->add_option("--format", synth.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    synth_cmd->add_option("--out", synth.out, "Output path (stdout when omitted)");

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train the LSTM forecaster on a slot series");
    train_cmd->add_option("--series", train.series)->required();
    train_cmd->add_option("--lookback", train.lookback)->capture_default_str();
    train_cmd->add_option("--horizon", train.horizon)->capture_default_str();
    train_cmd->add_option("--epochs", train.epochs)->capture_default_str();
    train_cmd->add_option("--split", train.split, "Test fraction")->capture_default_str();
    train_cmd->add_option("--seed", train.seed)->capture_default_str();
    train_cmd->add_option("--hidden", train.hidden, "Hidden width per layer")->capture_default_str();
    train_cmd->add_option("--batch", train.batch)->capture_default_str();
    train_cmd->add_option("--lr", train.lr)->capture_default_str();
    train_cmd->add_option("--optimizer", train.optimizer, "adam or sgd")->capture_default_str();
    train_cmd->add_flag("--train-only-norm", train.train_only_norm, "Scale with training-prefix statistics only");
    train_cmd->add_flag("--normalized-metrics", train.normalized_metrics, "Report metrics on the [0,1] scale");
    train_cmd->add_option("--out", train.out, "Checkpoint path")->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a slot series");
    eval_cmd->add_option("--model", eval.model)->required();
    eval_cmd->add_option("--series", eval.series)->required();
    eval_cmd->add_option("--split", eval.split, "Test fraction")->capture_default_str();
    eval_cmd->add_flag("--all", eval.all, "Score every window instead of the test suffix");
    eval_cmd->add_flag("--normalized-metrics", eval.normalized_metrics, "Report metrics on the [0,1] scale");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a multi-round failover scenario");
    sim_cmd->add_option("--config", sim.config)->required();
    sim_cmd->add_option("--policy", sim.policy, "forecast, current, random or replay");
    sim_cmd->add_option("--seed", sim.seed);
    sim_cmd->add_option("--format", sim.format, "text, json or csv")->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "Report path (stdout when omitted)");
    sim_cmd->add_option("--model", sim.model, "Checkpoint for the forecast policy");
    sim_cmd->add_option("--events", sim.events, "Write the event log as JSON lines");
    sim_cmd->add_flag("--strict-more", sim.strict_more, "Require strictly more free cores than the app needs");

    CompareArgs cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "Compare selection policies over consecutive seeds");
    cmp_cmd->add_option("--config", cmp.config)->required();
    cmp_cmd->add_option("--policies", cmp.policies)->delimiter(',')->capture_default_str();
    cmp_cmd->add_option("--trials", cmp.trials)->capture_default_str();
    cmp_cmd->add_option("--seed", cmp.seed, "First seed (default: the config seed)");
    cmp_cmd->add_option("--model", cmp.model, "Checkpoint for the forecast policy");
    cmp_cmd->add_option("--format", cmp.format, "text, json or csv")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*ingest_cmd) return run_ingest(ingest);
        if (*synth_cmd) return run_synth(synth);
        if (*train_cmd) return run_train(train);
        if (*eval_cmd) return run_eval(eval);
        if (*sim_cmd) return run_simulate(sim);
        if (*cmp_cmd) return run_compare(cmp);
    } catch (const ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ConfigInvalidError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ModelLoadError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return kModel;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOther;
}
