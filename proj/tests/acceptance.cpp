// Acceptance suite: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Fixtures come from DRSIM_FIXTURES.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "drsim/error.hpp"
#include "drsim/forecast/checkpoint.hpp"
#include "drsim/forecast/dataset.hpp"
#include "drsim/forecast/lstm.hpp"
#include "drsim/forecast/metrics.hpp"
#include "drsim/forecast/train.hpp"
#include "drsim/harness/config.hpp"
#include "drsim/harness/report.hpp"
#include "drsim/harness/scenario.hpp"
#include "drsim/trace/synth.hpp"
#include "drsim/trace/trace_ingest.hpp"

using namespace drsim;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fixture(const std::string& name) { return std::string(DRSIM_FIXTURES) + "/" + name; }

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<long long> percents(const std::vector<double>& v) {
    std::vector<long long> out;
    for (double u : v) out.push_back(std::llround(u * 100.0));
    return out;
}

// Exact percent check: utilization is kept in millicores, so 60% must be 0.6 to
// within rounding of a single division.
bool exact_percents(const std::vector<double>& v, const std::vector<int>& expected) {
    if (v.size() != expected.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i] * 100.0 - expected[i]) > 1e-9) return false;
    }
    return true;
}

std::vector<int> target_numbers(const harness::ScenarioReport& r) {
    std::vector<int> out;
    for (const auto& row : r.rows) out.push_back(row.target.empty() ? 0 : row.target.back() - '0');
    return out;
}

// Order-preserving but not the identity: a forecast policy must pick the same
// targets from any monotone transform of the last value.
class CubedLastValue final : public recovery::UtilizationPredictor {
public:
    std::size_t lookback() const override { return 3; }
    double predict(std::span<const double> window) const override {
        const double v = window.back();
        return 2.0 * v * v * v + 0.1;
    }
    std::string name() const override { return "cubed-last-value"; }
};

Outcome ac1() {
    const auto t0 = Clock::now();
    const auto cfg = harness::load_config(fixture("table3.json"));
    const std::vector<int> targets = {1, 1, 2, 1, 2, 1, 2, 3, 1, 2};
    const std::vector<int> final_pct = {60, 60, 55, 60, 70};

    std::vector<harness::ScenarioReport> reports;
    reports.push_back(harness::run_scenario(cfg));
    auto fc = cfg;
    fc.policy = recovery::PolicyKind::Forecast;
    recovery::ForecastPolicy last(std::make_shared<recovery::LastValuePredictor>(3));
    reports.push_back(harness::run_scenario(fc, last));
    recovery::ForecastPolicy cubed(std::make_shared<CubedLastValue>());
    reports.push_back(harness::run_scenario(fc, cubed));
    const double elapsed = seconds_since(t0);

    Outcome o;
    for (const auto& r : reports) {
        const auto marks = harness::threshold_marks(r);
        o.pass = o.pass && target_numbers(r) == targets && exact_percents(r.final_utilization(), final_pct) &&
                 std::all_of(marks.begin(), marks.end(), [](char c) { return c == 'O'; }) && !r.any_halted();
    }
    o.pass = o.pass && elapsed < 1.0;
    const auto p = percents(reports[0].final_utilization());
    o.detail = "current/forecast(last)/forecast(cubed) final (" + std::to_string(p[0]) + "," + std::to_string(p[1]) +
               "," + std::to_string(p[2]) + "," + std::to_string(p[3]) + "," + std::to_string(p[4]) + ")%, " +
               fmt("%.3f s", elapsed);
    return o;
}

Outcome ac2() {
    const auto r = harness::run_scenario(harness::load_config(fixture("table2.json")));
    Outcome o;
    o.pass = target_numbers(r) == std::vector<int>{5, 1, 4, 4, 5, 5, 3, 4, 4, 4} &&
             exact_percents(r.final_utilization(), {40, 40, 55, 85, 85}) &&
             r.flagged == std::vector<std::string>{"Cluster 4", "Cluster 5"} &&
             harness::threshold_marks(r) == std::vector<char>{'O', 'O', 'O', 'X', 'X'};
    const auto p = percents(r.final_utilization());
    o.detail = "final (" + std::to_string(p[0]) + "," + std::to_string(p[1]) + "," + std::to_string(p[2]) + "," +
               std::to_string(p[3]) + "," + std::to_string(p[4]) + ")%, flagged " + std::to_string(r.flagged.size());
    return o;
}

Outcome ac3() {
    auto cfg = harness::load_config(fixture("table3.json"));
    const double oh = cfg.overhead_s;
    std::size_t runs = 0;
    double gap_sum = 0.0, a_min = 1e9, a_max = -1e9, oh_max = 0.0;
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        cfg.seed = seed;
        const auto r = harness::run_scenario(cfg);
        for (const auto& row : r.rows) {
            const auto& t = *row.timeline;
            const double a = t.recovery_time();
            ok = ok && t.restoration_time() == 20.0 && a >= 20.0 + oh && a < 35.0 + oh && t.overhead() < 1.0;
            a_min = std::min(a_min, a);
            a_max = std::max(a_max, a);
            oh_max = std::max(oh_max, t.overhead());
            gap_sum += a - t.restoration_time();
            ++runs;
        }
    }
    const double mean_gap = gap_sum / static_cast<double>(runs);
    Outcome o;
    o.pass = ok && runs >= 1000 && std::abs(mean_gap - 7.5) <= 0.5;
    o.detail = std::to_string(runs) + " recoveries, A in [" + fmt("%.1f", a_min) + ", " + fmt("%.1f", a_max) +
               "], mean A-B " + fmt("%.3f s", mean_gap) + ", max overhead " + fmt("%.2f s", oh_max);
    return o;
}

Outcome ac4() {
    using namespace forecast;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> param(-0.8, 0.8), unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> width(1, 8), layers(1, 2), horizon(1, 2);
    double worst = 0.0;
    const double step = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        ModelConfig c;
        c.lookback = 3;
        c.horizon = horizon(rng);
        c.hidden.resize(layers(rng));
        for (auto& h : c.hidden) h = width(rng);
        auto model = init_model(c, rng());
        for (auto block : model.params.blocks()) {
            for (auto& v : block) v = param(rng);
        }
        std::vector<std::vector<double>> x(4, std::vector<double>(3)), y(4, std::vector<double>(c.horizon));
        for (auto& r : x) for (auto& v : r) v = unit(rng);
        for (auto& r : y) for (auto& v : r) v = unit(rng);

        const auto analytic = gradients(model, x, y);
        const auto g = analytic.grad.blocks();
        auto probe = model;
        auto blocks = probe.params.blocks();
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            for (std::size_t i = 0; i < blocks[b].size(); ++i) {
                const double saved = blocks[b][i];
                blocks[b][i] = saved + step;
                const double up = batch_loss(probe, x, y);
                blocks[b][i] = saved - step;
                const double down = batch_loss(probe, x, y);
                blocks[b][i] = saved;
                const double numeric = (up - down) / (2.0 * step);
                // Floor keeps near-zero gradients from turning round-off into relative error.
                const double err = std::abs(g[b][i] - numeric) / std::max({std::abs(g[b][i]), std::abs(numeric), 1e-6});
                worst = std::max(worst, err);
            }
        }
    }
    Outcome o;
    o.pass = worst < 1e-4;
    o.detail = "20 models, max relative error " + fmt("%.2e", worst);
    return o;
}

std::size_t brute_force_count(const forecast::ModelConfig& c) {
    const auto m = forecast::init_model(c, 0);
    std::size_t n = 0;
    for (const auto& layer : m.params.layers) {
        n += static_cast<std::size_t>(layer.w.size() + layer.u.size() + layer.b.size());
    }
    return n + static_cast<std::size_t>(m.params.head_w.size() + m.params.head_b.size());
}

Outcome ac5() {
    const std::size_t big = forecast::param_count({3, 1, {128, 128}});
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> layers(1, 3), width(1, 64), horizon(1, 4);
    std::size_t matches = 0;
    for (int trial = 0; trial < 10; ++trial) {
        forecast::ModelConfig c;
        c.horizon = horizon(rng);
        c.hidden.resize(layers(rng));
        for (auto& h : c.hidden) h = width(rng);
        if (forecast::param_count(c) == brute_force_count(c)) ++matches;
    }
    Outcome o;
    o.pass = big == 198273 && brute_force_count({3, 1, {128, 128}}) == 198273 && matches == 10;
    o.detail = "2x128 -> " + std::to_string(big) + ", closed form matched " + std::to_string(matches) + "/10";
    return o;
}

// Trains the desk-scale forecaster on a seeded synthetic series.
struct DeskRun {
    forecast::EvalMetrics model;
    forecast::EvalMetrics persistence;
    forecast::ForecastModel trained;
};

DeskRun desk_run(std::uint64_t seed) {
    using namespace forecast;
    const auto series = trace::synth_trace(2016, seed, trace::SynthProfile::SinusoidMix);
    const auto norm = minmax_normalize(series.values);
    const auto [train_set, test_set] = chrono_split(make_windows(norm.values, 3, 1), 0.2);
    TrainConfig tc;
    tc.epochs = 50;
    tc.batch_size = 32;
    tc.learning_rate = 3e-3;
    tc.seed = seed;
    auto result = train(train_set, ModelConfig{3, 1, {32}}, tc);
    result.model.norm = norm.norm;
    return {evaluate(result.model, test_set), evaluate_persistence(test_set, norm.norm), std::move(result.model)};
}

Outcome ac6() {
    const auto t0 = Clock::now();
    Outcome o;
    std::string parts;
    for (std::uint64_t seed : {0, 1, 2}) {
        const auto run = desk_run(seed);
        o.pass = o.pass && run.model.r2 >= 0.90 && run.model.mae < run.persistence.mae;
        parts += " seed " + std::to_string(seed) + ": R2 " + fmt("%.4f", run.model.r2) + " MAE " +
                 fmt("%.4f", run.model.mae) + " vs persistence " + fmt("%.4f", run.persistence.mae) + ";";
    }
    const double elapsed = seconds_since(t0);
    o.pass = o.pass && elapsed < 120.0;
    o.detail = "hidden 32, 50 epochs, n=2016;" + parts + " " + fmt("%.1f s", elapsed);
    return o;
}

Outcome ac7() {
    using namespace trace;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> count(1, 100);
    std::uniform_int_distribution<std::int64_t> slot(1, 600), start(0, 20000), len(0, 3000);
    std::uniform_real_distribution<double> rate(0.0, 8.0);
    double worst = 0.0, worst_mass = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<UsageRecord> records;
        for (std::size_t i = 0, n = count(rng); i < n; ++i) {
            const auto s = start(rng);
            records.push_back({s * kMicrosPerSecond, (s + len(rng)) * kMicrosPerSecond, rate(rng)});
        }
        const std::int64_t slot_s = slot(rng);
        const auto series = aggregate_to_slots(records, slot_s);

        // Per-second accumulator on a grid aligned to multiples of the slot.
        std::int64_t lo = records[0].start_us, hi = records[0].end_us;
        for (const auto& r : records) {
            lo = std::min(lo, r.start_us);
            hi = std::max(hi, r.end_us);
        }
        lo -= lo % (slot_s * kMicrosPerSecond);
        const std::int64_t span_s = (hi - lo) / kMicrosPerSecond;
        std::vector<double> oracle(std::max<std::int64_t>(1, (span_s + slot_s - 1) / slot_s), 0.0);
        double mass = 0.0;
        for (const auto& r : records) {
            for (std::int64_t s = (r.start_us - lo) / kMicrosPerSecond; s < (r.end_us - lo) / kMicrosPerSecond; ++s) {
                oracle[static_cast<std::size_t>(s / slot_s)] += r.cpu_rate / static_cast<double>(slot_s);
                mass += r.cpu_rate;
            }
        }
        if (oracle.size() != series.values.size()) return {false, "slot count mismatch in trial " + std::to_string(trial)};
        double total = 0.0;
        for (std::size_t k = 0; k < oracle.size(); ++k) {
            const double scale = std::max({std::abs(oracle[k]), std::abs(series.values[k]), 1e-12});
            worst = std::max(worst, std::abs(series.values[k] - oracle[k]) / scale);
            total += series.values[k] * static_cast<double>(slot_s);
        }
        worst_mass = std::max(worst_mass, std::abs(total - mass) / std::max(mass, 1e-12));
    }
    Outcome o;
    o.pass = worst <= 1e-9 && worst_mass <= 1e-9;
    o.detail = "200 record sets, max slot error " + fmt("%.2e", worst) + ", max core-second error " +
               fmt("%.2e", worst_mass);
    return o;
}

Outcome ac8() {
    using namespace forecast;
    // Predictor trained on utilization-scale data, as the CLI would load it.
    const auto series = trace::synth_trace(2016, 8, trace::SynthProfile::SinusoidMix);
    const auto norm = minmax_normalize(series.values);
    TrainConfig tc;
    tc.epochs = 20;
    tc.learning_rate = 3e-3;
    tc.seed = 8;
    auto result = train(make_windows(norm.values, 3, 1), ModelConfig{3, 1, {16}}, tc);
    result.model.norm = norm.norm;
    const auto predictor = std::make_shared<recovery::LstmPredictor>(std::move(result.model));

    const auto cfg = harness::load_config(fixture("table3.json"));
    const auto results = harness::compare_policies(
        cfg, {{recovery::PolicyKind::Forecast, {}}, {recovery::PolicyKind::Random, {}}}, 100, predictor);
    const auto& fc = results[0];
    const auto& rnd = results[1];
    Outcome o;
    o.pass = fc.trials == 100 && fc.flagged_trial_fraction == 0.0 && rnd.flagged_trial_fraction > 0.0 &&
             fc.max_spread <= rnd.mean_spread;
    o.detail = "100 seeds, LSTM forecast flagged " + fmt("%.0f%%", 100.0 * fc.flagged_trial_fraction) +
               " spread " + fmt("%.3f", fc.max_spread) + "; random flagged " +
               fmt("%.0f%%", 100.0 * rnd.flagged_trial_fraction) + " mean spread " + fmt("%.3f", rnd.mean_spread);
    return o;
}

Outcome ac9() {
    auto cfg = harness::load_config(fixture("table3.json"));
    bool same = true;
    for (auto kind : {recovery::PolicyKind::CurrentLowest, recovery::PolicyKind::Random}) {
        cfg.policy = kind;
        for (std::uint64_t seed : {0, 7, 123456789}) {
            cfg.seed = seed;
            for (auto f : {harness::ReportFormat::Json, harness::ReportFormat::Csv, harness::ReportFormat::Text}) {
                same = same && harness::emit_report(harness::run_scenario(cfg), f) ==
                                   harness::emit_report(harness::run_scenario(cfg), f);
            }
        }
    }
    const auto replay = harness::load_config(fixture("table2.json"));
    same = same && harness::emit_report(harness::run_scenario(replay), harness::ReportFormat::Json) ==
                       harness::emit_report(harness::run_scenario(replay), harness::ReportFormat::Json);

    auto checkpoint_bytes = [] {
        using namespace forecast;
        const auto series = trace::synth_trace(400, 9, trace::SynthProfile::LogisticChaotic);
        const auto norm = minmax_normalize(series.values);
        TrainConfig tc;
        tc.epochs = 5;
        tc.seed = 9;
        auto r = train(make_windows(norm.values, 3, 1), ModelConfig{3, 1, {8, 8}}, tc);
        r.model.norm = norm.norm;
        std::ostringstream out;
        write_checkpoint(out, r.model);
        return out.str();
    };
    const auto a = checkpoint_bytes();
    const bool ckpt_same = a == checkpoint_bytes();
    Outcome o;
    o.pass = same && ckpt_same;
    o.detail = std::string("reports ") + (same ? "identical" : "differ") + ", checkpoints " +
               (ckpt_same ? "identical" : "differ") + " (" + std::to_string(a.size()) + " bytes)";
    return o;
}

Outcome ac10() {
    using namespace forecast;
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<std::size_t> len(1, 300), lb(1, 6), hz(1, 4);
    std::uniform_real_distribution<double> val(-50.0, 50.0), ratio(0.05, 0.5);
    std::size_t checked = 0;
    bool ok = true;
    double worst_roundtrip = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = len(rng), l = lb(rng), h = hz(rng);
        std::vector<double> v(n);
        for (auto& x : v) x = val(rng);
        if (n < l + h) {
            bool threw = false;
            try {
                make_windows(v, l, h);
            } catch (const InsufficientDataError&) {
                threw = true;
            }
            ok = ok && threw;
            continue;
        }
        const auto ds = make_windows(v, l, h);
        ok = ok && ds.size() == n - l - h + 1 && window_count(n, l, h) == ds.size();
        for (std::size_t i = 0; i < ds.size(); ++i) {
            ok = ok && std::equal(ds.x[i].begin(), ds.x[i].end(), v.begin() + static_cast<std::ptrdiff_t>(i)) &&
                 std::equal(ds.y[i].begin(), ds.y[i].end(), v.begin() + static_cast<std::ptrdiff_t>(i + l));
        }
        const double r = ratio(rng);
        const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(ds.size()) * r));
        try {
            const auto [tr, te] = chrono_split(ds, r);
            // The test set is the suffix and the two halves partition the windows in order.
            ok = ok && te.size() == n_test && tr.size() + te.size() == ds.size() && !tr.empty() && !te.empty();
            for (std::size_t i = 0; i < te.size(); ++i) ok = ok && te.x[i] == ds.x[tr.size() + i];
            for (std::size_t i = 0; i < tr.size(); ++i) ok = ok && tr.x[i] == ds.x[i];
        } catch (const EmptySplitError&) {
            ok = ok && n_test == 0;
        }
        if (n >= 2) {
            const auto norm = minmax_normalize(v);
            const auto back = denormalize(norm.values, norm.norm);
            const double range = norm.norm.max() - norm.norm.min();
            for (std::size_t i = 0; i < n; ++i) {
                worst_roundtrip = std::max(worst_roundtrip, std::abs(back[i] - v[i]) / std::max(1.0, range));
                ok = ok && norm.values[i] >= 0.0 && norm.values[i] <= 1.0;
            }
        }
        ++checked;
    }
    auto throws = [](const std::function<void()>& f, auto tag) {
        try {
            f();
        } catch (const decltype(tag)&) {
            return true;
        } catch (...) {
        }
        return false;
    };
    const bool errors = throws([] { minmax_normalize(std::vector<double>{2.0, 2.0, 2.0}); }, DegenerateRangeError()) &&
                        throws([] { minmax_normalize(std::vector<double>{2.0}); }, InsufficientDataError("")) &&
                        throws([] { NormParams(1.0, 1.0); }, DegenerateRangeError()) &&
                        throws([] { make_windows(std::vector<double>{1, 2, 3}, 3, 1); }, InsufficientDataError(""));
    Outcome o;
    o.pass = ok && errors && worst_roundtrip <= 1e-12 && checked > 100;
    o.detail = std::to_string(checked) + " random series, normalization round-trip error " +
               fmt("%.2e", worst_roundtrip) + ", error paths " + (errors ? "ok" : "wrong");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"AC1 balanced table", ac1},        {"AC2 replayed random table", ac2},
        {"AC3 recovery timing", ac3},       {"AC4 BPTT gradients", ac4},
        {"AC5 parameter count", ac5},       {"AC6 forecast quality", ac6},
        {"AC7 slot aggregation", ac7},      {"AC8 policy comparison", ac8},
        {"AC9 determinism", ac9},           {"AC10 window/split invariants", ac10},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
