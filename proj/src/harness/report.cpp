#include "drsim/harness/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "drsim/error.hpp"

namespace drsim::harness {

namespace {

using nlohmann::json;

std::string shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// Fixed two decimals with trailing zeros dropped: 20 -> "20", 27.45 -> "27.45".
std::string compact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s(buf);
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s == "-0" ? "0" : s;
}

std::string percent(double fraction) { return std::to_string(std::llround(fraction * 100.0)) + "%"; }

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

json timeline_json(const recovery::RecoveryTimeline& t) {
    return {{"affected", t.affected},
            {"target", t.target},
            {"backup_name", t.backup_name},
            {"failed_at_s", t.failed_at_s},
            {"detected_at_s", t.detected_at_s},
            {"command_issued_at_s", t.command_issued_at_s},
            {"restore_completed_at_s", t.restore_completed_at_s},
            {"recovery_time_s", t.recovery_time()},
            {"restoration_time_s", t.restoration_time()}};
}

recovery::RecoveryTimeline timeline_from_json(const json& j) {
    recovery::RecoveryTimeline t;
    t.affected = j.at("affected").get<std::string>();
    t.target = j.at("target").get<std::string>();
    t.backup_name = j.at("backup_name").get<std::string>();
    t.failed_at_s = j.at("failed_at_s").get<double>();
    t.detected_at_s = j.at("detected_at_s").get<double>();
    t.command_issued_at_s = j.at("command_issued_at_s").get<double>();
    t.restore_completed_at_s = j.at("restore_completed_at_s").get<double>();
    return t;
}

std::string threshold_label(double threshold) {
    return "Clusters with CPU utilization under " + compact(threshold * 100.0) + "%";
}

std::string render_text(const ScenarioReport& r) {
    std::ostringstream out;
    out << "Policy: " << r.policy << "  Seed: " << r.seed << "\n\n";

    const std::string label = threshold_label(r.threshold);
    const std::size_t first = std::max<std::size_t>(label.size(), 17) + 2;
    std::vector<std::size_t> widths;
    for (const auto& c : r.columns) {
        widths.push_back(std::max<std::size_t>(c.size(), 4) + 2);
    }
    auto row = [&](const std::string& head, const std::vector<std::string>& cells, const std::string& tail) {
        std::string line = pad(head, first);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            line += pad(cells[i], widths[i]);
        }
        line += tail;
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
    };
    auto percents = [](const std::vector<double>& v) {
        std::vector<std::string> cells;
        for (double u : v) cells.push_back(percent(u));
        return cells;
    };

    row("Restoration Count", r.columns, "Target");
    row("Initial State", percents(r.initial), "");
    for (const auto& rr : r.rows) {
        row(std::to_string(rr.round), percents(rr.utilization), rr.halted ? "HALTED" : rr.target);
    }
    std::vector<std::string> marks;
    for (char m : threshold_marks(r)) marks.emplace_back(1, m);
    row(label, marks, "");

    out << '\n';
    const std::vector<std::string> heads = {"Case", "Recovery Time (A)", "Restoration Time (B)", "(A-B)"};
    const std::vector<std::size_t> tw = {6, 19, 22, 7};
    auto trow = [&](const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) line += pad(cells[i], tw[i]);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
    };
    trow(heads);
    for (const auto& rr : r.rows) {
        if (rr.timeline) {
            const auto& t = *rr.timeline;
            trow({std::to_string(rr.round), compact(t.recovery_time()), compact(t.restoration_time()),
                  compact(t.recovery_time() - t.restoration_time())});
        } else {
            trow({std::to_string(rr.round), "HALTED", "-", "-"});
        }
    }
    if (r.summary.completed_rounds > 0) {
        trow({"AVG", compact(r.summary.mean_recovery_s), compact(r.summary.mean_restoration_s),
              compact(r.summary.mean_gap_s)});
    }
    if (!r.flagged.empty()) {
        out << "\nWARNING: at or above " << compact(r.threshold * 100.0) << "% utilization:";
        for (const auto& f : r.flagged) out << ' ' << f;
        out << '\n';
    }
    return out.str();
}

// --- CSV ---

const std::vector<std::string> kCsvFixed = {
    "policy", "seed", "threshold", "round", "status", "target", "affected", "backup_name", "alert",
    "failed_at_s", "detected_at_s", "command_issued_at_s", "restore_completed_at_s",
};

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string render_csv(const ScenarioReport& r) {
    std::ostringstream out;
    std::vector<std::string> header = kCsvFixed;
    header.insert(header.end(), r.columns.begin(), r.columns.end());
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << csv_quote(header[i]);
    }
    out << '\n';
    auto line = [&](std::vector<std::string> cells, const std::vector<double>& util) {
        for (double u : util) cells.push_back(shortest(u));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "," : "") << csv_quote(cells[i]);
        }
        out << '\n';
    };
    const std::string seed = std::to_string(r.seed);
    const std::string thr = shortest(r.threshold);
    line({r.policy, seed, thr, "0", "initial", "", "", "", "", "", "", "", ""}, r.initial);
    for (const auto& rr : r.rows) {
        std::vector<std::string> cells = {r.policy, seed, thr, std::to_string(rr.round),
                                          rr.halted ? "halted" : "restored", rr.target};
        if (rr.timeline) {
            const auto& t = *rr.timeline;
            cells.insert(cells.end(), {t.affected, t.backup_name, rr.alert, shortest(t.failed_at_s),
                                       shortest(t.detected_at_s), shortest(t.command_issued_at_s),
                                       shortest(t.restore_completed_at_s)});
        } else {
            cells.insert(cells.end(), {"", "", rr.alert, "", "", "", ""});
        }
        line(std::move(cells), rr.utilization);
    }
    return out.str();
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error("report csv: bad number '" + s + "'");
    }
    return v;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view name) {
    if (name == "text") return ReportFormat::Text;
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    return std::nullopt;
}

std::vector<char> threshold_marks(const ScenarioReport& report) {
    std::vector<char> marks;
    for (double u : report.final_utilization()) {
        marks.push_back(u < report.threshold ? 'O' : 'X');
    }
    return marks;
}

json report_to_json(const ScenarioReport& r) {
    json doc;
    doc["policy"] = r.policy;
    doc["seed"] = r.seed;
    doc["threshold"] = r.threshold;
    doc["columns"] = r.columns;
    doc["initial"] = r.initial;
    auto& rows = doc["rows"] = json::array();
    for (const auto& rr : r.rows) {
        json row = {{"round", rr.round},
                    {"status", rr.halted ? "halted" : "restored"},
                    {"target", rr.target},
                    {"utilization", rr.utilization}};
        if (rr.halted) row["alert"] = rr.alert;
        if (rr.timeline) row["timeline"] = timeline_json(*rr.timeline);
        rows.push_back(std::move(row));
    }
    doc["flagged"] = r.flagged;
    doc["summary"] = {{"completed_rounds", r.summary.completed_rounds},
                      {"mean_recovery_s", r.summary.mean_recovery_s},
                      {"mean_restoration_s", r.summary.mean_restoration_s},
                      {"mean_gap_s", r.summary.mean_gap_s}};
    return doc;
}

ScenarioReport report_from_json(const json& doc) {
    ScenarioReport r;
    r.policy = doc.at("policy").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.threshold = doc.at("threshold").get<double>();
    r.columns = doc.at("columns").get<std::vector<std::string>>();
    r.initial = doc.at("initial").get<std::vector<double>>();
    for (const auto& row : doc.at("rows")) {
        RoundRow rr;
        rr.round = row.at("round").get<std::size_t>();
        rr.halted = row.at("status").get<std::string>() == "halted";
        rr.target = row.at("target").get<std::string>();
        rr.alert = row.value("alert", std::string{});
        rr.utilization = row.at("utilization").get<std::vector<double>>();
        if (row.contains("timeline")) rr.timeline = timeline_from_json(row.at("timeline"));
        r.rows.push_back(std::move(rr));
    }
    finalize_report(r);
    return r;
}

ScenarioReport parse_report_csv(std::string_view csv) {
    std::vector<std::vector<std::string>> lines;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        auto end = csv.find('\n', pos);
        if (end == std::string_view::npos) end = csv.size();
        auto line = csv.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(csv_split(line));
        pos = end + 1;
    }
    if (lines.size() < 2) {
        throw Error("report csv: expected a header and an initial row");
    }
    const auto& header = lines.front();
    const std::size_t fixed = kCsvFixed.size();
    if (header.size() < fixed || !std::equal(kCsvFixed.begin(), kCsvFixed.end(), header.begin())) {
        throw Error("report csv: unexpected header");
    }
    ScenarioReport r;
    r.columns.assign(header.begin() + static_cast<std::ptrdiff_t>(fixed), header.end());
    auto utils = [&](const std::vector<std::string>& f) {
        if (f.size() != header.size()) throw Error("report csv: row width does not match header");
        std::vector<double> u;
        for (std::size_t i = fixed; i < f.size(); ++i) u.push_back(parse_double(f[i]));
        return u;
    };
    const auto& init = lines[1];
    r.policy = init[0];
    r.seed = std::stoull(init[1]);
    r.threshold = parse_double(init[2]);
    r.initial = utils(init);
    for (std::size_t li = 2; li < lines.size(); ++li) {
        const auto& f = lines[li];
        RoundRow rr;
        rr.utilization = utils(f);
        rr.round = std::stoull(f[3]);
        rr.halted = f[4] == "halted";
        rr.target = f[5];
        rr.alert = f[8];
        if (!rr.halted) {
            recovery::RecoveryTimeline t;
            t.target = f[5];
            t.affected = f[6];
            t.backup_name = f[7];
            t.failed_at_s = parse_double(f[9]);
            t.detected_at_s = parse_double(f[10]);
            t.command_issued_at_s = parse_double(f[11]);
            t.restore_completed_at_s = parse_double(f[12]);
            rr.timeline = t;
        }
        r.rows.push_back(std::move(rr));
    }
    finalize_report(r);
    return r;
}

std::string emit_report(const ScenarioReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Text: return render_text(report);
        case ReportFormat::Json: return report_to_json(report).dump(2) + "\n";
        case ReportFormat::Csv: return render_csv(report);
    }
    return {};
}

std::string emit_comparison(const std::vector<PolicyComparison>& results, ReportFormat format) {
    if (format == ReportFormat::Json || format == ReportFormat::Csv) {
        json doc = json::array();
        for (const auto& c : results) {
            doc.push_back({{"policy", c.policy},
                           {"trials", c.trials},
                           {"mean_final_max", c.mean_final_max},
                           {"mean_spread", c.mean_spread},
                           {"max_spread", c.max_spread},
                           {"mean_flagged", c.mean_flagged},
                           {"flagged_trial_fraction", c.flagged_trial_fraction},
                           {"halted_rounds", c.halted_rounds}});
        }
        if (format == ReportFormat::Json) {
            return doc.dump(2) + "\n";
        }
        std::string out =
            "policy,trials,mean_final_max,mean_spread,max_spread,mean_flagged,flagged_trial_fraction,halted_rounds\n";
        for (const auto& c : results) {
            out += c.policy + "," + std::to_string(c.trials) + "," + shortest(c.mean_final_max) + "," +
                   shortest(c.mean_spread) + "," + shortest(c.max_spread) + "," + shortest(c.mean_flagged) + "," +
                   shortest(c.flagged_trial_fraction) + "," + std::to_string(c.halted_rounds) + "\n";
        }
        return out;
    }
    std::ostringstream out;
    const std::vector<std::string> heads = {"Policy",      "Trials",        "Mean final max", "Mean spread",
                                            "Max spread",  "Mean flagged",  "Trials flagged", "Halted rounds"};
    std::vector<std::size_t> w;
    for (const auto& h : heads) w.push_back(h.size() + 2);
    auto row = [&](const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) line += pad(cells[i], w[i]);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
    };
    row(heads);
    for (const auto& c : results) {
        row({c.policy, std::to_string(c.trials), compact(c.mean_final_max * 100.0) + "%",
             compact(c.mean_spread * 100.0) + " pp", compact(c.max_spread * 100.0) + " pp", compact(c.mean_flagged),
             compact(c.flagged_trial_fraction * 100.0) + "%", std::to_string(c.halted_rounds)});
    }
    return out.str();
}

}  // namespace drsim::harness
