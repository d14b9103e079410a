#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "drsim/harness/scenario.hpp"

namespace drsim::harness {

enum class ReportFormat { Text, Json, Csv };

std::optional<ReportFormat> parse_report_format(std::string_view name);

/// Text: the utilization table (Initial State row, one row per round, and an
/// O/X row marking clusters below the threshold) followed by the timing table.
/// Json and Csv carry the same data at full precision.
std::string emit_report(const ScenarioReport& report, ReportFormat format);

nlohmann::json report_to_json(const ScenarioReport& report);
ScenarioReport report_from_json(const nlohmann::json& doc);
ScenarioReport parse_report_csv(std::string_view csv);

/// The O/X marks of the threshold row: 'O' when utilization < threshold.
std::vector<char> threshold_marks(const ScenarioReport& report);

/// Policy comparison as an aligned text table or JSON.
std::string emit_comparison(const std::vector<PolicyComparison>& results, ReportFormat format);

}  // namespace drsim::harness
