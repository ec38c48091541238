#pragma once

// Serialization of evaluation reports and rendering of subset tables.

#include "calfront/metrics.hpp"

#include "json.hpp"

#include <filesystem>

namespace calfront {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json report_to_json(const EvalReport& report);
/// Throws ParseError on a missing field or a foreign schema version.
EvalReport report_from_json(const nlohmann::json& j);

/// Pretty-printed JSON followed by a newline; byte-stable for equal reports.
std::string dump_report(const EvalReport& report);
void save_report(const std::filesystem::path& path, const EvalReport& report);
EvalReport load_report(const std::filesystem::path& path);

enum class TableFormat { Csv, Markdown };
TableFormat parse_table_format(std::string_view token);

/// "/" when absent, otherwise fixed two decimals.
std::string format_mde(const std::optional<double>& mde_m);

/// Long layout: one row per group with MDE, no-front count and scene count.
std::string render_subset_table(const std::vector<SubsetRow>& rows, TableFormat format);

/// Wide layout: one row per labelled report, one column per subset
/// (All, seasons, glaciers, sensors, resolutions) as in an annotator table.
struct WideRow {
  std::string label;
  EvalReport report;
};
/// `trailing` rows are appended after the optional Mean row and excluded from it.
std::string render_wide_table(const std::vector<WideRow>& rows, const Manifest& manifest,
                              TableFormat format, bool with_mean_row,
                              const std::vector<WideRow>& trailing = {});

}  // namespace calfront
