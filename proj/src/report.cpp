#include "calfront/report.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace calfront {

using nlohmann::json;

json report_to_json(const EvalReport& report) {
  json scenes = json::array();
  for (const auto& s : report.scenes) {
    const auto m = s.mde_m();
    scenes.push_back({{"id", s.id},
                      {"mde_m", m ? json(*m) : json(nullptr)},
                      {"truth_px", s.truth_px},
                      {"pred_px", s.pred_px},
                      {"numerator_m", s.numerator_m},
                      {"weight", s.weight}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"scenes", std::move(scenes)},
          {"mde_m", report.mde_m ? json(*report.mde_m) : json(nullptr)},
          {"no_front_count", report.no_front_count}};
}

EvalReport report_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ParseError("report must be a JSON object");
    const int version = j.at("schema_version").get<int>();
    if (version != kReportSchemaVersion) {
      throw ParseError("unsupported report schema version " + std::to_string(version));
    }
    std::vector<ScenePairResult> scenes;
    for (const auto& s : j.at("scenes")) {
      ScenePairResult r;
      r.id = s.at("id").get<std::string>();
      r.truth_px = s.at("truth_px").get<Index>();
      r.pred_px = s.at("pred_px").get<Index>();
      r.predicted_empty = s.at("mde_m").is_null();
      if (!r.predicted_empty) {
        r.numerator_m = s.at("numerator_m").get<double>();
        r.weight = s.at("weight").get<Index>();
      }
      scenes.push_back(std::move(r));
    }
    return mde(std::move(scenes));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

std::string dump_report(const EvalReport& report) { return report_to_json(report).dump(2) + "\n"; }

void save_report(const std::filesystem::path& path, const EvalReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << dump_report(report);
}

EvalReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return report_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

TableFormat parse_table_format(std::string_view token) {
  if (token == "csv") return TableFormat::Csv;
  if (token == "md" || token == "markdown") return TableFormat::Markdown;
  throw std::invalid_argument("unknown table format '" + std::string(token) + "'");
}

std::string format_mde(const std::optional<double>& mde_m) {
  if (!mde_m) return "/";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", *mde_m);
  return buf;
}

namespace {

std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& body, TableFormat format) {
  std::ostringstream out;
  if (format == TableFormat::Csv) {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << '\n';
    };
    line(header);
    for (const auto& row : body) line(row);
    return out.str();
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = std::max<std::size_t>(3, header[i].size());
  for (const auto& row : body)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  auto line = [&](const std::vector<std::string>& cells, bool left_first) {
    out << '|';
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string pad(width[i] - cells[i].size(), ' ');
      out << ' ' << (i == 0 && left_first ? cells[i] + pad : pad + cells[i]) << " |";
    }
    out << '\n';
  };
  line(header, true);
  out << '|';
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i == 0 ? ' ' + std::string(width[i], '-') + " |" : ' ' + std::string(width[i] - 1, '-') + ": |");
  }
  out << '\n';
  for (const auto& row : body) line(row, true);
  return out.str();
}

}  // namespace

std::string render_subset_table(const std::vector<SubsetRow>& rows, TableFormat format) {
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows) {
    body.push_back({r.group, format_mde(r.mde_m), std::to_string(r.no_front_count),
                    std::to_string(r.scenes)});
  }
  return render({"group", "mde_m", "no_front_count", "scenes"}, body, format);
}

std::string render_wide_table(const std::vector<WideRow>& rows, const Manifest& manifest,
                              TableFormat format, bool with_mean_row,
                              const std::vector<WideRow>& trailing) {
  constexpr GroupBy kGroups[] = {GroupBy::All, GroupBy::Season, GroupBy::Glacier, GroupBy::Sensor,
                                 GroupBy::Resolution};

  // Column set: every group present in any row, in subset_report order.
  std::vector<WideRow> all_rows = rows;
  all_rows.insert(all_rows.end(), trailing.begin(), trailing.end());
  std::vector<std::pair<GroupBy, std::string>> columns;
  for (GroupBy g : kGroups) {
    std::set<std::string> seen;
    for (const auto& row : all_rows) {
      for (const auto& s : subset_report(row.report, manifest, g)) {
        if (seen.insert(s.group).second) columns.emplace_back(g, s.group);
      }
    }
  }

  std::vector<std::string> header{""};
  for (const auto& c : columns) header.push_back(c.second);
  header.push_back("no_front");

  auto values_of = [&](const WideRow& row) {
    std::vector<std::optional<double>> values(columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) {
      for (const auto& s : subset_report(row.report, manifest, columns[i].first)) {
        if (s.group == columns[i].second) values[i] = s.mde_m;
      }
    }
    return values;
  };
  auto cells_of = [&](const WideRow& row, const std::vector<std::optional<double>>& values) {
    std::vector<std::string> cells{row.label};
    for (const auto& v : values) cells.push_back(format_mde(v));
    cells.push_back(std::to_string(row.report.no_front_count));
    return cells;
  };

  std::vector<std::vector<std::string>> body;
  std::vector<double> sums(columns.size(), 0.0);
  std::vector<int> counts(columns.size(), 0);
  double no_front_sum = 0.0;
  for (const auto& row : rows) {
    const auto values = values_of(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i]) {
        sums[i] += *values[i];
        ++counts[i];
      }
    }
    no_front_sum += static_cast<double>(row.report.no_front_count);
    body.push_back(cells_of(row, values));
  }
  if (with_mean_row && !rows.empty()) {
    std::vector<std::string> cells{"Mean"};
    for (std::size_t i = 0; i < columns.size(); ++i) {
      cells.push_back(format_mde(counts[i] ? std::optional<double>(sums[i] / counts[i]) : std::nullopt));
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", no_front_sum / static_cast<double>(rows.size()));
    cells.push_back(buf);
    body.push_back(std::move(cells));
  }
  for (const auto& row : trailing) body.push_back(cells_of(row, values_of(row)));
  return render(header, body, format);
}

}  // namespace calfront
