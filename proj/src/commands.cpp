#include "calfront/commands.hpp"

#include "calfront/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace calfront::cli {
namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    std::string cell(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(std::move(cell));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split(line, ','));
  }
  if (rows.empty()) throw InputError(path.string() + ": empty CSV");
  return rows;
}

long parse_long(const std::string& s, const fs::path& where) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError(where.string() + ": expected an integer, got '" + s + "'");
}

double parse_double(const std::string& s, const fs::path& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError(where.string() + ": expected a number, got '" + s + "'");
}

Manifest manifest_or_throw(const fs::path& path) {
  try {
    return load_manifest(path);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

// Runs `body`, rethrowing input problems as InputError tagged with `scene`.
template <typename Body>
auto for_scene(const std::string& scene, Body&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    throw InputError("scene " + scene + ": " + e.what());
  } catch (const IoError& e) {
    throw InputError("scene " + scene + ": " + e.what());
  } catch (const ParseError& e) {
    throw InputError("scene " + scene + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError("scene " + scene + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw InputError("scene " + scene + ": " + e.what());
  }
}

fs::path scene_file(const fs::path& dir, const std::string& id, const char* ext) {
  fs::path p = dir / (id + ext);
  if (!fs::is_regular_file(p)) throw InputError("missing file " + p.string());
  return p;
}

}  // namespace

Mode parse_mode(std::string_view token) {
  if (token == "zones") return Mode::Zones;
  if (token == "front") return Mode::Front;
  throw std::invalid_argument("mode must be zones or front, got '" + std::string(token) + "'");
}

LengthMetric parse_length_metric(std::string_view token) {
  if (token == "pixelcount") return LengthMetric::PixelCount;
  if (token == "geometric") return LengthMetric::Geometric;
  throw std::invalid_argument("metric must be pixelcount or geometric, got '" + std::string(token) + "'");
}

EvalReport cmd_evaluate(const EvaluateConfig& config) {
  const Manifest manifest = manifest_or_throw(config.manifest);
  std::vector<const SceneMeta*> scenes;
  for (const auto& [id, meta] : manifest) scenes.push_back(&meta);

  const LengthPolicy policy{config.metric, config.min_front_m};
  std::vector<ScenePairResult> results(scenes.size());
  parallel_for(scenes.size(), config.jobs, [&](std::size_t i) {
    const SceneMeta& meta = *scenes[i];
    results[i] = for_scene(meta.id, [&] {
      const BoundingBox bbox = load_bbox(scene_file(config.bbox_dir, meta.id, ".txt"));
      const FrontMask truth = load_front_mask(scene_file(config.truth_dir, meta.id, ".png"));
      const fs::path pred_path = scene_file(config.pred_dir, meta.id, ".png");
      FrontMask pred;
      if (config.mode == Mode::Zones) {
        pred = zones_to_front(load_zone_mask(pred_path, config.zone_map), bbox, meta.resolution_m, policy);
      } else {
        pred = refine_front_mask(load_front_mask(pred_path, config.front_threshold), bbox,
                                 meta.resolution_m, policy);
      }
      require_same_shape(truth, pred, "prediction and ground truth");
      return pair_distance_terms(truth, pred, meta.resolution_m, meta.id);
    });
  });

  EvalReport report = mde(std::move(results));
  if (!config.out.empty()) {
    save_report(config.out, report);
    if (config.write_subsets) {
      for (GroupBy g : {GroupBy::Season, GroupBy::Glacier, GroupBy::Sensor, GroupBy::Resolution}) {
        const fs::path csv = config.out.parent_path() /
                             (config.out.stem().string() + "_" + std::string(to_string(g)) + ".csv");
        write_text(csv, render_subset_table(subset_report(report, manifest, g), TableFormat::Csv));
      }
    }
  }
  return report;
}

std::map<std::string, SeedRow> load_seeds(const fs::path& path) {
  const auto rows = read_csv(path);
  const auto& header = rows.front();
  const bool with_land = header.size() == 5;
  if (!(header.size() == 3 || with_land) || header[0] != "scene_id" || header[1] != "row" ||
      header[2] != "col" || (with_land && (header[3] != "land_row" || header[4] != "land_col"))) {
    throw InputError(path.string() + ": expected header scene_id,row,col[,land_row,land_col]");
  }
  std::map<std::string, SeedRow> seeds;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != header.size()) {
      throw InputError(path.string() + ": line " + std::to_string(i + 1) + " has " +
                       std::to_string(r.size()) + " fields");
    }
    SeedRow s;
    s.ocean = {parse_long(r[1], path), parse_long(r[2], path)};
    if (with_land && !r[3].empty()) s.land = Pixel{parse_long(r[3], path), parse_long(r[4], path)};
    if (!seeds.emplace(r[0], s).second) throw InputError(path.string() + ": duplicate scene " + r[0]);
  }
  return seeds;
}

AnnotatorSet load_annotators(const std::vector<fs::path>& dirs, const Manifest& manifest) {
  std::vector<fs::path> expanded;
  if (dirs.size() == 1 && fs::is_directory(dirs.front())) {
    for (const auto& entry : fs::directory_iterator(dirs.front())) {
      if (entry.is_directory() && entry.path().filename().string().rfind("annotator_", 0) == 0) {
        expanded.push_back(entry.path());
      }
    }
    // Natural order so annotator_10 follows annotator_9.
    std::sort(expanded.begin(), expanded.end(), [](const fs::path& a, const fs::path& b) {
      const std::string x = a.filename().string(), y = b.filename().string();
      return std::pair(x.size(), x) < std::pair(y.size(), y);
    });
  }
  if (expanded.empty()) expanded = dirs;
  if (expanded.size() < 2) throw InputError("fusion needs at least two annotator directories");

  AnnotatorSet set;
  for (const auto& dir : expanded) {
    if (!fs::is_directory(dir)) throw InputError("annotator directory not found: " + dir.string());
    Annotator a;
    a.id = dir.filename().string();
    if (a.id.empty()) a.id = dir.parent_path().filename().string();
    for (const auto& [id, meta] : manifest) {
      a.fronts.emplace(id, for_scene(id, [&] { return load_front_mask(scene_file(dir, id, ".png")); }));
    }
    set.annotators.push_back(std::move(a));
  }
  try {
    set.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return set;
}

FuseResult cmd_fuse(const FuseConfig& config) {
  const Manifest manifest = manifest_or_throw(config.manifest);
  const auto seeds = load_seeds(config.seeds_csv);
  SceneInputs inputs;
  for (const auto& [id, meta] : manifest) {
    const auto seed = seeds.find(id);
    if (seed == seeds.end()) throw InputError("scene " + id + ": no seed in " + config.seeds_csv.string());
    inputs.emplace(id, for_scene(id, [&] {
                     return SceneFusionInput{load_catchment(scene_file(config.catchments_dir, id, ".png")),
                                             seed->second.ocean, seed->second.land, meta.resolution_m};
                   }));
  }
  const AnnotatorSet annotators = load_annotators(config.annotator_dirs, manifest);

  FuseResult result;
  std::map<std::string, FrontMask> consensus;
  try {
    for (const auto& [id, scene] : inputs) {
      for (const auto& a : annotators.annotators) {
        const FrontMask& front = a.fronts.at(id);
        require_same_shape(front, scene.catchment, "annotation and catchment of scene " + id);
        if (ocean_mask_from_front(front, scene.catchment, scene.ocean_seed, scene.land_sentinel).leaked) {
          result.leak_warnings.push_back("scene " + id + ": ocean flood of " + a.id +
                                         " reached the land sentinel");
        }
      }
    }
    result.leave_one_out = leave_one_out(annotators, manifest, inputs, config.params, config.jobs);
    consensus = consensus_fronts(annotators, manifest, inputs, config.params);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }

  std::vector<WideRow> rows;
  for (std::size_t k = 0; k < result.leave_one_out.size(); ++k) {
    rows.push_back({"#" + std::to_string(k + 1), result.leave_one_out[k].report});
  }
  std::vector<WideRow> trailing;
  if (config.predictions_dir) {
    std::map<std::string, FrontMask> predictions;
    for (const auto& [id, meta] : manifest) {
      predictions.emplace(id, for_scene(id, [&] {
                            return load_front_mask(scene_file(*config.predictions_dir, id, ".png"));
                          }));
    }
    try {
      result.predictions =
          score_against_consensus("predictions", predictions, annotators, manifest, inputs, config.params);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    trailing.push_back({"predictions", result.predictions->report});
  }

  if (!config.out.empty()) {
    for (const auto& [id, front] : consensus) write_front_mask(config.out / "aggregate" / (id + ".png"), front);
    write_text(config.out / "leave_one_out.csv",
               render_wide_table(rows, manifest, TableFormat::Csv, true, trailing));
    write_text(config.out / "leave_one_out.md",
               render_wide_table(rows, manifest, TableFormat::Markdown, true, trailing));
    std::ostringstream ids;
    ids << "row,annotator\n";
    for (std::size_t k = 0; k < annotators.count(); ++k) {
      ids << '#' << k + 1 << ',' << annotators.annotators[k].id << '\n';
    }
    write_text(config.out / "annotators.csv", ids.str());
  }
  return result;
}

TestKind parse_test_kind(std::string_view token) {
  if (token == "kw") return TestKind::KruskalWallis;
  if (token == "mwu") return TestKind::MannWhitney;
  if (token == "kendall") return TestKind::Kendall;
  if (token == "cohend") return TestKind::CohensD;
  throw std::invalid_argument("test must be kw, mwu, kendall or cohend, got '" + std::string(token) + "'");
}

CompareMetric parse_compare_metric(std::string_view token) {
  if (token == "mde") return CompareMetric::Mde;
  if (token == "nofront") return CompareMetric::NoFront;
  throw std::invalid_argument("metric must be mde or nofront, got '" + std::string(token) + "'");
}

namespace {

struct RunValue {
  std::string group;
  double value = 0.0;
  std::optional<double> covariate;
};

fs::path canonical_key(const fs::path& p) {
  std::error_code ec;
  const fs::path c = fs::weakly_canonical(p, ec);
  return ec ? p.lexically_normal() : c;
}

std::vector<RunValue> load_runs(const CompareConfig& config) {
  std::map<fs::path, std::pair<std::string, std::optional<double>>> grouping;
  std::vector<fs::path> reports = config.reports;
  if (config.grouping) {
    const auto rows = read_csv(*config.grouping);
    const auto& h = rows.front();
    if (h.size() < 2 || h[0] != "report" || h[1] != "group" || (h.size() == 3 && h[2] != "covariate") ||
        h.size() > 3) {
      throw InputError(config.grouping->string() + ": expected header report,group[,covariate]");
    }
    const bool fill_reports = reports.empty();
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.size() != h.size()) {
        throw InputError(config.grouping->string() + ": line " + std::to_string(i + 1) + " has " +
                         std::to_string(r.size()) + " fields");
      }
      fs::path p = r[0];
      if (p.is_relative()) p = config.grouping->parent_path() / p;
      std::optional<double> cov;
      if (h.size() == 3) cov = parse_double(r[2], *config.grouping);
      grouping[canonical_key(p)] = {r[1], cov};
      if (fill_reports) reports.push_back(p);
    }
  }
  if (reports.size() < 2) throw InputError("compare needs at least two reports");

  std::vector<RunValue> runs;
  for (const auto& path : reports) {
    EvalReport report;
    try {
      report = load_report(path);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
    RunValue run;
    if (config.grouping) {
      const auto it = grouping.find(canonical_key(path));
      if (it == grouping.end()) throw InputError(path.string() + ": not listed in the grouping file");
      run.group = it->second.first;
      run.covariate = it->second.second;
    } else {
      run.group = canonical_key(path).parent_path().filename().string();
    }
    if (config.metric == CompareMetric::Mde) {
      if (!report.mde_m) throw InputError(path.string() + ": no MDE, every prediction was empty");
      run.value = *report.mde_m;
    } else {
      run.value = static_cast<double>(report.no_front_count);
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

std::optional<double> effect_size(const stats::Sample& x, const stats::Sample& y) {
  try {
    return stats::cohens_d(x, y);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::vector<CompareRow> cmd_compare(const CompareConfig& config) {
  const std::vector<RunValue> runs = load_runs(config);
  std::vector<std::string> order;
  std::map<std::string, stats::Sample> groups;
  for (const auto& r : runs) {
    if (!groups.count(r.group)) order.push_back(r.group);
    groups[r.group].push_back(r.value);
  }

  std::vector<CompareRow> rows;
  const char* test_name[] = {"kw", "mwu", "kendall", "cohend"};
  const std::string name = test_name[static_cast<int>(config.test)];
  try {
    switch (config.test) {
      case TestKind::KruskalWallis: {
        if (order.size() < 2) throw InputError("kw needs at least two groups");
        std::vector<stats::Sample> samples;
        std::string label;
        for (const auto& g : order) {
          samples.push_back(groups[g]);
          label += (label.empty() ? "" : ";") + g;
        }
        CompareRow row;
        row.group_x = label;
        row.n_x = runs.size();
        row.result = stats::kruskal_wallis(samples);
        rows.push_back(row);
        break;
      }
      case TestKind::MannWhitney:
      case TestKind::CohensD: {
        if (order.size() < 2) throw InputError(name + " needs at least two groups");
        const stats::Sample& x = groups[order.front()];
        for (std::size_t j = 1; j < order.size(); ++j) {
          const stats::Sample& y = groups[order[j]];
          CompareRow row;
          row.group_x = order.front();
          row.group_y = order[j];
          row.n_x = x.size();
          row.n_y = y.size();
          row.effect_size = effect_size(x, y);
          if (config.test == TestKind::MannWhitney) {
            row.result = stats::mann_whitney_u(x, y, config.alternative);
          } else {
            if (!row.effect_size) throw InputError("cohend: both groups have zero variance");
            row.result.statistic = *row.effect_size;
            row.result.p_value = std::nan("");
          }
          rows.push_back(row);
        }
        break;
      }
      case TestKind::Kendall: {
        stats::Sample cov, val;
        for (const auto& r : runs) {
          if (!r.covariate) throw InputError("kendall needs a grouping file with a covariate column");
          cov.push_back(*r.covariate);
          val.push_back(r.value);
        }
        CompareRow row;
        row.group_x = "covariate";
        row.group_y = config.metric == CompareMetric::Mde ? "mde" : "nofront";
        row.n_x = row.n_y = runs.size();
        row.result = stats::kendall_tau(cov, val);
        rows.push_back(row);
        break;
      }
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }

  const int m = config.bonferroni_m.value_or(static_cast<int>(rows.size()));
  if (m < 1) throw std::invalid_argument("bonferroni m must be >= 1");
  for (auto& row : rows) {
    row.test = name;
    row.alpha = config.alpha;
    row.bonferroni_m = m;
    row.alpha_adjusted = stats::bonferroni(config.alpha, m);
    row.p_adjusted = std::isnan(row.result.p_value) ? row.result.p_value : stats::adjust_p(row.result.p_value, m);
  }
  if (!config.out.empty()) write_text(config.out, render_compare_csv(rows));
  return rows;
}

std::string render_compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << "test,group_x,group_y,n_x,n_y,statistic,df,p_value,method,alpha,bonferroni_m,"
         "alpha_adjusted,p_adjusted,significant,effect_size\n";
  for (const auto& r : rows) {
    const bool has_p = !std::isnan(r.result.p_value);
    out << r.test << ',' << r.group_x << ',' << r.group_y << ',' << r.n_x << ',' << r.n_y << ','
        << fmt(r.result.statistic) << ',' << (r.result.df ? std::to_string(*r.result.df) : "") << ','
        << (has_p ? fmt(r.result.p_value) : "") << ',' << (has_p ? stats::to_string(r.result.method) : "")
        << ',' << fmt(r.alpha) << ',' << r.bonferroni_m << ',' << fmt(r.alpha_adjusted) << ','
        << (has_p ? fmt(r.p_adjusted) : "")
        << ',' << (has_p ? (r.result.p_value < r.alpha_adjusted ? "true" : "false") : "") << ','
        << (r.effect_size ? fmt(*r.effect_size) : "") << '\n';
  }
  return out.str();
}

void cmd_synth(const SynthConfig& config) {
  try {
    config.params.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  write_synth_dataset(config.params, config.output, config.out);
}

std::string cmd_report(const ReportConfig& config) {
  EvalReport report;
  try {
    report = load_report(config.in);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  const Manifest manifest = manifest_or_throw(config.manifest);
  for (const auto& s : report.scenes) {
    if (!manifest.count(s.id)) throw InputError("scene " + s.id + " missing from " + config.manifest.string());
  }
  if (config.group_by == "table") {
    return render_wide_table({{config.in.stem().string(), report}}, manifest, config.format, false);
  }
  return render_subset_table(subset_report(report, manifest, parse_group_by(config.group_by)), config.format);
}

}  // namespace calfront::cli
