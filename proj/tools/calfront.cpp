// calfront: batch evaluation of calving-front predictions.
//
//   calfront evaluate --pred DIR --truth DIR --bboxes DIR --manifest CSV --out report.json
//   calfront fuse     --annotators DIR[,DIR...] --catchments DIR --seeds CSV --manifest CSV --out DIR
//   calfront compare  --reports R1 R2 ... --test kw|mwu|kendall|cohend --out stats.csv
//   calfront synth    --n N --size S --seed K --boundary vertical|sinusoid:A:P --out DIR
//   calfront report   --in report.json --manifest CSV --group-by all|season|... --format csv|md
//
// Exit codes: 0 success, 1 usage error, 2 missing or corrupt input.

#include "calfront/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace calfront;
using namespace calfront::cli;

template <typename T, typename Parse>
auto parsed(T& target, Parse parse) {
  return [&target, parse](const std::string& token) { target = parse(token); };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calving-front evaluation toolkit"};
  app.set_config("--config", "", "key=value configuration file; flags take precedence");
  app.fallthrough();  // --config is accepted after the subcommand name too
  app.require_subcommand(1);

  // evaluate
  EvaluateConfig eval;
  std::string eval_mode = "zones", eval_metric = "pixelcount", zone_map;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground-truth fronts");
  evaluate->add_option("--pred", eval.pred_dir, "Prediction directory (<scene>.png)")->required();
  evaluate->add_option("--truth", eval.truth_dir, "Ground-truth front directory")->required();
  evaluate->add_option("--bboxes", eval.bbox_dir, "Bounding-box directory (<scene>.txt)")->required();
  evaluate->add_option("--manifest", eval.manifest, "Scene manifest CSV")->required();
  evaluate->add_option("--mode", eval_mode, "zones|front")->capture_default_str();
  evaluate->add_option("--min-front-m", eval.min_front_m, "Minimum front length in metres")->capture_default_str();
  evaluate->add_option("--metric", eval_metric, "pixelcount|geometric")->capture_default_str();
  evaluate->add_option("--zone-map", zone_map, "Gray values, e.g. na=0,rock=64,glacier=127,ocean=254");
  evaluate->add_option("--jobs", eval.jobs, "Worker threads")->capture_default_str();
  evaluate->add_option("--out", eval.out, "Report JSON path")->required();
  evaluate->add_flag("!--no-subsets", eval.write_subsets, "Skip the per-group CSVs");

  // fuse
  FuseConfig fuse;
  std::vector<std::string> annotator_dirs;
  std::string threshold = "auto", fuse_metric = "pixelcount";
  std::string predictions;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse annotator fronts and score leave-one-out agreement");
  fuse_cmd->add_option("--annotators", annotator_dirs, "Annotator directories, or one parent of annotator_<k>/")
      ->required()
      ->delimiter(',');
  fuse_cmd->add_option("--catchments", fuse.catchments_dir, "Catchment mask directory")->required();
  fuse_cmd->add_option("--seeds", fuse.seeds_csv, "Ocean seed CSV")->required();
  fuse_cmd->add_option("--manifest", fuse.manifest, "Scene manifest CSV")->required();
  fuse_cmd->add_option("--buffer-m", fuse.params.buffer_m, "Catchment buffer in metres")->capture_default_str();
  fuse_cmd->add_option("--threshold", threshold, "Vote threshold: auto or K")->capture_default_str();
  fuse_cmd->add_option("--min-front-m", fuse.params.min_front_m, "Minimum front length in metres")
      ->capture_default_str();
  fuse_cmd->add_option("--metric", fuse_metric, "pixelcount|geometric")->capture_default_str();
  fuse_cmd->add_option("--predictions", predictions, "Prediction fronts scored against the full consensus");
  fuse_cmd->add_option("--jobs", fuse.jobs, "Worker threads")->capture_default_str();
  fuse_cmd->add_option("--out", fuse.out, "Output directory")->required();

  // compare
  CompareConfig compare;
  std::vector<std::string> reports;
  std::string grouping, test = "mwu", alternative = "less", compare_metric = "mde";
  int bonferroni_m = 0;
  auto* compare_cmd = app.add_subcommand("compare", "Statistical comparison of evaluation runs");
  compare_cmd->add_option("--reports", reports, "Report JSON files, one per run");
  compare_cmd->add_option("--grouping", grouping, "CSV report,group[,covariate]");
  compare_cmd->add_option("--test", test, "kw|mwu|kendall|cohend")->capture_default_str();
  compare_cmd->add_option("--alternative", alternative, "less|greater|two-sided")->capture_default_str();
  compare_cmd->add_option("--bonferroni", bonferroni_m, "Number of comparisons (default: rows emitted)");
  compare_cmd->add_option("--metric", compare_metric, "mde|nofront")->capture_default_str();
  compare_cmd->add_option("--alpha", compare.alpha, "Significance level")->capture_default_str();
  compare_cmd->add_option("--out", compare.out, "Output CSV (default: stdout)");

  // synth
  SynthConfig synth;
  std::string boundary = "vertical";
  int shift = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset with known fronts");
  synth_cmd->add_option("--n", synth.output.scenes, "Number of scenes")->capture_default_str();
  synth_cmd->add_option("--size", synth.params.size, "Scene side in pixels")->capture_default_str();
  synth_cmd->add_option("--seed", synth.params.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--boundary", boundary, "vertical|sinusoid:A:P")->capture_default_str();
  synth_cmd->add_option("--rock-rows", synth.params.rock_rows, "Rock rows at the top")->capture_default_str();
  synth_cmd->add_option("--resolution-m", synth.params.resolution_m, "Metres per pixel")->capture_default_str();
  synth_cmd->add_flag("!--no-na-corner", synth.params.na_corner, "Omit the NA corner");
  auto* shift_opt = synth_cmd->add_option("--shift", shift, "Also write pred_zones/ shifted by this many px");
  synth_cmd->add_option("--annotators", synth.output.annotators, "Also write jittered annotator_<k>/ fronts");
  synth_cmd->add_option("--annotator-offset", synth.output.annotator_max_offset_px, "Maximum annotator jitter in px")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  // report
  ReportConfig report;
  std::string format = "csv";
  auto* report_cmd = app.add_subcommand("report", "Render a report as a table");
  report_cmd->add_option("--in", report.in, "Report JSON")->required();
  report_cmd->add_option("--manifest", report.manifest, "Scene manifest CSV")->required();
  report_cmd->add_option("--group-by", report.group_by, "all|season|glacier|sensor|resolution|table")
      ->capture_default_str();
  report_cmd->add_option("--format", format, "csv|md")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    // Token validation happens before any work so bad flags exit with 1.
    try {
      if (*evaluate) {
        eval.mode = parse_mode(eval_mode);
        eval.metric = parse_length_metric(eval_metric);
        if (!zone_map.empty()) eval.zone_map = ZoneMapping::parse(zone_map);
      } else if (*fuse_cmd) {
        for (const auto& d : annotator_dirs) fuse.annotator_dirs.emplace_back(d);
        if (threshold != "auto") fuse.params.threshold = std::stoi(threshold);
        fuse.params.metric = parse_length_metric(fuse_metric);
        if (!predictions.empty()) fuse.predictions_dir = predictions;
      } else if (*compare_cmd) {
        for (const auto& r : reports) compare.reports.emplace_back(r);
        if (!grouping.empty()) compare.grouping = grouping;
        compare.test = parse_test_kind(test);
        compare.alternative = stats::parse_alternative(alternative);
        compare.metric = parse_compare_metric(compare_metric);
        if (bonferroni_m > 0) compare.bonferroni_m = bonferroni_m;
      } else if (*synth_cmd) {
        synth.params.sinusoid = parse_boundary(boundary);
        if (*shift_opt) synth.output.prediction_shift_px = shift;
      } else if (*report_cmd) {
        report.format = parse_table_format(format);
        if (report.group_by != "table") parse_group_by(report.group_by);
      }
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    } catch (const std::out_of_range& e) {
      std::cerr << "error: value out of range\n";
      return 1;
    }

    if (*evaluate) {
      const EvalReport r = cmd_evaluate(eval);
      std::cout << "mde_m: " << format_mde(r.mde_m) << "  no_front_count: " << r.no_front_count
                << "  scenes: " << r.scenes.size() << '\n';
    } else if (*fuse_cmd) {
      const FuseResult r = cmd_fuse(fuse);
      for (const auto& w : r.leak_warnings) std::cerr << "warning: " << w << '\n';
      for (std::size_t k = 0; k < r.leave_one_out.size(); ++k) {
        std::cout << '#' << k + 1 << ' ' << r.leave_one_out[k].label << ": "
                  << format_mde(r.leave_one_out[k].report.mde_m) << '\n';
      }
      if (r.predictions) std::cout << "predictions: " << format_mde(r.predictions->report.mde_m) << '\n';
    } else if (*compare_cmd) {
      const auto rows = cmd_compare(compare);
      if (compare.out.empty()) std::cout << render_compare_csv(rows);
    } else if (*synth_cmd) {
      cmd_synth(synth);
    } else if (*report_cmd) {
      std::cout << cmd_report(report);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
