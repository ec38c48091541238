#pragma once

// Batch front-end behind the calfront tool. Each command takes a fully
// resolved configuration; argument parsing lives in tools/.

#include "calfront/frontops.hpp"
#include "calfront/fusion.hpp"
#include "calfront/report.hpp"
#include "calfront/stats.hpp"
#include "calfront/synth.hpp"

#include <filesystem>
#include <iosfwd>

namespace calfront::cli {

namespace fs = std::filesystem;

/// Missing or corrupt input. Maps to exit code 2; scientific outcomes never do.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Zones, Front };
Mode parse_mode(std::string_view token);
LengthMetric parse_length_metric(std::string_view token);

struct EvaluateConfig {
  fs::path pred_dir;
  fs::path truth_dir;
  fs::path bbox_dir;
  fs::path manifest;
  Mode mode = Mode::Zones;
  double min_front_m = 750.0;
  LengthMetric metric = LengthMetric::PixelCount;
  ZoneMapping zone_map;
  std::uint8_t front_threshold = 128;
  unsigned jobs = 1;
  fs::path out;              // report JSON
  bool write_subsets = true;  // <out stem>_<group>.csv next to the report
};

EvalReport cmd_evaluate(const EvaluateConfig& config);

struct FuseConfig {
  std::vector<fs::path> annotator_dirs;  // a single parent dir expands to its annotator_<k>/ children
  fs::path catchments_dir;
  fs::path seeds_csv;
  fs::path manifest;
  std::optional<fs::path> predictions_dir;
  VoteParams params;
  unsigned jobs = 1;
  fs::path out;
};

struct FuseResult {
  std::vector<AnnotatorScore> leave_one_out;
  std::optional<AnnotatorScore> predictions;
  std::vector<std::string> leak_warnings;
};

/// Writes aggregate/<scene>.png, leave_one_out.csv and leave_one_out.md.
FuseResult cmd_fuse(const FuseConfig& config);

/// Expands `dirs` and loads every annotator's fronts for the manifest scenes.
AnnotatorSet load_annotators(const std::vector<fs::path>& dirs, const Manifest& manifest);

struct SeedRow {
  Pixel ocean;
  std::optional<Pixel> land;
};
/// CSV `scene_id,row,col` with optional `land_row,land_col` columns.
std::map<std::string, SeedRow> load_seeds(const fs::path& path);

enum class TestKind { KruskalWallis, MannWhitney, Kendall, CohensD };
TestKind parse_test_kind(std::string_view token);
enum class CompareMetric { Mde, NoFront };
CompareMetric parse_compare_metric(std::string_view token);

struct CompareConfig {
  std::vector<fs::path> reports;
  std::optional<fs::path> grouping;  // CSV report,group[,covariate]
  TestKind test = TestKind::MannWhitney;
  stats::Alternative alternative = stats::Alternative::Less;
  std::optional<int> bonferroni_m;  // default: number of comparisons
  CompareMetric metric = CompareMetric::Mde;
  double alpha = 0.05;
  fs::path out;
};

struct CompareRow {
  std::string test;
  std::string group_x;
  std::string group_y;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  stats::StatResult result;
  std::optional<double> effect_size;
  double alpha = 0.05;
  int bonferroni_m = 1;
  double alpha_adjusted = 0.05;
  double p_adjusted = 1.0;
};

std::vector<CompareRow> cmd_compare(const CompareConfig& config);
std::string render_compare_csv(const std::vector<CompareRow>& rows);

struct SynthConfig {
  SynthParams params;
  SynthOutput output;
  fs::path out;
};

void cmd_synth(const SynthConfig& config);

struct ReportConfig {
  fs::path in;
  fs::path manifest;
  std::string group_by = "all";  // all|season|glacier|sensor|resolution|table
  TableFormat format = TableFormat::Csv;
};

std::string cmd_report(const ReportConfig& config);

}  // namespace calfront::cli
