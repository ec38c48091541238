#pragma once

// Synthetic glacier scenes with analytically known calving fronts.
//
// Layout of a size x size scene: the top `rock_rows` rows are rock (and form
// the catchment); below them glacier occupies columns < x(r) and ocean the
// rest, where x(r) is either a constant column or a sinusoid around it. An
// optional NA square sits in the bottom-left corner, inside the glacier.

#include "calfront/geodata.hpp"

#include <cstdint>
#include <filesystem>

namespace calfront {

struct SinusoidBoundary {
  double amplitude_px = 8.0;
  double period_px = 64.0;
};

struct SynthParams {
  std::uint64_t seed = 42;
  Index size = 256;
  std::optional<SinusoidBoundary> sinusoid;  // absent: vertical boundary
  Index rock_rows = 16;
  bool na_corner = true;
  double resolution_m = 10.0;

  void validate() const;
};

/// Parses "vertical" or "sinusoid:A:P".
std::optional<SinusoidBoundary> parse_boundary(std::string_view token);

struct SynthScene {
  SceneMeta meta;
  ZoneMask zones;
  FrontMask front;  // ocean pixels 8-adjacent to glacier, built row by row
  CatchmentMask catchment;
  BoundingBox bbox;
  Pixel ocean_seed;
  Pixel land_sentinel;
};

/// Deterministic scene `index` of the dataset seeded by params.seed. The
/// boundary is displaced `shift_px` columns toward the ocean (negative: toward
/// the glacier).
SynthScene make_synth_scene(const SynthParams& params, std::size_t index, Index shift_px = 0);

/// Glacier/ocean boundary column for every row (entries above rock_rows unused).
std::vector<Index> boundary_columns(const SynthParams& params, std::size_t index, Index shift_px = 0);

struct SynthOutput {
  std::size_t scenes = 20;
  std::optional<Index> prediction_shift_px;  // writes pred_zones/ with the shifted boundary
  std::size_t annotators = 0;                // writes annotator_<k>/ fronts with jittered offsets
  Index annotator_max_offset_px = 2;
};

/// Writes manifest.csv, zones/, fronts/, bboxes/, catchments/, seeds.csv and
/// the optional prediction/annotator directories under `out_dir`.
void write_synth_dataset(const SynthParams& params, const SynthOutput& output,
                         const std::filesystem::path& out_dir);

/// Offset of annotator `k` on scene `index`, in [-max, max].
Index annotator_offset(std::uint64_t seed, std::size_t index, std::size_t k, Index max_offset);

}  // namespace calfront
