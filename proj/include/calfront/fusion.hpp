#pragma once

// Multi-annotator fusion: each annotator's front is turned into an ocean mask,
// masks are combined by pixel-wise vote, and the coastline of the voted ocean
// outside the buffered catchment becomes the consensus front.

#include "calfront/frontops.hpp"
#include "calfront/metrics.hpp"

#include <map>

namespace calfront {

struct Annotator {
  std::string id;
  std::map<std::string, FrontMask> fronts;  // scene id -> front
};

/// Ordered annotators with unique ids.
struct AnnotatorSet {
  std::vector<Annotator> annotators;

  std::size_t count() const { return annotators.size(); }
  /// Throws on duplicate annotator ids.
  void validate() const;
};

/// Scene configuration needed to reconstruct ocean masks.
struct SceneFusionInput {
  CatchmentMask catchment;
  Pixel ocean_seed;
  std::optional<Pixel> land_sentinel;  // a glacier-side pixel; reaching it flags a leak
  double resolution_m = 1.0;
};

struct VoteParams {
  std::optional<int> threshold;  // absent: ceil(n / 2) for n voters
  int erosion_side = 3;          // Square(k) used for coastline extraction
  double buffer_m = 120.0;
  double min_front_m = 750.0;
  LengthMetric metric = LengthMetric::PixelCount;
  /// Pixels beyond the raster count as ocean during coastline erosion, so the
  /// image frame is not reported as coastline.
  Border coastline_border = Border::Foreground;
};

/// ceil(n / 2): 5 for both 9 and 10 voters.
int default_vote_threshold(std::size_t voters);

struct OceanFlood {
  BinaryGrid ocean;
  bool leaked = false;  // the flood reached the land sentinel
};

/// Pixels 4-reachable from `seed` without entering a front or catchment pixel.
OceanFlood ocean_mask_from_front(const FrontMask& front, const CatchmentMask& catchment,
                                 Pixel seed, std::optional<Pixel> land_sentinel = std::nullopt);

/// The flooded ocean plus the front pixels bordering it (8-adjacency): the
/// area enclosed by the annotated line, line included.
BinaryGrid closed_ocean(const FrontMask& front, const OceanFlood& flood);

BinaryGrid majority_vote(const std::vector<BinaryGrid>& oceans, int threshold);

/// ocean AND NOT erode(ocean, se).
BinaryGrid coastline_from_ocean(const BinaryGrid& ocean, const StructuringElement& se,
                                Border border = Border::Background);

/// Catchment buffering and short-front removal applied to single annotations
/// and to predictions before comparison with a consensus front.
FrontMask postprocess_annotation(const FrontMask& front, const SceneFusionInput& scene,
                                 const VoteParams& params);

struct AggregateResult {
  FrontMask front;
  std::vector<std::size_t> leaked;  // indices (into the input list) of leaking annotations
};

AggregateResult aggregate_front(const std::vector<const FrontMask*>& annotations,
                                const SceneFusionInput& scene, const VoteParams& params);
AggregateResult aggregate_front(const std::vector<FrontMask>& annotations,
                                const SceneFusionInput& scene, const VoteParams& params);

struct AnnotatorScore {
  std::string label;
  EvalReport report;
};

using SceneInputs = std::map<std::string, SceneFusionInput>;

/// For each annotator, scores its post-processed fronts against the consensus
/// of all other annotators. One score per annotator, in input order.
std::vector<AnnotatorScore> leave_one_out(const AnnotatorSet& annotations,
                                          const Manifest& scenes, const SceneInputs& inputs,
                                          const VoteParams& params, unsigned jobs = 1);

/// Scores post-processed predictions against the consensus of all annotators.
AnnotatorScore score_against_consensus(const std::string& label,
                                       const std::map<std::string, FrontMask>& predictions,
                                       const AnnotatorSet& annotations, const Manifest& scenes,
                                       const SceneInputs& inputs, const VoteParams& params);

/// Consensus front of all annotators per scene.
std::map<std::string, FrontMask> consensus_fronts(const AnnotatorSet& annotations,
                                                  const Manifest& scenes,
                                                  const SceneInputs& inputs,
                                                  const VoteParams& params);

}  // namespace calfront
