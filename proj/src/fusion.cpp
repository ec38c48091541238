#include "calfront/fusion.hpp"

#include "calfront/parallel.hpp"

#include <deque>
#include <set>
#include <stdexcept>

namespace calfront {
namespace {

std::string pixel_str(Pixel p) {
  return "(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")";
}

const FrontMask& scene_front(const Annotator& a, const std::string& scene) {
  const auto it = a.fronts.find(scene);
  if (it == a.fronts.end()) {
    throw std::invalid_argument("annotator '" + a.id + "' has no front for scene '" + scene + "'");
  }
  return it->second;
}

const SceneFusionInput& scene_input(const SceneInputs& inputs, const std::string& scene) {
  const auto it = inputs.find(scene);
  if (it == inputs.end()) throw std::invalid_argument("no catchment/seed for scene '" + scene + "'");
  return it->second;
}

}  // namespace

void AnnotatorSet::validate() const {
  std::set<std::string> ids;
  for (const auto& a : annotators) {
    if (!ids.insert(a.id).second) throw std::invalid_argument("duplicate annotator id '" + a.id + "'");
  }
}

int default_vote_threshold(std::size_t voters) {
  return static_cast<int>((voters + 1) / 2);
}

OceanFlood ocean_mask_from_front(const FrontMask& front, const CatchmentMask& catchment,
                                 Pixel seed, std::optional<Pixel> land_sentinel) {
  require_same_shape(front, catchment, "ocean_mask_from_front");
  const Index rows = front.rows(), cols = front.cols();
  if (!in_bounds(rows, cols, seed.row, seed.col)) {
    throw std::invalid_argument("ocean seed " + pixel_str(seed) + " outside the raster");
  }
  if (front(seed.row, seed.col)) throw std::invalid_argument("ocean seed " + pixel_str(seed) + " lies on the front");
  if (catchment(seed.row, seed.col)) {
    throw std::invalid_argument("ocean seed " + pixel_str(seed) + " lies inside the catchment");
  }

  const BinaryGrid barrier = front || catchment;
  OceanFlood flood{empty_grid(rows, cols), false};
  std::deque<Pixel> queue{seed};
  flood.ocean(seed.row, seed.col) = true;
  while (!queue.empty()) {
    const Pixel p = queue.front();
    queue.pop_front();
    constexpr int kDr[] = {-1, 0, 0, 1};
    constexpr int kDc[] = {0, -1, 1, 0};
    for (int k = 0; k < 4; ++k) {
      const Index r = p.row + kDr[k], c = p.col + kDc[k];
      if (!in_bounds(rows, cols, r, c) || barrier(r, c) || flood.ocean(r, c)) continue;
      flood.ocean(r, c) = true;
      queue.push_back({r, c});
    }
  }
  if (land_sentinel && in_bounds(rows, cols, land_sentinel->row, land_sentinel->col)) {
    flood.leaked = flood.ocean(land_sentinel->row, land_sentinel->col);
  }
  return flood;
}

BinaryGrid closed_ocean(const FrontMask& front, const OceanFlood& flood) {
  return flood.ocean || (front && dilate(flood.ocean, StructuringElement::square(3)));
}

BinaryGrid majority_vote(const std::vector<BinaryGrid>& oceans, int threshold) {
  if (oceans.empty()) throw std::invalid_argument("majority vote needs at least one mask");
  if (threshold < 1 || static_cast<std::size_t>(threshold) > oceans.size()) {
    throw std::invalid_argument("vote threshold " + std::to_string(threshold) +
                                " outside [1, " + std::to_string(oceans.size()) + "]");
  }
  Grid<int> votes = Grid<int>::Zero(oceans.front().rows(), oceans.front().cols());
  for (const auto& o : oceans) {
    require_same_shape(oceans.front(), o, "majority_vote");
    votes += o.cast<int>();
  }
  return votes >= threshold;
}

BinaryGrid coastline_from_ocean(const BinaryGrid& ocean, const StructuringElement& se,
                                Border border) {
  return ocean && !erode(ocean, se, border);
}

FrontMask postprocess_annotation(const FrontMask& front, const SceneFusionInput& scene,
                                 const VoteParams& params) {
  const FrontMask outside = apply_catchment(front, scene.catchment, params.buffer_m, scene.resolution_m);
  return filter_short_fronts(outside, {params.metric, params.min_front_m}, scene.resolution_m);
}

AggregateResult aggregate_front(const std::vector<const FrontMask*>& annotations,
                                const SceneFusionInput& scene, const VoteParams& params) {
  if (annotations.empty()) throw std::invalid_argument("aggregate_front needs at least one annotation");
  AggregateResult result;
  std::vector<BinaryGrid> oceans;
  oceans.reserve(annotations.size());
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const FrontMask& front = *annotations[i];
    const OceanFlood flood = ocean_mask_from_front(front, scene.catchment, scene.ocean_seed, scene.land_sentinel);
    if (flood.leaked) result.leaked.push_back(i);
    oceans.push_back(closed_ocean(front, flood));
  }
  const int threshold = params.threshold.value_or(default_vote_threshold(annotations.size()));
  const BinaryGrid ocean = majority_vote(oceans, threshold);
  const BinaryGrid coast =
      coastline_from_ocean(ocean, StructuringElement::square(params.erosion_side), params.coastline_border);
  result.front = postprocess_annotation(coast, scene, params);
  return result;
}

AggregateResult aggregate_front(const std::vector<FrontMask>& annotations,
                                const SceneFusionInput& scene, const VoteParams& params) {
  std::vector<const FrontMask*> ptrs;
  for (const auto& a : annotations) ptrs.push_back(&a);
  return aggregate_front(ptrs, scene, params);
}

std::vector<AnnotatorScore> leave_one_out(const AnnotatorSet& annotations,
                                          const Manifest& scenes, const SceneInputs& inputs,
                                          const VoteParams& params, unsigned jobs) {
  annotations.validate();
  const std::size_t n = annotations.count();
  if (n < 2) throw std::invalid_argument("leave-one-out needs at least 2 annotators");
  if (params.threshold && static_cast<std::size_t>(*params.threshold) > n - 1) {
    throw std::invalid_argument("vote threshold exceeds the number of remaining annotators");
  }

  std::vector<const SceneMeta*> metas;
  for (const auto& [id, meta] : scenes) metas.push_back(&meta);
  const std::size_t m = metas.size();

  std::vector<ScenePairResult> slots(n * m);
  parallel_for(n * m, jobs, [&](std::size_t k) {
    const std::size_t i = k / m;
    const SceneMeta& meta = *metas[k % m];
    SceneFusionInput scene = scene_input(inputs, meta.id);
    scene.resolution_m = meta.resolution_m;

    std::vector<const FrontMask*> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(&scene_front(annotations.annotators[j], meta.id));
    }
    const FrontMask consensus = aggregate_front(others, scene, params).front;
    const FrontMask own = postprocess_annotation(scene_front(annotations.annotators[i], meta.id), scene, params);
    slots[k] = pair_distance_terms(consensus, own, meta.resolution_m, meta.id);
  });

  std::vector<AnnotatorScore> scores;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<ScenePairResult> rows(slots.begin() + static_cast<std::ptrdiff_t>(i * m),
                                      slots.begin() + static_cast<std::ptrdiff_t>((i + 1) * m));
    scores.push_back({annotations.annotators[i].id, mde(std::move(rows))});
  }
  return scores;
}

std::map<std::string, FrontMask> consensus_fronts(const AnnotatorSet& annotations,
                                                  const Manifest& scenes,
                                                  const SceneInputs& inputs,
                                                  const VoteParams& params) {
  annotations.validate();
  std::map<std::string, FrontMask> out;
  for (const auto& [id, meta] : scenes) {
    SceneFusionInput scene = scene_input(inputs, id);
    scene.resolution_m = meta.resolution_m;
    std::vector<const FrontMask*> all;
    for (const auto& a : annotations.annotators) all.push_back(&scene_front(a, id));
    out.emplace(id, aggregate_front(all, scene, params).front);
  }
  return out;
}

AnnotatorScore score_against_consensus(const std::string& label,
                                       const std::map<std::string, FrontMask>& predictions,
                                       const AnnotatorSet& annotations, const Manifest& scenes,
                                       const SceneInputs& inputs, const VoteParams& params) {
  const auto consensus = consensus_fronts(annotations, scenes, inputs, params);
  std::vector<ScenePairResult> rows;
  for (const auto& [id, meta] : scenes) {
    const auto it = predictions.find(id);
    if (it == predictions.end()) throw std::invalid_argument("no prediction for scene '" + id + "'");
    SceneFusionInput scene = scene_input(inputs, id);
    scene.resolution_m = meta.resolution_m;
    rows.push_back(pair_distance_terms(consensus.at(id), postprocess_annotation(it->second, scene, params),
                                       meta.resolution_m, id));
  }
  return {label, mde(std::move(rows))};
}

}  // namespace calfront
