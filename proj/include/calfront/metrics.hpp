#pragma once

// Mean Distance Error between predicted and reference calving fronts.
//
//   MDE = sum_images( sum_{p in P} min_q |p - q| + sum_{q in Q} min_p |p - q| )
//         / sum_images( |P| + |Q| )
//
// P are the reference front pixels of an image, Q the predicted ones. Images
// without a predicted front are left out of both sums and counted instead.
// Distances are taken between pixel centres and converted to metres per
// image before summation.

#include "calfront/geodata.hpp"

#include <optional>
#include <string>
#include <vector>

namespace calfront {

struct ScenePairResult {
  std::string id;
  double numerator_m = 0.0;  // both directed distance sums, metres
  Index weight = 0;          // |P| + |Q|; 0 when the prediction is empty
  bool predicted_empty = false;
  Index truth_px = 0;
  Index pred_px = 0;

  /// Per-image MDE, absent when nothing was predicted.
  std::optional<double> mde_m() const {
    if (predicted_empty || weight == 0) return std::nullopt;
    return numerator_m / static_cast<double>(weight);
  }
};

struct EvalReport {
  std::vector<ScenePairResult> scenes;
  std::optional<double> mde_m;  // absent when every prediction was empty
  Index no_front_count = 0;
};

/// Distance terms of one image pair. Throws when `truth` is empty.
ScenePairResult pair_distance_terms(const FrontMask& truth, const FrontMask& pred,
                                    double resolution_m, std::string id = {});

/// Globally normalised MDE over `results` (not the mean of per-image MDEs).
EvalReport mde(std::vector<ScenePairResult> results);

enum class GroupBy { All, Season, Glacier, Sensor, Resolution };

GroupBy parse_group_by(std::string_view token);
std::string_view to_string(GroupBy g);

struct SubsetRow {
  std::string group;
  std::optional<double> mde_m;
  Index no_front_count = 0;
  Index scenes = 0;
};

/// MDE recomputed within each group. Groups are ordered summer/winter for
/// seasons, by enumeration order for sensors, by descending resolution value
/// and alphabetically for glaciers.
std::vector<SubsetRow> subset_report(const EvalReport& report, const Manifest& manifest,
                                     GroupBy group_by);

/// Group label a scene falls into.
std::string group_key(const SceneMeta& meta, GroupBy group_by);

/// Resolution label, e.g. "20" for 20 m/px or "7.5" for 7.5 m/px.
std::string resolution_label(double resolution_m);

}  // namespace calfront
