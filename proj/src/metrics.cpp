#include "calfront/metrics.hpp"

#include "calfront/morph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace calfront {
namespace {

// Sum over the set pixels of `at` of the distance to the nearest set pixel of `to`.
double directed_sum(const BinaryGrid& at, const BinaryGrid& to) {
  const RealGrid d = distance_transform(to);
  return at.select(d, 0.0).sum();
}

}  // namespace

ScenePairResult pair_distance_terms(const FrontMask& truth, const FrontMask& pred,
                                    double resolution_m, std::string id) {
  require_same_shape(truth, pred, "pair_distance_terms");
  if (!(resolution_m > 0.0) || !std::isfinite(resolution_m)) {
    throw std::invalid_argument("resolution_m must be a finite value > 0");
  }
  ScenePairResult r;
  r.id = std::move(id);
  r.truth_px = truth.count();
  r.pred_px = pred.count();
  if (r.truth_px == 0) {
    throw std::invalid_argument("ground truth front missing" + (r.id.empty() ? "" : " for " + r.id));
  }
  if (r.pred_px == 0) {
    r.predicted_empty = true;
    return r;
  }
  r.numerator_m = resolution_m * (directed_sum(truth, pred) + directed_sum(pred, truth));
  r.weight = r.truth_px + r.pred_px;
  return r;
}

EvalReport mde(std::vector<ScenePairResult> results) {
  EvalReport report;
  double numerator = 0.0;
  Index weight = 0;
  for (const auto& s : results) {
    if (s.predicted_empty) {
      ++report.no_front_count;
      continue;
    }
    numerator += s.numerator_m;
    weight += s.weight;
  }
  if (weight > 0) report.mde_m = numerator / static_cast<double>(weight);
  report.scenes = std::move(results);
  return report;
}

GroupBy parse_group_by(std::string_view token) {
  if (token == "all") return GroupBy::All;
  if (token == "season") return GroupBy::Season;
  if (token == "glacier") return GroupBy::Glacier;
  if (token == "sensor") return GroupBy::Sensor;
  if (token == "resolution") return GroupBy::Resolution;
  throw std::invalid_argument("unknown group key '" + std::string(token) + "'");
}

std::string_view to_string(GroupBy g) {
  switch (g) {
    case GroupBy::All: return "all";
    case GroupBy::Season: return "season";
    case GroupBy::Glacier: return "glacier";
    case GroupBy::Sensor: return "sensor";
    case GroupBy::Resolution: return "resolution";
  }
  return "?";
}

std::string resolution_label(double resolution_m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", resolution_m);
  return buf;
}

std::string group_key(const SceneMeta& meta, GroupBy group_by) {
  switch (group_by) {
    case GroupBy::All: return "All";
    case GroupBy::Season: return std::string(to_string(meta.season));
    case GroupBy::Glacier: return meta.glacier;
    case GroupBy::Sensor: return std::string(to_string(meta.sensor));
    case GroupBy::Resolution: return resolution_label(meta.resolution_m);
  }
  return {};
}

std::vector<SubsetRow> subset_report(const EvalReport& report, const Manifest& manifest,
                                     GroupBy group_by) {
  // Sort key per group so that the table order is stable and meaningful.
  struct Bucket {
    double order_num = 0.0;
    std::string order_str;
    std::vector<ScenePairResult> scenes;
  };
  std::map<std::string, Bucket> buckets;
  for (const auto& s : report.scenes) {
    const auto it = manifest.find(s.id);
    if (it == manifest.end()) throw std::invalid_argument("scene '" + s.id + "' not in manifest");
    const SceneMeta& m = it->second;
    const std::string key = group_key(m, group_by);
    Bucket& b = buckets[key];
    switch (group_by) {
      case GroupBy::Season: b.order_num = static_cast<double>(m.season); break;
      case GroupBy::Sensor: b.order_num = static_cast<double>(m.sensor); break;
      case GroupBy::Resolution: b.order_num = -m.resolution_m; break;
      default: b.order_str = key; break;
    }
    b.scenes.push_back(s);
  }

  std::vector<std::pair<std::string, Bucket*>> ordered;
  for (auto& [k, b] : buckets) ordered.emplace_back(k, &b);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.second->order_num != b.second->order_num) return a.second->order_num < b.second->order_num;
    return a.second->order_str < b.second->order_str;
  });

  std::vector<SubsetRow> rows;
  for (auto& [key, bucket] : ordered) {
    const Index n = static_cast<Index>(bucket->scenes.size());
    const EvalReport sub = mde(std::move(bucket->scenes));
    rows.push_back({key, sub.mde_m, sub.no_front_count, n});
  }
  if (rows.empty() && group_by == GroupBy::All) rows.push_back({"All", std::nullopt, 0, 0});
  return rows;
}

}  // namespace calfront
