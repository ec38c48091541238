#include "calfront/metrics.hpp"
#include "calfront/report.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace calfront;

namespace {

ScenePairResult terms(std::string id, double numerator, Index weight) {
  ScenePairResult r;
  r.id = std::move(id);
  r.numerator_m = numerator;
  r.weight = weight;
  r.truth_px = weight / 2;
  r.pred_px = weight - weight / 2;
  return r;
}

ScenePairResult empty_prediction(std::string id) {
  ScenePairResult r;
  r.id = std::move(id);
  r.predicted_empty = true;
  r.truth_px = 4;
  return r;
}

SceneMeta meta(std::string id, std::string glacier, Sensor sensor, Season season, double res) {
  SceneMeta m;
  m.id = std::move(id);
  m.glacier = std::move(glacier);
  m.sensor = sensor;
  m.season = season;
  m.resolution_m = res;
  return m;
}

BinaryGrid random_nonempty(std::mt19937_64& rng, Index rows, Index cols) {
  BinaryGrid g = oracle::random_grid(rng, rows, cols, static_cast<int>(rng() % 10) + 1);
  if (!g.any()) g(oracle::uniform(rng, 0, rows - 1), oracle::uniform(rng, 0, cols - 1)) = true;
  return g;
}

}  // namespace

TEST_CASE("pair distance terms") {
  BinaryGrid p = empty_grid(4, 6), q = empty_grid(4, 6);
  p(0, 0) = true;
  q(0, 3) = true;
  const ScenePairResult r = pair_distance_terms(p, q, 10.0);
  CHECK(r.numerator_m == 60.0);
  CHECK(r.weight == 2);
  CHECK(r.mde_m() == 30.0);

  const ScenePairResult same = pair_distance_terms(p, p, 10.0);
  CHECK(same.numerator_m == 0.0);
  CHECK(same.mde_m() == 0.0);

  const ScenePairResult none = pair_distance_terms(p, empty_grid(4, 6), 10.0);
  CHECK(none.predicted_empty);
  CHECK_FALSE(none.mde_m().has_value());

  CHECK_THROWS_WITH(pair_distance_terms(empty_grid(4, 6), q, 10.0), "ground truth front missing");
  CHECK_THROWS(pair_distance_terms(p, empty_grid(5, 6), 10.0));
}

TEST_CASE("pair distance terms against the brute-force oracle") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const Index rows = oracle::uniform(rng, 1, 64), cols = oracle::uniform(rng, 1, 64);
    const BinaryGrid p = random_nonempty(rng, rows, cols), q = random_nonempty(rng, rows, cols);
    const double res = 1.0 + static_cast<double>(rng() % 30);
    const ScenePairResult r = pair_distance_terms(p, q, res);
    const auto ref = oracle::pair_terms(p, q, res);
    CHECK(r.weight == ref.weight);
    CHECK(r.truth_px + r.pred_px == r.weight);
    CHECK(std::abs(r.numerator_m - ref.numerator_m) <= 1e-9 * std::max(1.0, ref.numerator_m));

    // Symmetry and scale equivariance.
    const ScenePairResult swapped = pair_distance_terms(q, p, res);
    CHECK(swapped.weight == r.weight);
    CHECK(std::abs(swapped.numerator_m - r.numerator_m) <= 1e-9 * std::max(1.0, r.numerator_m));
    CHECK(pair_distance_terms(p, q, 2.0 * res).numerator_m == doctest::Approx(2.0 * r.numerator_m).epsilon(1e-12));

    // Agreement with an average-symmetric-surface-distance formulation.
    CHECK(*r.mde_m() == doctest::Approx(res * oracle::assd(p, q)).epsilon(1e-9));

    // Identity of indiscernibles.
    CHECK((r.numerator_m == 0.0) == (p == q).all());
  }
}

TEST_CASE("global normalisation") {
  const EvalReport a = mde({terms("a", 60.0, 2), terms("b", 0.0, 2)});
  CHECK(a.mde_m == 15.0);
  const EvalReport b = mde({terms("a", 60.0, 2), terms("b", 0.0, 6)});
  CHECK(b.mde_m == 7.5);
  const EvalReport single = mde({terms("a", 60.0, 2)});
  CHECK(single.mde_m == 30.0);

  const EvalReport with_empty = mde({terms("a", 60.0, 2), empty_prediction("x"), terms("b", 0.0, 6)});
  CHECK(with_empty.mde_m == 7.5);
  CHECK(with_empty.no_front_count == 1);

  const EvalReport all_empty = mde({empty_prediction("x"), empty_prediction("y")});
  CHECK_FALSE(all_empty.mde_m.has_value());
  CHECK(all_empty.no_front_count == 2);

  // Order independence of the fold.
  std::mt19937_64 rng(73);
  std::vector<ScenePairResult> v;
  for (int i = 0; i < 30; ++i) v.push_back(terms(std::to_string(i), static_cast<double>(rng() % 1000) / 7.0, 1 + static_cast<Index>(rng() % 50)));
  const EvalReport forward = mde(v);
  std::reverse(v.begin(), v.end());
  CHECK(*mde(v).mde_m == doctest::Approx(*forward.mde_m).epsilon(1e-14));
}

TEST_CASE("subset reports") {
  Manifest m;
  m["s1"] = meta("s1", "Mapple", Sensor::S1, Season::Summer, 20.0);
  m["s2"] = meta("s2", "Columbia", Sensor::TSX_TDX, Season::Winter, 7.0);
  m["s3"] = meta("s3", "Mapple", Sensor::ERS, Season::Winter, 20.0);
  m["s4"] = meta("s4", "Columbia", Sensor::S1, Season::Summer, 17.0);
  const EvalReport report = mde({terms("s1", 40.0, 4), terms("s2", 10.0, 10), empty_prediction("s3"),
                                 terms("s4", 90.0, 3)});

  SUBCASE("all") {
    const auto rows = subset_report(report, m, GroupBy::All);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mde_m == report.mde_m);
    CHECK(rows[0].no_front_count == 1);
  }
  SUBCASE("restriction oracle") {
    for (GroupBy g : {GroupBy::Season, GroupBy::Glacier, GroupBy::Sensor, GroupBy::Resolution}) {
      for (const auto& row : subset_report(report, m, g)) {
        std::vector<ScenePairResult> restricted;
        for (const auto& s : report.scenes)
          if (group_key(m.at(s.id), g) == row.group) restricted.push_back(s);
        const EvalReport sub = mde(restricted);
        CHECK(row.mde_m == sub.mde_m);
        CHECK(row.no_front_count == sub.no_front_count);
        CHECK(row.scenes == static_cast<Index>(restricted.size()));
      }
    }
  }
  SUBCASE("ordering and labels") {
    const auto seasons = subset_report(report, m, GroupBy::Season);
    REQUIRE(seasons.size() == 2);
    CHECK(seasons[0].group == "summer");
    CHECK(seasons[1].group == "winter");
    const auto res = subset_report(report, m, GroupBy::Resolution);
    REQUIRE(res.size() == 3);
    CHECK(res[0].group == "20");
    CHECK(res[1].group == "17");
    CHECK(res[2].group == "7");
    const auto sensors = subset_report(report, m, GroupBy::Sensor);
    REQUIRE(sensors.size() == 3);
    CHECK(sensors[0].group == "ERS");
    CHECK(sensors[1].group == "TSX");
    CHECK(sensors[2].group == "S1");
    CHECK_FALSE(sensors[0].mde_m.has_value());  // only an empty prediction
    CHECK(resolution_label(7.5) == "7.5");
  }
  SUBCASE("unknown scene") {
    Manifest partial = m;
    partial.erase("s4");
    CHECK_THROWS(subset_report(report, partial, GroupBy::Season));
  }
}

TEST_CASE("report serialisation") {
  const EvalReport report = mde({terms("a", 60.0, 2), empty_prediction("x"), terms("b", 1.0 / 3.0, 6)});
  const std::string text = dump_report(report);
  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["no_front_count"] == 1);
  CHECK(j["scenes"][1]["mde_m"].is_null());
  CHECK(j["scenes"][0]["mde_m"] == 30.0);

  const EvalReport back = report_from_json(j);
  CHECK(dump_report(back) == text);
  CHECK(back.mde_m == report.mde_m);

  nlohmann::json future = j;
  future["schema_version"] = kReportSchemaVersion + 1;
  CHECK_THROWS_AS(report_from_json(future), ParseError);
  CHECK_THROWS_AS(report_from_json(nlohmann::json::array()), ParseError);

  testing_support::TempDir dir("report");
  save_report(dir / "r.json", report);
  CHECK(dump_report(load_report(dir / "r.json")) == text);
  CHECK_THROWS_AS(load_report(dir / "missing.json"), IoError);
}

TEST_CASE("table rendering") {
  Manifest m;
  m["s1"] = meta("s1", "Mapple", Sensor::S1, Season::Summer, 20.0);
  m["s2"] = meta("s2", "Columbia", Sensor::S1, Season::Winter, 20.0);
  const EvalReport r1 = mde({terms("s1", 40.0, 4), empty_prediction("s2")});
  const EvalReport r2 = mde({terms("s1", 20.0, 4), terms("s2", 30.0, 2)});

  CHECK(format_mde(std::nullopt) == "/");
  CHECK(format_mde(12.345) == "12.35");

  const std::string csv = render_subset_table(subset_report(r1, m, GroupBy::Season), TableFormat::Csv);
  CHECK(csv == "group,mde_m,no_front_count,scenes\nsummer,10.00,0,1\nwinter,/,1,1\n");

  const std::string wide = render_wide_table({{"#1", r1}, {"#2", r2}}, m, TableFormat::Csv, true);
  CHECK(wide ==
        ",All,summer,winter,Columbia,Mapple,S1,20,no_front\n"
        "#1,10.00,10.00,/,/,10.00,10.00,10.00,1\n"
        "#2,8.33,5.00,15.00,15.00,5.00,8.33,8.33,0\n"
        "Mean,9.17,7.50,15.00,15.00,7.50,9.17,9.17,0.50\n");

  const std::string md = render_wide_table({{"#1", r1}}, m, TableFormat::Markdown, false);
  CHECK(md.find("| #1 ") != std::string::npos);
  CHECK(md.find("---:") != std::string::npos);
}
