#include "calfront/geodata.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <fstream>

using namespace calfront;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("zone mask default mapping") {
  Gray8 img(2, 2);
  img << 0, 64, 127, 254;
  const ZoneMask z = zone_mask_from_gray(img);
  CHECK(z(0, 0) == ZoneClass::NA);
  CHECK(z(0, 1) == ZoneClass::Rock);
  CHECK(z(1, 0) == ZoneClass::Glacier);
  CHECK(z(1, 1) == ZoneClass::Ocean);
}

TEST_CASE("unmapped zone value is rejected with its position") {
  Gray8 img(1, 1);
  img << 13;
  const std::string msg = error_of([&] { zone_mask_from_gray(img); });
  CHECK(msg.find("unknown zone value 13 at (0,0)") != std::string::npos);
}

TEST_CASE("zone mapping parsing") {
  const ZoneMapping m = ZoneMapping::parse("ocean=255,rock=100");
  CHECK(m.gray_of(ZoneClass::Ocean) == 255);
  CHECK(m.gray_of(ZoneClass::Rock) == 100);
  CHECK(m.gray_of(ZoneClass::NA) == 0);
  CHECK(m.class_of(255) == ZoneClass::Ocean);
  CHECK_FALSE(m.class_of(254).has_value());
  CHECK_THROWS_AS(ZoneMapping::parse("ocean=0"), ParseError);  // collides with NA
  CHECK_THROWS_AS(ZoneMapping::parse("lava=3"), ParseError);
  CHECK_THROWS_AS(ZoneMapping::parse("ocean=300"), ParseError);
}

TEST_CASE("zone mask round trip on random masks") {
  testing_support::TempDir dir("zones");
  std::mt19937_64 rng(7);
  const ZoneMapping custom = ZoneMapping::parse("na=10,rock=20,glacier=30,ocean=40");
  for (int trial = 0; trial < 50; ++trial) {
    const Index rows = oracle::uniform(rng, 1, 32), cols = oracle::uniform(rng, 1, 32);
    ZoneMask z(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) z.set(r, c, static_cast<ZoneClass>(rng() % 4));
    const auto& mapping = trial % 2 ? custom : ZoneMapping{};
    write_zone_mask(dir / "z.png", z, mapping);
    const ZoneMask back = load_zone_mask(dir / "z.png", mapping);
    REQUIRE(back == z);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) CHECK(static_cast<int>(back(r, c)) < 4);
  }
}

TEST_CASE("front mask loading") {
  testing_support::TempDir dir("fronts");
  SUBCASE("all-zero raster is empty") {
    write_gray_png(dir / "f.png", Gray8::Zero(4, 4));
    CHECK_FALSE(load_front_mask(dir / "f.png").any());
  }
  SUBCASE("single pixel above threshold") {
    Gray8 img = Gray8::Zero(4, 4);
    img(1, 2) = 255;
    img(3, 3) = 127;  // below the default threshold
    write_gray_png(dir / "f.png", img);
    const auto px = pixels_of(load_front_mask(dir / "f.png"));
    REQUIRE(px.size() == 1);
    CHECK(px[0] == Pixel{1, 2});
    CHECK(load_front_mask(dir / "f.png", 127).count() == 2);
  }
  SUBCASE("round trip on random masks") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const BinaryGrid g = oracle::random_grid(rng, oracle::uniform(rng, 1, 40), oracle::uniform(rng, 1, 40), 30);
      write_front_mask(dir / "f.png", g);
      const BinaryGrid back = load_front_mask(dir / "f.png");
      REQUIRE(same_shape(back, g));
      CHECK((back == g).all());
      for (const auto& p : pixels_of(back)) CHECK(in_bounds(back.rows(), back.cols(), p.row, p.col));
    }
  }
}

TEST_CASE("png errors surface as IoError") {
  testing_support::TempDir dir("badpng");
  CHECK_THROWS_AS(read_gray_png(dir / "missing.png"), IoError);
  write_text(dir / "junk.png", "not a png at all");
  CHECK_THROWS_AS(read_gray_png(dir / "junk.png"), IoError);
}

TEST_CASE("bounding box parsing") {
  const BoundingBox full = parse_bbox("0 0 9 9");
  CHECK(full == BoundingBox::full_frame(10, 10));
  CHECK_NOTHROW(full.check_fits(10, 10));
  CHECK_THROWS(full.check_fits(9, 10));
  CHECK(error_of([] { parse_bbox("3 1 2 5"); }) == "x_min exceeds x_max");
  CHECK(error_of([] { parse_bbox("0 0 9"); }) == "expected 4 integers, got 3");
  CHECK_THROWS_AS(parse_bbox("0 0 9 x"), ParseError);
  CHECK_THROWS_AS(parse_bbox("0 5 9 4"), ParseError);
  CHECK(parse_bbox("  1\t2 3\n4\n") == BoundingBox{1, 2, 3, 4});

  testing_support::TempDir dir("bbox");
  const BoundingBox b{2, 3, 7, 11};
  write_bbox(dir / "b.txt", b);
  CHECK(load_bbox(dir / "b.txt") == b);
}

TEST_CASE("manifest parsing") {
  const std::string header = "id,glacier,sensor,date,season,resolution_m\n";
  SUBCASE("single row") {
    const Manifest m = parse_manifest(header + "s1,Mapple,TSX,2012-03-04,winter,7\n");
    REQUIRE(m.size() == 1);
    const SceneMeta& s = m.at("s1");
    CHECK(s.glacier == "Mapple");
    CHECK(s.sensor == Sensor::TSX_TDX);
    CHECK(s.season == Season::Winter);
    CHECK(s.date == Date{2012, 3, 4});
    CHECK(s.resolution_m == 7.0);
  }
  SUBCASE("duplicate id") {
    const std::string msg = error_of([&] {
      parse_manifest(header + "a,Mapple,S1,2019-01-01,summer,20\na,Mapple,S1,2019-01-02,summer,20\n");
    });
    CHECK(msg.find("duplicate id") != std::string::npos);
  }
  SUBCASE("invalid values") {
    CHECK_THROWS_AS(parse_manifest(header + "a,Mapple,S1,2019-01-01,summer,-7\n"), ParseError);
    CHECK_THROWS_AS(parse_manifest(header + "a,Mapple,S2,2019-01-01,summer,7\n"), ParseError);
    CHECK_THROWS_AS(parse_manifest(header + "a,Mapple,S1,2019-01-01,autumn,7\n"), ParseError);
    CHECK_THROWS_AS(parse_manifest(header + "a,Mapple,S1,2019-13-01,summer,7\n"), ParseError);
    CHECK_THROWS_AS(parse_manifest("id,glacier\na,b\n"), ParseError);
  }
  SUBCASE("every sensor token round-trips") {
    for (Sensor s : {Sensor::ERS, Sensor::Envisat, Sensor::RADARSAT, Sensor::PALSAR, Sensor::TSX_TDX, Sensor::S1}) {
      CHECK(parse_sensor(to_string(s)) == s);
    }
  }
  SUBCASE("write then load") {
    testing_support::TempDir dir("manifest");
    Manifest m = parse_manifest(header + "b,Columbia,ERS,1995-07-01,summer,17.5\na,Mapple,S1,2019-01-01,winter,20\n");
    write_manifest(dir / "m.csv", m);
    const Manifest back = load_manifest(dir / "m.csv");
    REQUIRE(back.size() == m.size());
    for (const auto& [id, s] : m) {
      const SceneMeta& t = back.at(id);
      CHECK(t.glacier == s.glacier);
      CHECK(t.sensor == s.sensor);
      CHECK(t.season == s.season);
      CHECK(t.date == s.date);
      CHECK(t.resolution_m == s.resolution_m);
    }
  }
}
