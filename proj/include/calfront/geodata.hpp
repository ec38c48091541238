#pragma once

// Raster and metadata ingestion: zone masks, front masks, bounding boxes,
// catchments and the scene manifest.

#include "calfront/grid.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace calfront {

enum class ZoneClass : std::uint8_t { NA = 0, Rock = 1, Glacier = 2, Ocean = 3 };

std::string_view to_string(ZoneClass z);

/// Gray value used for each zone class when reading and writing zone PNGs.
struct ZoneMapping {
  std::array<std::uint8_t, 4> gray{0, 64, 127, 254};  // indexed by ZoneClass

  std::uint8_t gray_of(ZoneClass z) const { return gray[static_cast<std::size_t>(z)]; }
  std::optional<ZoneClass> class_of(std::uint8_t value) const;

  /// Parses "na=0,rock=64,glacier=127,ocean=254"; unnamed classes keep defaults.
  static ZoneMapping parse(std::string_view spec);
};

/// Per-pixel landscape class grid.
class ZoneMask {
 public:
  ZoneMask() = default;
  ZoneMask(Index rows, Index cols, ZoneClass fill = ZoneClass::NA);

  Index rows() const { return codes_.rows(); }
  Index cols() const { return codes_.cols(); }

  ZoneClass operator()(Index r, Index c) const { return static_cast<ZoneClass>(codes_(r, c)); }
  void set(Index r, Index c, ZoneClass z) { codes_(r, c) = static_cast<std::uint8_t>(z); }

  /// Binary grid of pixels belonging to `z`.
  BinaryGrid mask_of(ZoneClass z) const { return codes_ == static_cast<std::uint8_t>(z); }

  const Grid<std::uint8_t>& codes() const { return codes_; }

  friend bool operator==(const ZoneMask& a, const ZoneMask& b) {
    return same_shape(a.codes_, b.codes_) && (a.codes_ == b.codes_).all();
  }

 private:
  Grid<std::uint8_t> codes_;
};

/// Inclusive pixel rectangle, origin top-left. x is the column axis.
struct BoundingBox {
  Index x_min = 0;
  Index y_min = 0;
  Index x_max = 0;
  Index y_max = 0;

  bool contains(Index row, Index col) const {
    return col >= x_min && col <= x_max && row >= y_min && row <= y_max;
  }
  /// Throws when the box does not lie inside a rows x cols raster.
  void check_fits(Index rows, Index cols) const;

  static BoundingBox full_frame(Index rows, Index cols) { return {0, 0, cols - 1, rows - 1}; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

enum class Sensor { ERS, Envisat, RADARSAT, PALSAR, TSX_TDX, S1 };
enum class Season { Summer, Winter };

std::string_view to_string(Sensor s);
std::string_view to_string(Season s);
Sensor parse_sensor(std::string_view token);
Season parse_season(std::string_view token);

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static Date parse(std::string_view iso);
  std::string iso() const;
  friend auto operator<=>(const Date&, const Date&) = default;
};

struct SceneMeta {
  std::string id;
  std::string glacier;
  Sensor sensor = Sensor::S1;
  Date date;
  Season season = Season::Summer;
  double resolution_m = 1.0;
};

/// Scenes keyed by id; iteration order is lexicographic by id.
using Manifest = std::map<std::string, SceneMeta>;

// 8-bit grayscale PNG access.
Gray8 read_gray_png(const std::filesystem::path& path);
void write_gray_png(const std::filesystem::path& path, const Gray8& image);

ZoneMask load_zone_mask(const std::filesystem::path& path, const ZoneMapping& mapping = {});
void write_zone_mask(const std::filesystem::path& path, const ZoneMask& mask,
                     const ZoneMapping& mapping = {});
ZoneMask zone_mask_from_gray(const Gray8& image, const ZoneMapping& mapping = {});

FrontMask load_front_mask(const std::filesystem::path& path, std::uint8_t threshold = 128);
/// Writes 255 for set pixels, 0 elsewhere.
void write_front_mask(const std::filesystem::path& path, const FrontMask& mask);

/// Catchments share the front-mask encoding.
inline CatchmentMask load_catchment(const std::filesystem::path& path,
                                    std::uint8_t threshold = 128) {
  return load_front_mask(path, threshold);
}

BoundingBox parse_bbox(std::string_view text);
BoundingBox load_bbox(const std::filesystem::path& path);
void write_bbox(const std::filesystem::path& path, const BoundingBox& box);

Manifest parse_manifest(std::string_view csv);
Manifest load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace calfront
