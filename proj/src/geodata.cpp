#include "calfront/geodata.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace calfront {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
}

}  // namespace

std::string_view to_string(ZoneClass z) {
  switch (z) {
    case ZoneClass::NA: return "NA";
    case ZoneClass::Rock: return "rock";
    case ZoneClass::Glacier: return "glacier";
    case ZoneClass::Ocean: return "ocean";
  }
  return "?";
}

std::optional<ZoneClass> ZoneMapping::class_of(std::uint8_t value) const {
  for (std::size_t i = 0; i < gray.size(); ++i) {
    if (gray[i] == value) return static_cast<ZoneClass>(i);
  }
  return std::nullopt;
}

ZoneMapping ZoneMapping::parse(std::string_view spec) {
  ZoneMapping m;
  for (std::string_view item : split(spec, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("zone mapping entry without '=': " + std::string(item));
    const std::string key = lower(trim(item.substr(0, eq)));
    const auto value = parse_number<int>(item.substr(eq + 1));
    if (!value || *value < 0 || *value > 255) {
      throw ParseError("zone mapping value for '" + key + "' must be in [0,255]");
    }
    std::size_t slot;
    if (key == "na") slot = 0;
    else if (key == "rock") slot = 1;
    else if (key == "glacier") slot = 2;
    else if (key == "ocean") slot = 3;
    else throw ParseError("unknown zone class '" + key + "'");
    m.gray[slot] = static_cast<std::uint8_t>(*value);
  }
  for (std::size_t i = 0; i < m.gray.size(); ++i) {
    for (std::size_t j = i + 1; j < m.gray.size(); ++j) {
      if (m.gray[i] == m.gray[j]) throw ParseError("zone mapping assigns one gray value to two classes");
    }
  }
  return m;
}

ZoneMask::ZoneMask(Index rows, Index cols, ZoneClass fill)
    : codes_(Grid<std::uint8_t>::Constant(rows, cols, static_cast<std::uint8_t>(fill))) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("zone mask must be at least 1x1");
}

void BoundingBox::check_fits(Index rows, Index cols) const {
  if (x_min < 0 || y_min < 0 || x_max >= cols || y_max >= rows || x_min > x_max ||
      y_min > y_max) {
    throw std::invalid_argument("bounding box (" + std::to_string(x_min) + " " +
                                std::to_string(y_min) + " " + std::to_string(x_max) + " " +
                                std::to_string(y_max) + ") does not fit a " +
                                std::to_string(cols) + "x" + std::to_string(rows) + " raster");
  }
}

std::string_view to_string(Sensor s) {
  switch (s) {
    case Sensor::ERS: return "ERS";
    case Sensor::Envisat: return "Envisat";
    case Sensor::RADARSAT: return "RADARSAT";
    case Sensor::PALSAR: return "PALSAR";
    case Sensor::TSX_TDX: return "TSX";
    case Sensor::S1: return "S1";
  }
  return "?";
}

std::string_view to_string(Season s) { return s == Season::Summer ? "summer" : "winter"; }

Sensor parse_sensor(std::string_view token) {
  token = trim(token);
  for (Sensor s : {Sensor::ERS, Sensor::Envisat, Sensor::RADARSAT, Sensor::PALSAR, Sensor::TSX_TDX,
                   Sensor::S1}) {
    if (token == to_string(s)) return s;
  }
  throw ParseError("unknown sensor '" + std::string(token) + "'");
}

Season parse_season(std::string_view token) {
  const std::string t = lower(trim(token));
  if (t == "summer") return Season::Summer;
  if (t == "winter") return Season::Winter;
  throw ParseError("unknown season '" + std::string(token) + "'");
}

Date Date::parse(std::string_view iso) {
  iso = trim(iso);
  const auto parts = split(iso, '-');
  if (parts.size() != 3 || parts[0].size() != 4 || parts[1].size() != 2 || parts[2].size() != 2) {
    throw ParseError("invalid ISO-8601 date '" + std::string(iso) + "'");
  }
  const auto y = parse_number<int>(parts[0]);
  const auto m = parse_number<int>(parts[1]);
  const auto d = parse_number<int>(parts[2]);
  if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31) {
    throw ParseError("invalid ISO-8601 date '" + std::string(iso) + "'");
  }
  return {*y, *m, *d};
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

ZoneMask zone_mask_from_gray(const Gray8& image, const ZoneMapping& mapping) {
  ZoneMask mask(image.rows(), image.cols());
  for (Index r = 0; r < image.rows(); ++r) {
    for (Index c = 0; c < image.cols(); ++c) {
      const auto cls = mapping.class_of(image(r, c));
      if (!cls) {
        throw ParseError("unknown zone value " + std::to_string(image(r, c)) + " at (" +
                         std::to_string(r) + "," + std::to_string(c) + ")");
      }
      mask.set(r, c, *cls);
    }
  }
  return mask;
}

ZoneMask load_zone_mask(const std::filesystem::path& path, const ZoneMapping& mapping) {
  const Gray8 image = read_gray_png(path);
  try {
    return zone_mask_from_gray(image, mapping);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_zone_mask(const std::filesystem::path& path, const ZoneMask& mask,
                     const ZoneMapping& mapping) {
  Gray8 image(mask.rows(), mask.cols());
  for (Index r = 0; r < mask.rows(); ++r) {
    for (Index c = 0; c < mask.cols(); ++c) image(r, c) = mapping.gray_of(mask(r, c));
  }
  write_gray_png(path, image);
}

FrontMask load_front_mask(const std::filesystem::path& path, std::uint8_t threshold) {
  return read_gray_png(path) >= threshold;
}

void write_front_mask(const std::filesystem::path& path, const FrontMask& mask) {
  write_gray_png(path, mask.select(Gray8::Constant(mask.rows(), mask.cols(), 255),
                                   Gray8::Zero(mask.rows(), mask.cols())));
}

BoundingBox parse_bbox(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  if (tokens.size() != 4) {
    throw ParseError("expected 4 integers, got " + std::to_string(tokens.size()));
  }
  std::array<Index, 4> v{};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto n = parse_number<long long>(tokens[k]);
    if (!n) throw ParseError("bounding box token '" + std::string(tokens[k]) + "' is not an integer");
    if (*n < 0) throw ParseError("bounding box coordinates must be non-negative");
    v[k] = static_cast<Index>(*n);
  }
  BoundingBox box{v[0], v[1], v[2], v[3]};
  if (box.x_min > box.x_max) throw ParseError("x_min exceeds x_max");
  if (box.y_min > box.y_max) throw ParseError("y_min exceeds y_max");
  return box;
}

BoundingBox load_bbox(const std::filesystem::path& path) {
  try {
    return parse_bbox(slurp(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_bbox(const std::filesystem::path& path, const BoundingBox& box) {
  write_text(path, std::to_string(box.x_min) + " " + std::to_string(box.y_min) + " " +
                       std::to_string(box.x_max) + " " + std::to_string(box.y_max) + "\n");
}

namespace {
constexpr std::string_view kManifestHeader = "id,glacier,sensor,date,season,resolution_m";
}

Manifest parse_manifest(std::string_view csv) {
  Manifest manifest;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (std::string_view line : split(csv, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (!header_seen) {
      if (trim(line) != kManifestHeader) {
        throw ParseError("manifest header must be '" + std::string(kManifestHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    const std::string where = "manifest line " + std::to_string(line_no) + ": ";
    if (fields.size() != 6) {
      throw ParseError(where + "expected 6 fields, got " + std::to_string(fields.size()));
    }
    SceneMeta meta;
    meta.id = std::string(trim(fields[0]));
    if (meta.id.empty()) throw ParseError(where + "empty id");
    meta.glacier = std::string(trim(fields[1]));
    try {
      meta.sensor = parse_sensor(fields[2]);
      meta.date = Date::parse(fields[3]);
      meta.season = parse_season(fields[4]);
    } catch (const ParseError& e) {
      throw ParseError(where + e.what());
    }
    const auto res = parse_number<double>(fields[5]);
    if (!res) throw ParseError(where + "resolution_m is not a number");
    if (!(*res > 0.0) || !std::isfinite(*res)) throw ParseError(where + "resolution_m must be > 0");
    meta.resolution_m = *res;
    if (!manifest.emplace(meta.id, meta).second) {
      throw ParseError(where + "duplicate id '" + meta.id + "'");
    }
  }
  if (!header_seen) throw ParseError("manifest is empty");
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(slurp(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ostringstream out;
  out << kManifestHeader << '\n';
  for (const auto& [id, m] : manifest) {
    char res[64];
    std::snprintf(res, sizeof res, "%.17g", m.resolution_m);
    out << m.id << ',' << m.glacier << ',' << to_string(m.sensor) << ',' << m.date.iso() << ','
        << to_string(m.season) << ',' << res << '\n';
  }
  write_text(path, out.str());
}

}  // namespace calfront
