#include "calfront/synth.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace calfront {
namespace {

// splitmix64 finaliser; portable across standard libraries, unlike the
// std:: distributions.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t draw(std::uint64_t seed, std::size_t index, std::uint64_t salt) {
  return mix(mix(mix(seed) ^ static_cast<std::uint64_t>(index)) ^ salt);
}

Index na_side(const SynthParams& p) { return p.na_corner ? p.size / 8 : 0; }

constexpr const char* kGlaciers[] = {"Columbia", "Mapple"};
constexpr Sensor kSensors[] = {Sensor::ERS, Sensor::Envisat, Sensor::PALSAR, Sensor::TSX_TDX, Sensor::S1};

}  // namespace

void SynthParams::validate() const {
  if (size < 32) throw std::invalid_argument("synthetic scene size must be >= 32");
  if (rock_rows < 1 || rock_rows > size / 4) throw std::invalid_argument("rock_rows must be in [1, size/4]");
  if (!(resolution_m > 0.0)) throw std::invalid_argument("resolution_m must be > 0");
  if (sinusoid) {
    if (!(sinusoid->period_px > 0.0)) throw std::invalid_argument("sinusoid period must be > 0");
    if (!(sinusoid->amplitude_px >= 0.0) || sinusoid->amplitude_px >= static_cast<double>(size) / 2.0) {
      throw std::invalid_argument("sinusoid amplitude must be in [0, size/2)");
    }
  }
}

std::optional<SinusoidBoundary> parse_boundary(std::string_view token) {
  if (token == "vertical") return std::nullopt;
  constexpr std::string_view prefix = "sinusoid:";
  if (token.substr(0, prefix.size()) == prefix) {
    const std::string_view rest = token.substr(prefix.size());
    const auto colon = rest.find(':');
    if (colon != std::string_view::npos) {
      SinusoidBoundary s;
      const std::string_view a = rest.substr(0, colon), p = rest.substr(colon + 1);
      const auto ra = std::from_chars(a.data(), a.data() + a.size(), s.amplitude_px);
      const auto rp = std::from_chars(p.data(), p.data() + p.size(), s.period_px);
      if (ra.ec == std::errc{} && rp.ec == std::errc{} && ra.ptr == a.data() + a.size() &&
          rp.ptr == p.data() + p.size()) {
        return s;
      }
    }
  }
  throw std::invalid_argument("boundary must be 'vertical' or 'sinusoid:A:P', got '" + std::string(token) + "'");
}

std::vector<Index> boundary_columns(const SynthParams& params, std::size_t index, Index shift_px) {
  params.validate();
  const Index size = params.size;
  const Index base = size / 3 + static_cast<Index>(draw(params.seed, index, 1) % static_cast<std::uint64_t>(size / 3));
  const double phase = static_cast<double>(draw(params.seed, index, 2) % 3600) / 3600.0 * 2.0 * std::numbers::pi;
  const Index lo = na_side(params) + 2;
  const Index hi = size - 3;
  std::vector<Index> x(static_cast<std::size_t>(size), base);
  for (Index r = 0; r < size; ++r) {
    double col = static_cast<double>(base);
    if (params.sinusoid) {
      col += params.sinusoid->amplitude_px *
             std::sin(2.0 * std::numbers::pi * static_cast<double>(r) / params.sinusoid->period_px + phase);
    }
    x[static_cast<std::size_t>(r)] = std::clamp<Index>(static_cast<Index>(std::lround(col)) + shift_px, lo, hi);
  }
  return x;
}

SynthScene make_synth_scene(const SynthParams& params, std::size_t index, Index shift_px) {
  const Index size = params.size;
  const std::vector<Index> x = boundary_columns(params, index, shift_px);
  auto xb = [&](Index r) { return x[static_cast<std::size_t>(r)]; };

  SynthScene s;
  char id[32];
  std::snprintf(id, sizeof id, "scene_%03zu", index);
  s.meta.id = id;
  s.meta.glacier = kGlaciers[index % 2];
  s.meta.sensor = kSensors[(index / 2) % std::size(kSensors)];
  s.meta.season = index % 4 < 2 ? Season::Summer : Season::Winter;
  s.meta.date = {2000 + static_cast<int>(index), s.meta.season == Season::Summer ? 7 : 1, 15};
  s.meta.resolution_m = params.resolution_m;

  s.zones = ZoneMask(size, size, ZoneClass::Ocean);
  s.catchment = empty_grid(size, size);
  for (Index r = 0; r < size; ++r) {
    for (Index c = 0; c < size; ++c) {
      if (r < params.rock_rows) {
        s.zones.set(r, c, ZoneClass::Rock);
        s.catchment(r, c) = true;
      } else if (c < xb(r)) {
        s.zones.set(r, c, ZoneClass::Glacier);
      }
    }
  }
  const Index na = na_side(params);
  for (Index r = size - na; r < size; ++r)
    for (Index c = 0; c < na; ++c) s.zones.set(r, c, ZoneClass::NA);

  // Row r holds front pixels from x(r) up to the furthest glacier column of
  // the adjacent glacier rows, i.e. every ocean pixel with a glacier 8-neighbour.
  s.front = empty_grid(size, size);
  Index count = 0;
  for (Index r = params.rock_rows; r < size; ++r) {
    Index last = xb(r);
    if (r - 1 >= params.rock_rows) last = std::max(last, xb(r - 1));
    if (r + 1 < size) last = std::max(last, xb(r + 1));
    for (Index c = xb(r); c <= last; ++c) {
      s.front(r, c) = true;
      ++count;
    }
  }
  const Index glacier_rows = size - params.rock_rows;
  Index max_step = 0;
  for (Index r = params.rock_rows + 1; r < size; ++r) max_step = std::max(max_step, std::abs(xb(r) - xb(r - 1)));
  if (count < glacier_rows || count > glacier_rows * (1 + max_step)) {
    throw std::logic_error("synthetic front construction out of bounds");
  }

  s.bbox = BoundingBox::full_frame(size, size);
  s.ocean_seed = {size - 1, size - 1};
  s.land_sentinel = {params.rock_rows + glacier_rows / 2, 0};
  return s;
}

Index annotator_offset(std::uint64_t seed, std::size_t index, std::size_t k, Index max_offset) {
  if (max_offset <= 0) return 0;
  const auto span = static_cast<std::uint64_t>(2 * max_offset + 1);
  return static_cast<Index>(draw(seed, index, 1000 + k) % span) - max_offset;
}

void write_synth_dataset(const SynthParams& params, const SynthOutput& output,
                         const std::filesystem::path& out_dir) {
  params.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  Manifest manifest;
  std::ostringstream seeds;
  seeds << "scene_id,row,col,land_row,land_col\n";

  for (std::size_t i = 0; i < output.scenes; ++i) {
    const SynthScene s = make_synth_scene(params, i);
    const std::string file = s.meta.id + ".png";
    write_zone_mask(out_dir / "zones" / file, s.zones);
    write_front_mask(out_dir / "fronts" / file, s.front);
    write_front_mask(out_dir / "catchments" / file, s.catchment);
    write_bbox(out_dir / "bboxes" / (s.meta.id + ".txt"), s.bbox);
    seeds << s.meta.id << ',' << s.ocean_seed.row << ',' << s.ocean_seed.col << ','
          << s.land_sentinel.row << ',' << s.land_sentinel.col << '\n';
    manifest.emplace(s.meta.id, s.meta);

    if (output.prediction_shift_px) {
      write_zone_mask(out_dir / "pred_zones" / file, make_synth_scene(params, i, *output.prediction_shift_px).zones);
    }
    for (std::size_t k = 0; k < output.annotators; ++k) {
      const Index off = annotator_offset(params.seed, i, k, output.annotator_max_offset_px);
      write_front_mask(out_dir / ("annotator_" + std::to_string(k + 1)) / file, make_synth_scene(params, i, off).front);
    }
  }
  write_manifest(out_dir / "manifest.csv", manifest);
  std::ofstream f(out_dir / "seeds.csv", std::ios::binary);
  if (!f) throw IoError("cannot write seeds.csv");
  f << seeds.str();
}

}  // namespace calfront
