#include "satwealth/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <nlohmann/json.hpp>

namespace satwealth::raster {

using nlohmann::json;

void validate_resolution(int native_resolution_m) {
  require(native_resolution_m == 15 || native_resolution_m == 30 ||
              native_resolution_m == 60,
          Errc::bad_shape,
          "native resolution must be 15, 30 or 60 m, got " +
              std::to_string(native_resolution_m));
}

int RasterTile::find_band(int band_id) const {
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (bands[i].band_id == band_id) return static_cast<int>(i);
  }
  return -1;
}

void RasterTile::validate() const {
  require(bands.size() == pixels.size() && bands.size() == masks.size(),
          Errc::bad_shape, "band/pixel/mask list lengths differ");
  require(extent_m > 0.0, Errc::bad_shape, "non-positive extent");
  for (std::size_t b = 0; b < bands.size(); ++b) {
    validate_resolution(bands[b].native_resolution_m);
    const auto& g = pixels[b];
    const auto& m = masks[b];
    require(g.rows == g.cols, Errc::bad_shape, "band grid not square");
    require(g.rows == m.rows && g.cols == m.cols, Errc::bad_shape,
            "pixel and mask dims differ");
    double implied = static_cast<double>(g.rows) * bands[b].native_resolution_m;
    require(implied == extent_m, Errc::bad_shape,
            "grid side * resolution != extent for band " +
                std::to_string(bands[b].band_id));
    for (std::size_t i = 0; i < g.v.size(); ++i) {
      if (m.v[i] && !std::isfinite(g.v[i])) {
        raise(Errc::bad_shape, "non-finite pixel under valid mask in band " +
                                   std::to_string(bands[b].band_id));
      }
    }
  }
}

bool RasterTile::congruent_with(const RasterTile& o) const {
  if (origin_easting != o.origin_easting ||
      origin_northing != o.origin_northing || extent_m != o.extent_m ||
      bands.size() != o.bands.size()) {
    return false;
  }
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (!(bands[b] == o.bands[b])) return false;
    if (!pixels[b].same_dims(o.pixels[b])) return false;
  }
  return true;
}

RasterTile median_composite(const ObservationStack& stack) {
  require(!stack.tiles.empty(), Errc::empty_stack, "no observations");
  const RasterTile& first = stack.tiles.front();
  for (const auto& tile : stack.tiles) {
    require(tile.congruent_with(first), Errc::incongruent_tiles,
            "observation geometry or band layout differs");
  }

  RasterTile out;
  out.origin_easting = first.origin_easting;
  out.origin_northing = first.origin_northing;
  out.extent_m = first.extent_m;
  out.bands = first.bands;
  out.pixels.reserve(first.bands.size());
  out.masks.reserve(first.bands.size());

  std::vector<double> vals;
  vals.reserve(stack.tiles.size());
  for (std::size_t b = 0; b < first.bands.size(); ++b) {
    Grid2D grid(first.pixels[b].rows, first.pixels[b].cols);
    MaskGrid mask(first.masks[b].rows, first.masks[b].cols, 0);
    for (std::size_t i = 0; i < grid.v.size(); ++i) {
      vals.clear();
      for (const auto& tile : stack.tiles) {
        if (tile.masks[b].v[i]) vals.push_back(tile.pixels[b].v[i]);
      }
      if (vals.empty()) {
        grid.v[i] = 0.0;  // designated fill; mask stays false
        continue;
      }
      std::sort(vals.begin(), vals.end());
      std::size_t n = vals.size();
      grid.v[i] = (n % 2 == 1) ? vals[n / 2]
                               : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
      mask.v[i] = 1;
    }
    out.pixels.push_back(std::move(grid));
    out.masks.push_back(std::move(mask));
  }
  return out;
}

Grid2D nn_upsample(const Grid2D& band_grid, int factor) {
  require(factor == 1 || factor == 2 || factor == 4, Errc::invalid_factor,
          "upsample factor must be 1, 2 or 4, got " + std::to_string(factor));
  if (factor == 1) return band_grid;
  Grid2D out(band_grid.rows * factor, band_grid.cols * factor);
  for (int r = 0; r < out.rows; ++r) {
    const double* src = &band_grid.v[static_cast<std::size_t>(r / factor) *
                                     band_grid.cols];
    double* dst = &out.v[static_cast<std::size_t>(r) * out.cols];
    for (int c = 0; c < out.cols; ++c) dst[c] = src[c / factor];
  }
  return out;
}

std::array<Grid2D, 3> pan_sharpen(const std::array<Grid2D, 3>& rgb,
                                  const Grid2D& pan) {
  constexpr double kEps = 1e-12;
  for (const auto& g : rgb) {
    require(g.same_dims(rgb[0]), Errc::dimension_mismatch,
            "RGB band dims differ");
    require(pan.rows == 2 * g.rows && pan.cols == 2 * g.cols,
            Errc::dimension_mismatch, "pan grid must be 2x the RGB dims");
  }
  for (const auto& g : rgb) {
    for (double v : g.v) {
      require(v >= 0.0, Errc::negative_radiance, "negative RGB radiance");
    }
  }
  for (double v : pan.v) {
    require(v >= 0.0, Errc::negative_radiance, "negative pan radiance");
  }

  std::array<Grid2D, 3> up = {nn_upsample(rgb[0], 2), nn_upsample(rgb[1], 2),
                              nn_upsample(rgb[2], 2)};
  std::array<Grid2D, 3> out = {Grid2D(pan.rows, pan.cols),
                               Grid2D(pan.rows, pan.cols),
                               Grid2D(pan.rows, pan.cols)};
  for (std::size_t i = 0; i < pan.v.size(); ++i) {
    double intensity = (up[0].v[i] + up[1].v[i] + up[2].v[i]) / 3.0;
    double ratio = pan.v[i] / std::max(intensity, kEps);
    for (int c = 0; c < 3; ++c) out[c].v[i] = up[c].v[i] * ratio;
  }
  return out;
}

ChannelStats ChannelStats::identity(int channels) {
  ChannelStats s;
  s.mean.assign(static_cast<std::size_t>(channels), 0.0);
  s.scale.assign(static_cast<std::size_t>(channels), 1.0);
  return s;
}

std::vector<int> selected_band_ids(const RasterTile& tile,
                                   BandSelection selection) {
  std::vector<int> ids;
  if (selection == BandSelection::rgb_only) {
    ids = {0, 1, 2};
  } else {
    for (const auto& b : tile.bands) ids.push_back(b.band_id);
    std::sort(ids.begin(), ids.end());
  }
  for (int id : ids) {
    require(tile.find_band(id) >= 0, Errc::unknown_band,
            "tile lacks band " + std::to_string(id));
  }
  return ids;
}

Tensor stack_bands(const RasterTile& tile, BandSelection selection) {
  tile.validate();
  auto ids = selected_band_ids(tile, selection);
  int side = static_cast<int>(tile.extent_m / kBaseResolutionM);
  require(static_cast<double>(side) * kBaseResolutionM == tile.extent_m,
          Errc::bad_shape, "extent not divisible by 15 m");

  Tensor out({static_cast<int>(ids.size()), side, side});
  for (std::size_t c = 0; c < ids.size(); ++c) {
    int b = tile.find_band(ids[c]);
    int factor = tile.bands[b].native_resolution_m / kBaseResolutionM;
    Grid2D up = nn_upsample(tile.pixels[b], factor);
    std::copy(up.v.begin(), up.v.end(),
              out.data() + c * static_cast<std::size_t>(side) * side);
  }
  return out;
}

Tensor stack_to_tensor(const RasterTile& tile, BandSelection selection,
                       const ChannelStats& stats) {
  Tensor out = stack_bands(tile, selection);
  int channels = out.dim(0);
  require(static_cast<int>(stats.mean.size()) == channels &&
              static_cast<int>(stats.scale.size()) == channels,
          Errc::shape_mismatch, "channel stats length mismatch");
  std::size_t plane = out.numel() / static_cast<std::size_t>(channels);
  for (int c = 0; c < channels; ++c) {
    double mu = stats.mean[static_cast<std::size_t>(c)];
    double sigma = std::max(stats.scale[static_cast<std::size_t>(c)], 1e-6);
    double* p = out.data() + static_cast<std::size_t>(c) * plane;
    for (std::size_t i = 0; i < plane; ++i) p[i] = (p[i] - mu) / sigma;
  }
  return out;
}

ChannelStats compute_channel_stats(const std::vector<Tensor>& raw_stacks) {
  require(!raw_stacks.empty(), Errc::empty_dataset,
          "no tensors for channel statistics");
  int channels = raw_stacks.front().dim(0);
  ChannelStats stats;
  stats.mean.assign(static_cast<std::size_t>(channels), 0.0);
  stats.scale.assign(static_cast<std::size_t>(channels), 0.0);

  std::vector<double> sum(static_cast<std::size_t>(channels), 0.0);
  std::vector<double> sumsq(static_cast<std::size_t>(channels), 0.0);
  std::size_t count = 0;
  for (const auto& t : raw_stacks) {
    require(t.dim(0) == channels, Errc::shape_mismatch,
            "channel count differs across tensors");
    std::size_t plane = t.numel() / static_cast<std::size_t>(channels);
    for (int c = 0; c < channels; ++c) {
      const double* p = t.data() + static_cast<std::size_t>(c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        sum[static_cast<std::size_t>(c)] += p[i];
        sumsq[static_cast<std::size_t>(c)] += p[i] * p[i];
      }
    }
    count += t.numel() / static_cast<std::size_t>(channels);
  }
  for (int c = 0; c < channels; ++c) {
    double mu = sum[static_cast<std::size_t>(c)] / static_cast<double>(count);
    double var =
        sumsq[static_cast<std::size_t>(c)] / static_cast<double>(count) -
        mu * mu;
    stats.mean[static_cast<std::size_t>(c)] = mu;
    stats.scale[static_cast<std::size_t>(c)] =
        std::max(std::sqrt(std::max(var, 0.0)), 1e-6);
  }
  return stats;
}

double invalid_fraction(const RasterTile& tile) {
  std::size_t total = 0;
  std::size_t invalid = 0;
  for (const auto& m : tile.masks) {
    total += m.v.size();
    for (std::uint8_t b : m.v) {
      if (!b) ++invalid;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(invalid) / total;
}

void write_tile(const std::filesystem::path& stem, const RasterTile& tile) {
  tile.validate();

  json header;
  header["origin"] = {tile.origin_easting, tile.origin_northing};
  header["extent_m"] = tile.extent_m;
  json bands = json::array();
  for (std::size_t b = 0; b < tile.bands.size(); ++b) {
    bands.push_back({{"band_id", tile.bands[b].band_id},
                     {"native_resolution_m", tile.bands[b].native_resolution_m},
                     {"description", tile.bands[b].description},
                     {"rows", tile.pixels[b].rows},
                     {"cols", tile.pixels[b].cols}});
  }
  header["bands"] = bands;

  std::vector<unsigned char> pix;
  std::vector<unsigned char> msk;
  for (std::size_t b = 0; b < tile.bands.size(); ++b) {
    for (double v : tile.pixels[b].v) {
      float f = static_cast<float>(v);
      unsigned char buf[4];
      std::memcpy(buf, &f, 4);
      pix.insert(pix.end(), buf, buf + 4);
    }
    msk.insert(msk.end(), tile.masks[b].v.begin(), tile.masks[b].v.end());
  }

  auto bin = stem;
  bin += ".bin";
  auto mask = stem;
  mask += ".mask.bin";
  auto hdr = stem;
  hdr += ".hdr.json";
  write_binary_file_atomic(bin, pix);
  write_binary_file_atomic(mask, msk);
  write_text_file_atomic(hdr, header.dump(2) + "\n");
}

RasterTile read_tile(const std::filesystem::path& stem) {
  auto bin = stem;
  bin += ".bin";
  auto mask = stem;
  mask += ".mask.bin";
  auto hdr = stem;
  hdr += ".hdr.json";

  json header = json::parse(read_text_file(hdr));
  RasterTile tile;
  tile.origin_easting = header.at("origin").at(0).get<double>();
  tile.origin_northing = header.at("origin").at(1).get<double>();
  tile.extent_m = header.at("extent_m").get<double>();

  auto pix = read_binary_file(bin);
  auto msk = read_binary_file(mask);
  std::size_t pix_off = 0;
  std::size_t msk_off = 0;
  for (const auto& b : header.at("bands")) {
    BandInfo info;
    info.band_id = b.at("band_id").get<int>();
    info.native_resolution_m = b.at("native_resolution_m").get<int>();
    info.description = b.at("description").get<std::string>();
    int rows = b.at("rows").get<int>();
    int cols = b.at("cols").get<int>();

    Grid2D grid(rows, cols);
    std::size_t n = grid.v.size();
    require(pix_off + 4 * n <= pix.size(), Errc::io_error,
            "pixel file too short: " + bin.string());
    for (std::size_t i = 0; i < n; ++i) {
      float f;
      std::memcpy(&f, pix.data() + pix_off + 4 * i, 4);
      grid.v[i] = static_cast<double>(f);
    }
    pix_off += 4 * n;

    MaskGrid maskgrid(rows, cols, 0);
    require(msk_off + n <= msk.size(), Errc::io_error,
            "mask file too short: " + mask.string());
    std::copy(msk.begin() + static_cast<std::ptrdiff_t>(msk_off),
              msk.begin() + static_cast<std::ptrdiff_t>(msk_off + n),
              maskgrid.v.begin());
    msk_off += n;

    tile.bands.push_back(std::move(info));
    tile.pixels.push_back(std::move(grid));
    tile.masks.push_back(std::move(maskgrid));
  }
  require(pix_off == pix.size() && msk_off == msk.size(), Errc::io_error,
          "trailing bytes in tile files for " + stem.string());
  tile.validate();
  return tile;
}

}  // namespace satwealth::raster
