#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "satwealth/common.hpp"
#include "satwealth/tensor.hpp"

namespace satwealth::raster {

constexpr int kBaseResolutionM = 15;  // finest grid every band is aligned to

struct Grid2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Grid2D() = default;
  Grid2D(int r, int c, double fill = 0.0)
      : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return v[static_cast<std::size_t>(r) * cols + c];
  }
  bool same_dims(const Grid2D& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

struct MaskGrid {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> v;  // 1 = valid (cloud free)

  MaskGrid() = default;
  MaskGrid(int r, int c, std::uint8_t fill = 1)
      : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

  std::uint8_t& at(int r, int c) {
    return v[static_cast<std::size_t>(r) * cols + c];
  }
  std::uint8_t at(int r, int c) const {
    return v[static_cast<std::size_t>(r) * cols + c];
  }
  bool same_dims(const MaskGrid& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

struct BandInfo {
  int band_id = 0;
  int native_resolution_m = 0;  // one of 15, 30, 60
  std::string description;

  bool operator==(const BandInfo& o) const {
    return band_id == o.band_id &&
           native_resolution_m == o.native_resolution_m;
  }
};

void validate_resolution(int native_resolution_m);

// Multi-band georeferenced pixel grid. Per band, side length in pixels times
// native resolution equals extent_m exactly; pixels and mask share dims.
struct RasterTile {
  double origin_easting = 0.0;
  double origin_northing = 0.0;
  double extent_m = 0.0;
  std::vector<BandInfo> bands;
  std::vector<Grid2D> pixels;
  std::vector<MaskGrid> masks;

  int band_count() const { return static_cast<int>(bands.size()); }
  int find_band(int band_id) const;  // -1 when absent
  void validate() const;
  bool congruent_with(const RasterTile& o) const;
};

struct ObservationStack {
  std::vector<RasterTile> tiles;
  std::vector<std::int64_t> timestamps;
};

// Per-pixel median over cloud-free observations. Even counts average the two
// central order statistics. Pixels with no valid observation get fill 0.0 and
// mask false; downstream sampling rejects tiles that are mostly invalid.
RasterTile median_composite(const ObservationStack& stack);

// Each input pixel becomes a factor x factor block of identical values.
Grid2D nn_upsample(const Grid2D& band_grid, int factor);

// Brovey transform: ratio of the pan band to the RGB intensity rescales the
// nn-upsampled color bands onto the pan grid.
std::array<Grid2D, 3> pan_sharpen(const std::array<Grid2D, 3>& rgb,
                                  const Grid2D& pan);

enum class BandSelection { rgb_only, all_bands };

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> scale;  // floored at 1e-6 when applied

  static ChannelStats identity(int channels);
};

// Selected bands nn-upsampled to the 15 m grid, stacked [C, H, W], then
// standardized per channel with the supplied training-split statistics.
Tensor stack_to_tensor(const RasterTile& tile, BandSelection selection,
                       const ChannelStats& stats);

// Raw stack without standardization; used to accumulate training statistics.
Tensor stack_bands(const RasterTile& tile, BandSelection selection);

ChannelStats compute_channel_stats(const std::vector<Tensor>& raw_stacks);

// Ids of the bands a selection picks, in channel order.
std::vector<int> selected_band_ids(const RasterTile& tile,
                                   BandSelection selection);

// Fraction of pixels (across all bands) whose mask is false.
double invalid_fraction(const RasterTile& tile);

// Tile files: <stem>.bin (little-endian float32, band-major row-major),
// <stem>.mask.bin (one byte per pixel, 1 = valid), <stem>.hdr.json.
// Round-trips bit-exactly.
void write_tile(const std::filesystem::path& stem, const RasterTile& tile);
RasterTile read_tile(const std::filesystem::path& stem);

}  // namespace satwealth::raster
