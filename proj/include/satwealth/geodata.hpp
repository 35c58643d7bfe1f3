#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "satwealth/common.hpp"

namespace satwealth::geo {

struct Point {
  double easting = 0.0;
  double northing = 0.0;
};

struct SurveyRecord {
  std::string cluster_id;
  std::string country;
  double easting = 0.0;
  double northing = 0.0;
  double awi = 0.0;
  int year = 0;
};

struct NightlightSample {
  double easting = 0.0;
  double northing = 0.0;
  double intensity = 0.0;
  int label = 0;
};

struct SampleSite {
  std::string id;
  double easting = 0.0;
  double northing = 0.0;
};

// Split names in the fixed order used for fraction targets.
inline constexpr std::array<const char*, 3> kSplitNames = {"train", "val",
                                                           "test"};

struct SplitAssignment {
  std::map<std::string, std::string> split_of;  // sample id -> split name
  double tile_extent_m = 0.0;
  std::array<double, 3> target_fractions{};
  std::array<double, 3> achieved_fractions{};
  std::string warning;  // non-empty when fractions were infeasible

  std::vector<std::string> ids_in(const std::string& split) const;
};

// Left-closed bins: intensity < t1 -> 0, [t1, t2) -> 1, >= t2 -> 2.
int bin_intensity(double intensity, std::pair<double, double> thresholds);

// Weighted sampling without replacement from the candidate pool. Each pool
// point's weight is 1 plus a Gaussian kernel sum over the survey locations,
// so imagery concentrates near surveyed places. Returns pool indices.
std::vector<std::size_t> sample_locations(
    const std::vector<SurveyRecord>& survey, const std::vector<Point>& pool,
    double density_sigma_m, std::size_t n, std::uint64_t seed);

// Spatially disjoint splits: samples whose square footprints (side
// tile_extent_m, centered on the sample) overlap are forced into the same
// split via connected components, then whole components are distributed
// greedily toward the target fractions.
SplitAssignment assign_splits(const std::vector<SampleSite>& samples,
                              std::array<double, 3> fractions,
                              double tile_extent_m, std::uint64_t seed);

// CSV formats: survey "cluster_id,country,easting,northing,awi,year";
// nightlights "easting,northing,intensity".
std::vector<SurveyRecord> read_survey_csv(const std::filesystem::path& path);
void write_survey_csv(const std::filesystem::path& path,
                      const std::vector<SurveyRecord>& records);
std::vector<NightlightSample> read_nightlight_csv(
    const std::filesystem::path& path);
void write_nightlight_csv(const std::filesystem::path& path,
                          const std::vector<NightlightSample>& samples);

}  // namespace satwealth::geo
