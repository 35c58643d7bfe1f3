#include "satwealth/geodata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace satwealth::geo {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::vector<std::string> read_csv_lines(const std::filesystem::path& path,
                                        const std::string& expected_header) {
  std::string text = read_text_file(path);
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  require(!lines.empty() && lines.front() == expected_header, Errc::io_error,
          path.string() + ": expected header '" + expected_header + "'");
  lines.erase(lines.begin());
  return lines;
}

}  // namespace

std::vector<std::string> SplitAssignment::ids_in(
    const std::string& split) const {
  std::vector<std::string> ids;
  for (const auto& [id, s] : split_of) {
    if (s == split) ids.push_back(id);
  }
  return ids;
}

int bin_intensity(double intensity, std::pair<double, double> thresholds) {
  auto [t1, t2] = thresholds;
  require(0.0 <= t1 && t1 < t2, Errc::invalid_thresholds,
          "need 0 <= t1 < t2");
  if (intensity < t1) return 0;
  if (intensity < t2) return 1;
  return 2;
}

std::vector<std::size_t> sample_locations(
    const std::vector<SurveyRecord>& survey, const std::vector<Point>& pool,
    double density_sigma_m, std::size_t n, std::uint64_t seed) {
  require(!pool.empty(), Errc::pool_exhausted, "candidate pool is empty");
  require(n <= pool.size(), Errc::pool_exhausted,
          "requested " + std::to_string(n) + " of " +
              std::to_string(pool.size()) + " candidates");
  require(density_sigma_m > 0.0, Errc::config_error,
          "density_sigma_m must be positive");

  const double inv_two_sigma_sq = 1.0 / (2.0 * density_sigma_m * density_sigma_m);
  std::vector<double> weight(pool.size(), 1.0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (const auto& s : survey) {
      double dx = pool[i].easting - s.easting;
      double dy = pool[i].northing - s.northing;
      weight[i] += std::exp(-(dx * dx + dy * dy) * inv_two_sigma_sq);
    }
  }

  Rng rng(seed);
  std::vector<std::size_t> remaining(pool.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  double total = std::accumulate(weight.begin(), weight.end(), 0.0);

  std::vector<std::size_t> picked;
  picked.reserve(n);
  for (std::size_t draw = 0; draw < n; ++draw) {
    double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t chosen = remaining.size() - 1;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      acc += weight[remaining[r]];
      if (u < acc) {
        chosen = r;
        break;
      }
    }
    std::size_t idx = remaining[chosen];
    picked.push_back(idx);
    total -= weight[idx];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return picked;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

SplitAssignment assign_splits(const std::vector<SampleSite>& samples,
                              std::array<double, 3> fractions,
                              double tile_extent_m, std::uint64_t seed) {
  double frac_sum = fractions[0] + fractions[1] + fractions[2];
  require(fractions[0] > 0.0 && fractions[1] > 0.0 && fractions[2] > 0.0 &&
              std::abs(frac_sum - 1.0) < 1e-9,
          Errc::config_error, "split fractions must be positive and sum to 1");
  require(tile_extent_m > 0.0, Errc::config_error, "non-positive tile extent");

  const std::size_t n = samples.size();
  SplitAssignment out;
  out.tile_extent_m = tile_extent_m;
  out.target_fractions = fractions;
  if (n == 0) return out;

  // Footprints are squares of side tile_extent_m centered on each sample;
  // two footprints intersect iff the Chebyshev distance is below the extent.
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dx = std::abs(samples[i].easting - samples[j].easting);
      double dy = std::abs(samples[i].northing - samples[j].northing);
      if (std::max(dx, dy) < tile_extent_m) uf.unite(i, j);
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> components;
  components.reserve(by_root.size());
  for (auto& [root, members] : by_root) components.push_back(std::move(members));

  Rng rng(seed);
  rng.shuffle(components);
  std::stable_sort(components.begin(), components.end(),
                   [](const auto& a, const auto& b) {
                     return a.size() > b.size();
                   });

  std::array<double, 3> target{};
  std::array<std::size_t, 3> assigned{};
  for (int s = 0; s < 3; ++s) {
    target[static_cast<std::size_t>(s)] =
        fractions[static_cast<std::size_t>(s)] * static_cast<double>(n);
  }

  std::size_t max_component = 0;
  for (const auto& comp : components) {
    max_component = std::max(max_component, comp.size());
    int best = 0;
    double best_deficit = -1e300;
    for (int s = 0; s < 3; ++s) {
      double deficit = target[static_cast<std::size_t>(s)] -
                       static_cast<double>(assigned[static_cast<std::size_t>(s)]);
      if (deficit > best_deficit) {
        best_deficit = deficit;
        best = s;
      }
    }
    assigned[static_cast<std::size_t>(best)] += comp.size();
    for (std::size_t idx : comp) {
      out.split_of[samples[idx].id] = kSplitNames[static_cast<std::size_t>(best)];
    }
  }

  for (int s = 0; s < 3; ++s) {
    out.achieved_fractions[static_cast<std::size_t>(s)] =
        static_cast<double>(assigned[static_cast<std::size_t>(s)]) /
        static_cast<double>(n);
  }
  double max_fraction = std::max({fractions[0], fractions[1], fractions[2]});
  if (static_cast<double>(max_component) > max_fraction * static_cast<double>(n)) {
    out.warning = "largest overlap component (" + std::to_string(max_component) +
                  " samples) exceeds the largest split fraction; achieved "
                  "fractions deviate from targets";
  }
  return out;
}

std::vector<SurveyRecord> read_survey_csv(const std::filesystem::path& path) {
  auto lines =
      read_csv_lines(path, "cluster_id,country,easting,northing,awi,year");
  std::vector<SurveyRecord> records;
  records.reserve(lines.size());
  for (const auto& line : lines) {
    auto f = split_csv_line(line);
    require(f.size() == 6, Errc::io_error,
            path.string() + ": bad survey row '" + line + "'");
    SurveyRecord r;
    r.cluster_id = f[0];
    r.country = f[1];
    r.easting = parse_double(f[2]);
    r.northing = parse_double(f[3]);
    r.awi = parse_double(f[4]);
    r.year = static_cast<int>(parse_double(f[5]));
    require(std::isfinite(r.awi), Errc::io_error,
            "non-finite AWI for cluster " + r.cluster_id);
    records.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      require(records[i].cluster_id != records[j].cluster_id, Errc::io_error,
              "duplicate cluster_id " + records[i].cluster_id);
    }
  }
  return records;
}

void write_survey_csv(const std::filesystem::path& path,
                      const std::vector<SurveyRecord>& records) {
  std::string out = "cluster_id,country,easting,northing,awi,year\n";
  for (const auto& r : records) {
    out += r.cluster_id + "," + r.country + "," + format_double(r.easting) +
           "," + format_double(r.northing) + "," + format_double(r.awi) + "," +
           std::to_string(r.year) + "\n";
  }
  write_text_file_atomic(path, out);
}

std::vector<NightlightSample> read_nightlight_csv(
    const std::filesystem::path& path) {
  auto lines = read_csv_lines(path, "easting,northing,intensity");
  std::vector<NightlightSample> samples;
  samples.reserve(lines.size());
  for (const auto& line : lines) {
    auto f = split_csv_line(line);
    require(f.size() == 3, Errc::io_error,
            path.string() + ": bad nightlight row '" + line + "'");
    NightlightSample s;
    s.easting = parse_double(f[0]);
    s.northing = parse_double(f[1]);
    s.intensity = parse_double(f[2]);
    require(s.intensity >= 0.0, Errc::io_error,
            "negative nightlight intensity in " + path.string());
    samples.push_back(s);
  }
  return samples;
}

void write_nightlight_csv(const std::filesystem::path& path,
                          const std::vector<NightlightSample>& samples) {
  std::string out = "easting,northing,intensity\n";
  for (const auto& s : samples) {
    out += format_double(s.easting) + "," + format_double(s.northing) + "," +
           format_double(s.intensity) + "\n";
  }
  write_text_file_atomic(path, out);
}

}  // namespace satwealth::geo
