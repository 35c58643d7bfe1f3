#include "satwealth/common.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <system_error>

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts unsupported");

namespace satwealth {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::empty_stack: return "EmptyStack";
    case Errc::incongruent_tiles: return "IncongruentTiles";
    case Errc::invalid_factor: return "InvalidFactor";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::negative_radiance: return "NegativeRadiance";
    case Errc::unknown_band: return "UnknownBand";
    case Errc::invalid_thresholds: return "InvalidThresholds";
    case Errc::pool_exhausted: return "PoolExhausted";
    case Errc::bad_shape: return "BadShape";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::window_too_large: return "WindowTooLarge";
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::non_finite_loss: return "NonFiniteLoss";
    case Errc::singular_system: return "SingularSystem";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::too_few_groups: return "TooFewGroups";
    case Errc::missing_nightlight_predictions: return "MissingNightlightPredictions";
    case Errc::empty_subset: return "EmptySubset";
    case Errc::too_few_rows: return "TooFewRows";
    case Errc::config_error: return "ConfigError";
    case Errc::missing_input: return "MissingInput";
    case Errc::io_error: return "IoError";
    case Errc::internal_error: return "InternalError";
  }
  return "UnknownError";
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  require(n > 0, Errc::internal_error, "uniform_below(0)");
  std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double Rng::normal(double mean, double stddev) {
  return mean + stddev * normal();
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ master;
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t sm = h;
  return splitmix64(sm);
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string hash_file(const std::filesystem::path& path) {
  auto bytes = read_binary_file(path);
  return hash_hex(fnv1a64(bytes));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  require(ec == std::errc(), Errc::internal_error, "to_chars failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), Errc::io_error,
          "malformed number '" + std::string(s) + "'");
  return v;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::missing_input, "cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

namespace {

void rename_over(const std::filesystem::path& tmp,
                 const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    raise(Errc::io_error, "rename to " + path.string() + ": " + ec.message());
  }
}

}  // namespace

void write_text_file_atomic(const std::filesystem::path& path,
                            std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), Errc::io_error, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    require(out.good(), Errc::io_error, "short write to " + tmp.string());
  }
  rename_over(tmp, path);
}

void write_binary_file_atomic(const std::filesystem::path& path,
                              std::span<const unsigned char> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), Errc::io_error, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    require(out.good(), Errc::io_error, "short write to " + tmp.string());
  }
  rename_over(tmp, path);
}

std::vector<unsigned char> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::missing_input, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace satwealth
