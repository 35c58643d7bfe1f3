#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace satwealth {

// Error codes shared across the library. The C API maps categories of these
// onto process exit codes (see satwealth.h).
enum class Errc {
  empty_stack,
  incongruent_tiles,
  invalid_factor,
  dimension_mismatch,
  negative_radiance,
  unknown_band,
  invalid_thresholds,
  pool_exhausted,
  bad_shape,
  shape_mismatch,
  window_too_large,
  empty_dataset,
  non_finite_loss,
  singular_system,
  length_mismatch,
  too_few_groups,
  missing_nightlight_predictions,
  empty_subset,
  too_few_rows,
  config_error,
  missing_input,
  io_error,
  internal_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, Errc code, const std::string& message) {
  if (!cond) raise(code, message);
}

// Deterministic, portable random generator (xoshiro256** seeded via
// splitmix64). The standard <random> engines are portable but the
// distributions are not, so all draws go through this class.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer in [0, n), n > 0. Unbiased via rejection.
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via Box-Muller. Draws two uniforms per pair; the
  // second value is cached.
  double normal();
  double normal(double mean, double stddev);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Child seed for a named substream. Changing one stage's draw count never
// perturbs another stage's stream.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

// FNV-1a content hashes, rendered as fixed-width hex. Used for manifest
// integrity checks, not security.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::string hash_hex(std::uint64_t h);
std::string hash_file(const std::filesystem::path& path);

// Shortest round-trip decimal rendering of a double (std::to_chars).
std::string format_double(double v);
double parse_double(std::string_view s);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file_atomic(const std::filesystem::path& path,
                            std::string_view content);
void write_binary_file_atomic(const std::filesystem::path& path,
                              std::span<const unsigned char> bytes);
std::vector<unsigned char> read_binary_file(const std::filesystem::path& path);

}  // namespace satwealth
