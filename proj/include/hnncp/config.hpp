#pragma once

#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>

namespace hnncp {

/// Stabilisation threshold 2(r-1)^2.
inline int k0(int rank) { return 2 * (rank - 1) * (rank - 1); }

/// Every search budget in one place. All values must be >= 1.
struct Bounds {
  int orbit = 64;        // iterates of phi tried on a conjugacy class
  int conjugator = 10;   // length of brute-force conjugators
  int image = 32;        // depth of image-power probes
  std::optional<int> max_k;  // pullback stages; default k0 + 16
  int max_word_length = 4096;  // iterates longer than this are abandoned

  int max_k_for(int rank) const { return max_k.value_or(k0(rank) + 16); }

  void validate() const {
    if (orbit < 1 || conjugator < 1 || image < 1 || max_word_length < 1 || (max_k && *max_k < 1))
      throw std::invalid_argument("all bounds must be at least 1");
  }

  /// Defaults overridden by HNNCP_ORBIT_BOUND, HNNCP_CONJUGATOR_BOUND,
  /// HNNCP_IMAGE_BOUND, HNNCP_MAX_K and HNNCP_MAX_WORD_LENGTH.
  static Bounds from_env() { return from_env(Bounds()); }
  static Bounds from_env(Bounds b) {
    auto read = [](const char* name) -> std::optional<int> {
      const char* v = std::getenv(name);
      if (!v || !*v) return std::nullopt;
      std::size_t used = 0;
      int n = 0;
      try {
        n = std::stoi(v, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument(std::string(name) + " is not an integer");
      }
      if (used != std::string(v).size()) throw std::invalid_argument(std::string(name) + " is not an integer");
      return n;
    };
    if (auto v = read("HNNCP_ORBIT_BOUND")) b.orbit = *v;
    if (auto v = read("HNNCP_CONJUGATOR_BOUND")) b.conjugator = *v;
    if (auto v = read("HNNCP_IMAGE_BOUND")) b.image = *v;
    if (auto v = read("HNNCP_MAX_K")) b.max_k = *v;
    if (auto v = read("HNNCP_MAX_WORD_LENGTH")) b.max_word_length = *v;
    b.validate();
    return b;
  }
};

/// Thrown when an iterate outgrows Bounds::max_word_length.
class LengthBoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hnncp
