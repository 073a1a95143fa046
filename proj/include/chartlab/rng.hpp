#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace chartlab {

inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Splittable sub-seed scheme: every sampling site owns a stream derived from
// (seed, tag, index), so results are independent of evaluation order and of
// how work is split across threads.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t index = 0) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ull);
  h = mix64(h ^ (tag + 0x9e3779b97f4a7c15ull));
  h = mix64(h ^ (index + 0xbf58476d1ce4e5b9ull));
  return h;
}

// Stream tags. Listed in one place so no two call sites collide by accident.
namespace seed_tag {
inline constexpr std::uint64_t atlas_means = 0x01;
inline constexpr std::uint64_t atlas_cov = 0x02;
inline constexpr std::uint64_t chart_sample = 0x03;
inline constexpr std::uint64_t relatedness_probe = 0x04;
inline constexpr std::uint64_t mc_block = 0x05;
inline constexpr std::uint64_t cost_cell = 0x06;
inline constexpr std::uint64_t dirichlet_candidate = 0x07;
inline constexpr std::uint64_t membership_probe = 0x08;
inline constexpr std::uint64_t lipschitz_pair = 0x09;
inline constexpr std::uint64_t gap_push = 0x0a;
inline constexpr std::uint64_t gap_baseline = 0x0b;
inline constexpr std::uint64_t gap_reference = 0x0c;
inline constexpr std::uint64_t local_global = 0x0d;
inline constexpr std::uint64_t mse_trial = 0x0e;
inline constexpr std::uint64_t thm3_sample = 0x0f;
inline constexpr std::uint64_t train_init = 0x10;
inline constexpr std::uint64_t train_step = 0x11;
inline constexpr std::uint64_t train_eval = 0x12;
}  // namespace seed_tag

// mt19937_64 with a hand-rolled Box-Muller transform, so draws do not depend
// on the standard library's normal_distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // uniform in (0, 1], safe as a log argument
  double uniform_pos() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double a = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // uniform integer in [0, n), n >= 1 (fixed-point multiply, no rejection)
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace chartlab
