#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "chartlab/parallel.hpp"
#include "chartlab/rng.hpp"

namespace chartlab::kernels {

// Monte-Carlo draws are partitioned into fixed-size blocks; block b runs on
// its own stream derive_seed(seed, mc_block, b) and partial sums are combined
// in ascending block order. Serial and OpenMP paths therefore agree bitwise.
inline constexpr std::int64_t kMcBlock = 8192;

struct MomentSum {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;

  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }

  // standard error of the mean (0 when n < 2)
  double stderr_of_mean() const {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    double var = (sum_sq - sum * sum / nn) / (nn - 1.0);
    if (var < 0.0) var = 0.0;  // cancellation guard
    return std::sqrt(var / nn);
  }
};

template <class DrawFn>
MomentSum mc_block_run(std::uint64_t block_seed, std::int64_t count,
                       DrawFn&& draw) {
  Rng rng(block_seed);
  MomentSum out;
  for (std::int64_t i = 0; i < count; ++i) {
    const double v = draw(rng);
    out.sum += v;
    out.sum_sq += v * v;
  }
  out.n = count;
  return out;
}

namespace detail {
inline std::int64_t block_count(std::int64_t n) {
  return (n + kMcBlock - 1) / kMcBlock;
}
inline std::int64_t block_len(std::int64_t n, std::int64_t b) {
  const std::int64_t lo = b * kMcBlock;
  return std::min(kMcBlock, n - lo);
}
inline MomentSum combine_ascending(const std::vector<MomentSum>& parts) {
  MomentSum total;
  for (const MomentSum& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.n += p.n;
  }
  return total;
}
}  // namespace detail

// Serial reference implementation.
template <class DrawFn>
MomentSum mc_moments_serial(std::int64_t n, std::uint64_t seed, DrawFn&& draw) {
  const std::int64_t nb = detail::block_count(n);
  std::vector<MomentSum> parts(static_cast<std::size_t>(nb));
  for (std::int64_t b = 0; b < nb; ++b) {
    parts[static_cast<std::size_t>(b)] = mc_block_run(
        derive_seed(seed, seed_tag::mc_block, static_cast<std::uint64_t>(b)),
        detail::block_len(n, b), draw);
  }
  return detail::combine_ascending(parts);
}

// OpenMP kernel: blocks run concurrently, combine order stays fixed.
template <class DrawFn>
MomentSum mc_moments_omp(std::int64_t n, std::uint64_t seed, DrawFn&& draw) {
  const std::int64_t nb = detail::block_count(n);
  std::vector<MomentSum> parts(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(dynamic) num_threads(par::max_threads())
  for (std::int64_t b = 0; b < nb; ++b) {
    parts[static_cast<std::size_t>(b)] = mc_block_run(
        derive_seed(seed, seed_tag::mc_block, static_cast<std::uint64_t>(b)),
        detail::block_len(n, b), draw);
  }
  return detail::combine_ascending(parts);
}

template <class DrawFn>
MomentSum mc_moments(std::int64_t n, std::uint64_t seed, DrawFn&& draw) {
  if (par::max_threads() <= 1) return mc_moments_serial(n, seed, draw);
  return mc_moments_omp(n, seed, draw);
}

// Mean over all column pairs of ||a_i - b_j||; points are matrix columns.
// Row sums are accumulated per i and folded in ascending order in both paths.
double pair_mean_distance_serial(const Eigen::MatrixXd& a,
                                 const Eigen::MatrixXd& b);
double pair_mean_distance_omp(const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b);
double pair_mean_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace chartlab::kernels
