#include <doctest.h>

#include <cmath>

#include "chartlab/kernels.hpp"
#include "chartlab/parallel.hpp"

using namespace chartlab;

namespace {
double one_draw(Rng& rng) { return rng.normal() * rng.normal(); }
}  // namespace

TEST_CASE("serial and OpenMP MC kernels agree bitwise") {
  const std::int64_t n = 3 * kernels::kMcBlock + 117;
  const auto serial = kernels::mc_moments_serial(n, 99, one_draw);
  const auto parallel = kernels::mc_moments_omp(n, 99, one_draw);
  CHECK(serial.sum == parallel.sum);
  CHECK(serial.sum_sq == parallel.sum_sq);
  CHECK(serial.n == parallel.n);
}

TEST_CASE("MC result is independent of the thread budget") {
  const std::int64_t n = 2 * kernels::kMcBlock + 5;
  par::set_max_threads(1);
  const auto one = kernels::mc_moments(n, 7, one_draw);
  par::set_max_threads(4);
  const auto four = kernels::mc_moments(n, 7, one_draw);
  par::set_max_threads(0);
  CHECK(one.sum == four.sum);
  CHECK(one.sum_sq == four.sum_sq);
}

TEST_CASE("moment summary computes mean and standard error") {
  kernels::MomentSum s;
  for (double v : {1.0, 2.0, 3.0, 4.0}) {
    s.sum += v;
    s.sum_sq += v * v;
    ++s.n;
  }
  CHECK(s.mean() == doctest::Approx(2.5));
  // sample variance 5/3, stderr sqrt(5/12)
  CHECK(s.stderr_of_mean() == doctest::Approx(std::sqrt(5.0 / 12.0)));
}

TEST_CASE("pair mean distance matches a hand computation") {
  Eigen::MatrixXd a(1, 2), b(1, 1);
  a << 0.0, 2.0;
  b << 1.0;
  CHECK(kernels::pair_mean_distance_serial(a, b) == doctest::Approx(1.0));
}

TEST_CASE("serial and OpenMP pair sums agree bitwise") {
  Rng rng(5);
  Eigen::MatrixXd a(3, 257), b(3, 119);
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index r = 0; r < 3; ++r) a(r, c) = rng.normal();
  }
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    for (Eigen::Index r = 0; r < 3; ++r) b(r, c) = rng.normal();
  }
  const double serial = kernels::pair_mean_distance_serial(a, b);
  const double parallel = kernels::pair_mean_distance_omp(a, b);
  CHECK(serial == parallel);
}
