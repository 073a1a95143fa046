// Times the OpenMP kernels against their serial reference implementations.
//   ./chartlab_bench [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "chartlab/kernels.hpp"
#include "chartlab/manifold.hpp"
#include "chartlab/parallel.hpp"
#include "chartlab/rng.hpp"

using namespace chartlab;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class Fn>
double time_ms(Fn&& fn) {
  const double start = now_ms();
  fn();
  return now_ms() - start;
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : par::max_threads();
  par::set_max_threads(threads);
  std::printf("threads: %d\n\n", threads);

  // MC moment kernel: expected distance between two Gaussian charts.
  {
    const ManifoldSpec spec = build_atlas(2, 2, 5.0, 1.0, 1);
    const auto& a = spec.charts[0];
    const auto& b = spec.charts[1];
    const std::int64_t n = 20'000'000;
    auto draw = [&](Rng& rng) {
      thread_local Eigen::VectorXd z, s, t;
      draw_point_into(a, rng, z, s);
      draw_point_into(b, rng, z, t);
      return (s - t).norm();
    };
    kernels::MomentSum serial, parallel;
    const double t_serial =
        time_ms([&] { serial = kernels::mc_moments_serial(n, 9, draw); });
    const double t_parallel =
        time_ms([&] { parallel = kernels::mc_moments_omp(n, 9, draw); });
    std::printf("mc_moments        n=%lld   serial %8.1f ms   omp %8.1f ms   speedup %.2fx   %s\n",
                static_cast<long long>(n), t_serial, t_parallel,
                t_serial / t_parallel,
                serial.sum == parallel.sum ? "bitwise equal" : "MISMATCH");
  }

  // Pairwise distance double sum.
  {
    Rng rng(4);
    const int d = 2;
    Eigen::MatrixXd a(d, 4000), b(d, 4000);
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      for (int r = 0; r < d; ++r) a(r, c) = rng.normal();
    }
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      for (int r = 0; r < d; ++r) b(r, c) = rng.normal();
    }
    double serial = 0.0, parallel = 0.0;
    const double t_serial =
        time_ms([&] { serial = kernels::pair_mean_distance_serial(a, b); });
    const double t_parallel =
        time_ms([&] { parallel = kernels::pair_mean_distance_omp(a, b); });
    std::printf("pair_mean_distance 4000x4000 serial %8.1f ms   omp %8.1f ms   speedup %.2fx   %s\n",
                t_serial, t_parallel, t_serial / t_parallel,
                serial == parallel ? "bitwise equal" : "MISMATCH");
  }
  return 0;
}
