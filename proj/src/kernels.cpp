#include "chartlab/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chartlab {

namespace par {
namespace {
std::atomic<int> g_max_threads{0};  // 0 = decide from the runtime
}

int max_threads() {
  const int n = g_max_threads.load(std::memory_order_relaxed);
  if (n > 0) return n;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_max_threads(int n) {
  g_max_threads.store(n, std::memory_order_relaxed);
}

}  // namespace par

namespace kernels {

namespace {
// Row sum for one column of a against all columns of b.
double row_distance_sum(const Eigen::MatrixXd& a, Eigen::Index i,
                        const Eigen::MatrixXd& b) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    s += (a.col(i) - b.col(j)).norm();
  }
  return s;
}
}  // namespace

double pair_mean_distance_serial(const Eigen::MatrixXd& a,
                                 const Eigen::MatrixXd& b) {
  std::vector<double> rows(static_cast<std::size_t>(a.cols()));
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    rows[static_cast<std::size_t>(i)] = row_distance_sum(a, i, b);
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return total / (static_cast<double>(a.cols()) * static_cast<double>(b.cols()));
}

double pair_mean_distance_omp(const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b) {
  std::vector<double> rows(static_cast<std::size_t>(a.cols()));
#pragma omp parallel for schedule(static) num_threads(par::max_threads())
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    rows[static_cast<std::size_t>(i)] = row_distance_sum(a, i, b);
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return total / (static_cast<double>(a.cols()) * static_cast<double>(b.cols()));
}

double pair_mean_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (par::max_threads() <= 1 || a.cols() < 64) {
    return pair_mean_distance_serial(a, b);
  }
  return pair_mean_distance_omp(a, b);
}

}  // namespace kernels
}  // namespace chartlab
