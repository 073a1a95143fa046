#include "chartlab/lk_metric.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chartlab/kernels.hpp"
#include "chartlab/rng.hpp"

namespace chartlab {

const char* to_string(LkForm form) {
  switch (form) {
    case LkForm::paper_closed: return "paper_closed";
    case LkForm::empirical: return "empirical";
    case LkForm::monte_carlo: return "monte_carlo";
    case LkForm::exact_1d: return "exact_1d";
  }
  return "unknown";
}

LkForm lk_form_from_string(const std::string& name) {
  if (name == "paper_closed") return LkForm::paper_closed;
  if (name == "empirical") return LkForm::empirical;
  if (name == "monte_carlo") return LkForm::monte_carlo;
  if (name == "exact_1d") return LkForm::exact_1d;
  throw std::invalid_argument("unknown lk_form: " + name);
}

double lk_paper_form_moments(const Eigen::VectorXd& mean_a, double trace_a,
                             const Eigen::VectorXd& mean_b, double trace_b) {
  return (mean_a - mean_b).norm() + trace_a + trace_b;
}

LkEstimate lk_paper_form(const ChartGaussian& a, const ChartGaussian& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("dimension mismatch");
  }
  return LkEstimate{
      lk_paper_form_moments(a.mean, a.trace(), b.mean, b.trace()), 0.0, 0,
      LkForm::paper_closed};
}

LkEstimate lk_empirical(const Eigen::MatrixXd& sa, const Eigen::MatrixXd& sb) {
  if (sa.cols() < 1 || sb.cols() < 1) {
    throw std::invalid_argument("point sets must be non-empty");
  }
  if (sa.rows() != sb.rows()) throw std::invalid_argument("dimension mismatch");
  return LkEstimate{kernels::pair_mean_distance(sa, sb), 0.0,
                    sa.cols() * sb.cols(), LkForm::empirical};
}

LkEstimate lk_monte_carlo(const ChartGaussian& a, const ChartGaussian& b,
                          std::int64_t n, std::uint64_t seed) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("dimension mismatch");
  }
  if (n < 2) throw std::invalid_argument("need n >= 2 draws");
  // Canonical argument order makes the estimate exactly swap-symmetric.
  const ChartGaussian& first = chart_less(b, a) ? b : a;
  const ChartGaussian& second = chart_less(b, a) ? a : b;
  const auto stat = kernels::mc_moments(n, seed, [&](Rng& rng) {
    thread_local Eigen::VectorXd z, x, y;
    draw_point_into(first, rng, z, x);
    draw_point_into(second, rng, z, y);
    return (x - y).norm();
  });
  return LkEstimate{stat.mean(), stat.stderr_of_mean(), stat.n,
                    LkForm::monte_carlo};
}

double folded_normal_mean(double mean, double stddev) {
  if (!(stddev > 0.0)) return std::fabs(mean);
  const double density_part = stddev * std::sqrt(2.0 / std::numbers::pi) *
                              std::exp(-mean * mean / (2.0 * stddev * stddev));
  return density_part +
         mean * std::erf(mean / (stddev * std::numbers::sqrt2));
}

LkEstimate lk_exact_1d(const ChartGaussian& a, const ChartGaussian& b) {
  if (a.dimension() != 1 || b.dimension() != 1) {
    throw std::invalid_argument("exact form requires scalar Gaussians");
  }
  const double m = a.mean[0] - b.mean[0];
  const double s = std::sqrt(a.trace() + b.trace());
  return LkEstimate{folded_normal_mean(m, s), 0.0, 0, LkForm::exact_1d};
}

}  // namespace chartlab
