#include "chartlab/manifold.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "chartlab/rng.hpp"

namespace chartlab {

namespace {
constexpr int kPlacementAttempts = 10000;
}

Covariance::Covariance(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() < 1) {
    throw std::invalid_argument("covariance must be a nonempty square matrix");
  }
  if (!sigma_.isApprox(sigma_.transpose(), 1e-12)) {
    throw std::invalid_argument("covariance must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("covariance must be positive-definite");
  }
  chol_ = llt.matrixL();
  trace_ = sigma_.trace();
}

bool chart_less(const ChartGaussian& a, const ChartGaussian& b) {
  if (a.mean.size() != b.mean.size()) return a.mean.size() < b.mean.size();
  for (Eigen::Index i = 0; i < a.mean.size(); ++i) {
    if (a.mean[i] != b.mean[i]) return a.mean[i] < b.mean[i];
  }
  if (a.trace() != b.trace()) return a.trace() < b.trace();
  return a.index < b.index;
}

double min_pairwise_separation(const std::vector<Eigen::VectorXd>& means) {
  if (means.size() < 2) return std::numeric_limits<double>::infinity();
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < means.size(); ++i) {
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      sep = std::min(sep, (means[i] - means[j]).norm());
    }
  }
  return sep;
}

ManifoldSpec make_spec(std::vector<Eigen::VectorXd> means,
                       Eigen::MatrixXd sigma) {
  if (means.empty()) throw std::invalid_argument("need at least one chart");
  auto cov = std::make_shared<const Covariance>(std::move(sigma));
  const int d = cov->dimension();
  ManifoldSpec spec;
  spec.dimension = d;
  spec.separation = min_pairwise_separation(means);
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (means[i].size() != d) {
      throw std::invalid_argument("chart mean dimension mismatch");
    }
    spec.charts.push_back(
        ChartGaussian{static_cast<int>(i), std::move(means[i]), cov});
  }
  return spec;
}

ManifoldSpec build_atlas(int k, int d, double mean_scale, double trace_target,
                         std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("chart count must be >= 1");
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(mean_scale > 0.0)) throw std::invalid_argument("mean_scale must be > 0");
  if (!(trace_target > 0.0)) {
    throw std::invalid_argument("trace_target must be > 0");
  }

  // Mean placement: uniform draws in a box of half-width 10 mean_scale,
  // rejected until every accepted pair is at least mean_scale apart. Chart
  // counts beyond the box's packing capacity exhaust the attempt bound.
  Rng mean_rng(derive_seed(seed, seed_tag::atlas_means));
  const double half_width = 10.0 * mean_scale;
  std::vector<Eigen::VectorXd> means;
  means.reserve(static_cast<std::size_t>(k));
  int attempts = 0;
  while (static_cast<int>(means.size()) < k) {
    if (++attempts > kPlacementAttempts) {
      throw std::runtime_error(
          "build_atlas: could not place chart means at the requested "
          "separation; mean_scale is infeasible for this (k, d)");
    }
    Eigen::VectorXd candidate(d);
    for (int i = 0; i < d; ++i) {
      candidate[i] = (2.0 * mean_rng.uniform() - 1.0) * half_width;
    }
    bool ok = true;
    for (const auto& m : means) {
      if ((candidate - m).norm() < mean_scale) {
        ok = false;
        break;
      }
    }
    if (ok) means.push_back(std::move(candidate));
  }

  // Covariance: random orthogonal conjugation of a positive diagonal, scaled
  // so the trace is exactly trace_target.
  Rng cov_rng(derive_seed(seed, seed_tag::atlas_cov));
  Eigen::MatrixXd sigma;
  if (d == 1) {
    sigma = Eigen::MatrixXd::Constant(1, 1, trace_target);
  } else {
    Eigen::VectorXd diag(d);
    for (int i = 0; i < d; ++i) diag[i] = 0.5 + cov_rng.uniform();
    Eigen::MatrixXd gauss(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) gauss(i, j) = cov_rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd q = qr.householderQ();
    sigma = q * diag.asDiagonal() * q.transpose();
    sigma *= trace_target / sigma.trace();
    sigma = ((sigma + sigma.transpose()) / 2.0).eval();
  }

  return make_spec(std::move(means), std::move(sigma));
}

void draw_point_into(const ChartGaussian& chart, Rng& rng,
                     Eigen::VectorXd& z_scratch, Eigen::VectorXd& out) {
  const int d = chart.dimension();
  z_scratch.resize(d);
  for (int i = 0; i < d; ++i) z_scratch[i] = rng.normal();
  out.resize(d);
  out.noalias() = chart.covariance->chol() * z_scratch;
  out += chart.mean;
}

Eigen::VectorXd draw_point(const ChartGaussian& chart, Rng& rng) {
  Eigen::VectorXd z, out;
  draw_point_into(chart, rng, z, out);
  return out;
}

EmpiricalSample sample_chart(const ChartGaussian& chart, std::int64_t m,
                             std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample count must be >= 1");
  Rng rng(seed);
  EmpiricalSample out;
  out.chart_index = chart.index;
  out.source_seed = seed;
  out.points.resize(chart.dimension(), m);
  for (std::int64_t i = 0; i < m; ++i) {
    out.points.col(i) = draw_point(chart, rng);
  }
  return out;
}

std::vector<EmpiricalSample> sample_mixture(const ManifoldSpec& spec,
                                            std::int64_t per_chart,
                                            std::uint64_t seed) {
  if (per_chart < 1) throw std::invalid_argument("per_chart must be >= 1");
  std::vector<EmpiricalSample> out;
  out.reserve(spec.charts.size());
  for (const auto& chart : spec.charts) {
    out.push_back(sample_chart(
        chart, per_chart,
        derive_seed(seed, seed_tag::chart_sample,
                    static_cast<std::uint64_t>(chart.index))));
  }
  return out;
}

RelatednessReport inner_relatedness_check(const ManifoldSpec& spec,
                                          std::int64_t n_probe,
                                          std::uint64_t seed) {
  const int k = spec.chart_count();
  if (k < 2) throw std::invalid_argument("need at least two charts");
  if (n_probe < 1) throw std::invalid_argument("n_probe must be >= 1");

  double margin = std::numeric_limits<double>::infinity();
  for (std::int64_t t = 0; t < n_probe; ++t) {
    Rng rng(derive_seed(seed, seed_tag::relatedness_probe,
                        static_cast<std::uint64_t>(t)));
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(k - 1)));
    if (j >= i) ++j;
    const auto& ci = spec.charts[static_cast<std::size_t>(i)];
    const auto& cj = spec.charts[static_cast<std::size_t>(j)];
    const Eigen::VectorXd x = draw_point(ci, rng);
    const Eigen::VectorXd y = draw_point(ci, rng);
    const Eigen::VectorXd z = draw_point(cj, rng);
    margin = std::min(margin, (x - z).norm() - (x - y).norm());
  }
  return RelatednessReport{margin >= 0.0, margin};
}

}  // namespace chartlab
