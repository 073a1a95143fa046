#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace chartlab {

// Shared covariance of one manifold's charts, with its Cholesky factor and
// trace cached. Construction fails on non-SPD input.
class Covariance {
 public:
  explicit Covariance(Eigen::MatrixXd sigma);

  const Eigen::MatrixXd& matrix() const { return sigma_; }
  const Eigen::MatrixXd& chol() const { return chol_; }  // lower, sigma = L L^T
  double trace() const { return trace_; }
  int dimension() const { return static_cast<int>(sigma_.rows()); }

 private:
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd chol_;
  double trace_ = 0.0;
};

// One chart's local Gaussian law N(mean, covariance). Charts of the same
// manifold share a single Covariance object.
struct ChartGaussian {
  int index = 0;
  Eigen::VectorXd mean;
  std::shared_ptr<const Covariance> covariance;

  int dimension() const { return static_cast<int>(mean.size()); }
  double trace() const { return covariance->trace(); }
};

// Deterministic total order on charts, used to canonicalize symmetric
// estimators. Compares (mean lexicographically, trace, index).
bool chart_less(const ChartGaussian& a, const ChartGaussian& b);

// An atlas of K disjoint-in-practice charts; the glued measure is the
// equal-weight mixture of the chart laws.
struct ManifoldSpec {
  std::vector<ChartGaussian> charts;
  int dimension = 0;
  double separation = 0.0;  // min pairwise mean distance, +inf when K == 1

  int chart_count() const { return static_cast<int>(charts.size()); }
  const std::shared_ptr<const Covariance>& covariance() const {
    return charts.front().covariance;
  }
};

double min_pairwise_separation(const std::vector<Eigen::VectorXd>& means);

struct EmpiricalSample {
  int chart_index = 0;
  Eigen::MatrixXd points;  // d x n, one draw per column
  std::uint64_t source_seed = 0;

  std::int64_t count() const { return points.cols(); }
};

// Builds K charts with pairwise mean separation >= mean_scale (rejection
// resampled, bounded attempts) and a shared covariance of exact trace
// trace_target, randomly rotated. Deterministic given seed.
ManifoldSpec build_atlas(int k, int d, double mean_scale, double trace_target,
                         std::uint64_t seed);

// Convenience for tests and experiments: same as build_atlas but with the
// chart means given explicitly.
ManifoldSpec make_spec(std::vector<Eigen::VectorXd> means,
                       Eigen::MatrixXd sigma);

EmpiricalSample sample_chart(const ChartGaussian& chart, std::int64_t m,
                             std::uint64_t seed);

// Draws one point following chart's law from an already-seeded stream.
Eigen::VectorXd draw_point(const ChartGaussian& chart, class Rng& rng);

// Same draw into caller storage; the hot Monte-Carlo loops reuse buffers.
void draw_point_into(const ChartGaussian& chart, class Rng& rng,
                     Eigen::VectorXd& z_scratch, Eigen::VectorXd& out);

// per_chart draws from every chart; chart i uses the sub-seed
// derive_seed(seed, chart_sample, i), so results are order-independent.
std::vector<EmpiricalSample> sample_mixture(const ManifoldSpec& spec,
                                            std::int64_t per_chart,
                                            std::uint64_t seed);

struct RelatednessReport {
  bool compatible = false;
  double margin = 0.0;  // min over probed triples of (cross - within)
};

// Empirical check of the compatibility assumption: for sampled triples with
// x, y from one chart and z from another, within-chart distance must not
// exceed cross-chart distance.
RelatednessReport inner_relatedness_check(const ManifoldSpec& spec,
                                          std::int64_t n_probe,
                                          std::uint64_t seed);

}  // namespace chartlab
