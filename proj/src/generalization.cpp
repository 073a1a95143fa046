#include "chartlab/generalization.hpp"

#include <cmath>
#include <stdexcept>

#include "chartlab/kernels.hpp"
#include "chartlab/rng.hpp"

namespace chartlab {

namespace {

// Unbiased sample covariance trace; a single point counts as a point mass.
double sample_cov_trace(const Eigen::MatrixXd& points) {
  const auto n = points.cols();
  if (n < 2) return 0.0;
  const Eigen::VectorXd mean = points.rowwise().mean();
  double acc = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    acc += (points.col(c) - mean).squaredNorm();
  }
  return acc / static_cast<double>(n - 1);
}

std::vector<std::int64_t> split_counts(std::int64_t total, int k) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    counts[static_cast<std::size_t>(i)] =
        total / k + (i < static_cast<int>(total % k) ? 1 : 0);
  }
  return counts;
}

// Pair-sampled MC estimate of D_LK(empirical point set, mixture): one draw
// picks a uniform stored point and a fresh mixture point.
double mc_divergence_to_mixture(const std::vector<Eigen::MatrixXd>& point_sets,
                                const ManifoldSpec& mixture, std::int64_t n_mc,
                                std::uint64_t seed) {
  std::int64_t total = 0;
  for (const auto& s : point_sets) total += s.cols();
  const int k = mixture.chart_count();
  const auto stat = kernels::mc_moments(n_mc, seed, [&](Rng& rng) {
    std::int64_t idx =
        static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total)));
    std::size_t set = 0;
    while (idx >= point_sets[set].cols()) {
      idx -= point_sets[set].cols();
      ++set;
    }
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    thread_local Eigen::VectorXd z, t;
    draw_point_into(mixture.charts[static_cast<std::size_t>(j)], rng, z, t);
    return (point_sets[set].col(idx) - t).norm();
  });
  return stat.mean();
}

// Closed-form divergence of per-chart point sets (moment-summarized, 1/K
// weights) to the mixture.
double paper_divergence_to_mixture(
    const std::vector<Eigen::MatrixXd>& point_sets,
    const ManifoldSpec& mixture) {
  const int k = mixture.chart_count();
  const double tr_mix = mixture.covariance()->trace();
  double acc = 0.0;
  for (const auto& points : point_sets) {
    const Eigen::VectorXd mean = points.rowwise().mean();
    const double tr = sample_cov_trace(points);
    for (int j = 0; j < k; ++j) {
      acc += lk_paper_form_moments(
          mean, tr, mixture.charts[static_cast<std::size_t>(j)].mean, tr_mix);
    }
  }
  return acc / static_cast<double>(k * k);
}

}  // namespace

double adv_gap(const PiecewiseAffineGenerator& g, const ManifoldSpec& source,
               const ManifoldSpec& target, std::int64_t m, std::int64_t n,
               LkForm form, std::uint64_t seed) {
  const int k = source.chart_count();
  if (target.chart_count() != k) {
    throw std::invalid_argument("chart count mismatch");
  }
  if (m < k || n < k) {
    throw std::invalid_argument(
        "need at least one draw per chart for the 1/K-weighted evaluation");
  }
  if (form != LkForm::paper_closed && form != LkForm::monte_carlo) {
    throw std::invalid_argument("adv_gap supports paper_closed or monte_carlo");
  }

  const auto m_counts = split_counts(m, k);
  const auto n_counts = split_counts(n, k);

  std::vector<Eigen::MatrixXd> pushed;
  std::vector<Eigen::MatrixXd> baseline;
  pushed.reserve(static_cast<std::size_t>(k));
  baseline.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto src = sample_chart(
        source.charts[static_cast<std::size_t>(i)],
        m_counts[static_cast<std::size_t>(i)],
        derive_seed(seed, seed_tag::gap_push, static_cast<std::uint64_t>(i)));
    pushed.push_back(g.apply_columns(src.points));
    baseline.push_back(
        sample_chart(target.charts[static_cast<std::size_t>(i)],
                     n_counts[static_cast<std::size_t>(i)],
                     derive_seed(seed, seed_tag::gap_baseline,
                                 static_cast<std::uint64_t>(i)))
            .points);
  }

  if (form == LkForm::paper_closed) {
    return paper_divergence_to_mixture(pushed, target) -
           paper_divergence_to_mixture(baseline, target);
  }
  constexpr std::int64_t kGapMcDraws = 20000;
  const double term_push = mc_divergence_to_mixture(
      pushed, target, kGapMcDraws, derive_seed(seed, seed_tag::gap_reference, 0));
  const double term_base = mc_divergence_to_mixture(
      baseline, target, kGapMcDraws,
      derive_seed(seed, seed_tag::gap_reference, 1));
  return term_push - term_base;
}

double erm_risk(const PiecewiseAffineGenerator& g,
                const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>&
                    paired_samples) {
  if (paired_samples.empty()) {
    throw std::invalid_argument("paired samples must be non-empty");
  }
  double acc = 0.0;
  for (const auto& [src, tgt] : paired_samples) {
    if (src.cols() < 1 || tgt.cols() < 1) {
      throw std::invalid_argument("paired samples must be non-empty");
    }
    acc += kernels::pair_mean_distance(g.apply_columns(src), tgt);
  }
  return acc / static_cast<double>(paired_samples.size());
}

Thm2Result thm2_condition(double eps_classical, double eps_adv, double eta,
                          double d_target, double d_source, double m_g) {
  Thm2Result out;
  out.lhs = eps_classical - eps_adv + eta;
  out.rhs = d_target - m_g * d_source;
  out.satisfied = out.lhs < out.rhs;
  out.slack = out.rhs - out.lhs;
  if (!std::isfinite(out.lhs) || !std::isfinite(out.rhs)) {
    throw std::invalid_argument("condition inputs must be finite");
  }
  return out;
}

LocalGlobalReport eps_local_global(const ManifoldSpec& source, std::int64_t m,
                                   LkForm form, std::uint64_t seed,
                                   std::int64_t n_mc) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (form != LkForm::paper_closed && form != LkForm::monte_carlo) {
    throw std::invalid_argument(
        "eps_local_global supports paper_closed or monte_carlo");
  }
  const int k = source.chart_count();
  const auto samples =
      sample_mixture(source, m, derive_seed(seed, seed_tag::local_global, 0));

  LocalGlobalReport report;
  report.k = k;
  report.m = m;
  report.form = form;

  if (form == LkForm::paper_closed) {
    // Local: diagonal terms only. Global: the bilinear mixture expansion,
    // diagonal plus cross terms, each pair in closed form on sample moments.
    const double tr_true = source.covariance()->trace();
    double local = 0.0;
    double global = 0.0;
    for (int j = 0; j < k; ++j) {
      const auto& points = samples[static_cast<std::size_t>(j)].points;
      const Eigen::VectorXd mean = points.rowwise().mean();
      const double tr = sample_cov_trace(points);
      for (int i = 0; i < k; ++i) {
        const double pair = lk_paper_form_moments(
            source.charts[static_cast<std::size_t>(i)].mean, tr_true, mean, tr);
        global += pair;
        if (i == j) local += pair;
      }
    }
    report.eps_local = local / static_cast<double>(k);
    report.eps_global = global / static_cast<double>(k * k);
    if (k == 1) report.eps_global = report.eps_local;
    return report;
  }

  // Monte-Carlo path: fresh draws against the stored samples.
  double local = 0.0;
  for (int i = 0; i < k; ++i) {
    const auto& chart = source.charts[static_cast<std::size_t>(i)];
    const auto& points = samples[static_cast<std::size_t>(i)].points;
    const auto stat = kernels::mc_moments(
        n_mc,
        derive_seed(seed, seed_tag::local_global,
                    2 + static_cast<std::uint64_t>(i)),
        [&](Rng& rng) {
          const Eigen::VectorXd x = draw_point(chart, rng);
          const std::int64_t idx = static_cast<std::int64_t>(
              rng.below(static_cast<std::uint64_t>(points.cols())));
          return (x - points.col(idx)).norm();
        });
    local += stat.mean();
  }
  report.eps_local = local / static_cast<double>(k);

  if (k == 1) {
    report.eps_global = report.eps_local;
    return report;
  }
  std::vector<Eigen::MatrixXd> pooled;
  pooled.reserve(samples.size());
  for (const auto& s : samples) pooled.push_back(s.points);
  report.eps_global = mc_divergence_to_mixture(
      pooled, source, n_mc * k, derive_seed(seed, seed_tag::local_global, 1));
  return report;
}

double thm3_rhs_expression(double tr_sigma_m, double tr_sigma_n, double m_g,
                           std::int64_t n, std::int64_t m) {
  return std::sqrt(tr_sigma_n) / std::sqrt(static_cast<double>(m)) +
         2.0 * tr_sigma_n -
         m_g * (std::sqrt(tr_sigma_m) / std::sqrt(static_cast<double>(n)) +
                2.0 * tr_sigma_m);
}

double thm3_lhs_expression(double epsilon, double worst_pair_risk_sum,
                           std::int64_t n, std::int64_t m) {
  return epsilon +
         worst_pair_risk_sum / (static_cast<double>(n) * static_cast<double>(m));
}

Thm3Report thm3_sides(const PiecewiseAffineGenerator& g,
                      const ManifoldSpec& source, const ManifoldSpec& target,
                      std::int64_t n, std::int64_t m, double epsilon,
                      std::uint64_t seed) {
  const int k = source.chart_count();
  if (target.chart_count() != k) {
    throw std::invalid_argument("chart count mismatch");
  }
  if (n < 1 || m < 1) throw std::invalid_argument("n, m must be >= 1");
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");

  // Worst paired empirical risk over charts: n source draws against m target
  // draws per chart, summed (not averaged) as the condition states.
  double worst_sum = 0.0;
  for (int c = 0; c < k; ++c) {
    const auto src = sample_chart(
        source.charts[static_cast<std::size_t>(c)], n,
        derive_seed(seed, seed_tag::thm3_sample,
                    2 * static_cast<std::uint64_t>(c)));
    const auto tgt = sample_chart(
        target.charts[static_cast<std::size_t>(c)], m,
        derive_seed(seed, seed_tag::thm3_sample,
                    2 * static_cast<std::uint64_t>(c) + 1));
    const double mean =
        kernels::pair_mean_distance(g.apply_columns(src.points), tgt.points);
    worst_sum = std::max(
        worst_sum, mean * static_cast<double>(n) * static_cast<double>(m));
  }

  constexpr std::int64_t kLipschitzPairs = 20000;
  const double m_g = lipschitz_estimate(
      g, kLipschitzPairs, source, derive_seed(seed, seed_tag::lipschitz_pair));

  Thm3Report report;
  report.inputs = Thm3Inputs{epsilon,
                             n,
                             m,
                             source.covariance()->trace(),
                             target.covariance()->trace(),
                             m_g,
                             k};
  report.worst_pair_risk = worst_sum;
  report.lhs = thm3_lhs_expression(epsilon, worst_sum, n, m);
  report.rhs = thm3_rhs_expression(report.inputs.tr_sigma_m,
                                   report.inputs.tr_sigma_n, m_g, n, m);
  report.satisfied = report.lhs < report.rhs;
  return report;
}

MseReport estimator_mse_check(const ChartGaussian& chart, std::int64_t n_obs,
                              std::int64_t trials, std::uint64_t seed) {
  if (n_obs < 1) throw std::invalid_argument("n_obs must be >= 1");
  if (trials < 30) throw std::invalid_argument("need at least 30 trials");
  const int d = chart.dimension();
  const auto stat = kernels::mc_moments(
      trials, derive_seed(seed, seed_tag::mse_trial), [&](Rng& rng) {
        thread_local Eigen::VectorXd z, x;
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
        for (std::int64_t i = 0; i < n_obs; ++i) {
          draw_point_into(chart, rng, z, x);
          acc += x;
        }
        acc /= static_cast<double>(n_obs);
        return (acc - chart.mean).squaredNorm();
      });
  MseReport report;
  report.empirical_mse = stat.mean();
  report.predicted = chart.trace() / static_cast<double>(n_obs);
  report.ratio = report.empirical_mse / report.predicted;
  return report;
}

}  // namespace chartlab
