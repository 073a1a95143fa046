#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "chartlab/manifold.hpp"

namespace chartlab {

enum class LkForm { paper_closed, empirical, monte_carlo, exact_1d };

const char* to_string(LkForm form);
LkForm lk_form_from_string(const std::string& name);

struct LkEstimate {
  double value = 0.0;
  double stderr_ = 0.0;  // 0 for closed forms
  std::int64_t n_used = 0;
  LkForm form = LkForm::paper_closed;
};

// Closed form for Gaussians: ||x - y|| + tr(Sigma_a + Sigma_b). Note this is
// not E||X - Y||; exact_1d quantifies the gap in one dimension.
LkEstimate lk_paper_form(const ChartGaussian& a, const ChartGaussian& b);

// Same closed form evaluated on raw moments, for empirical measures
// summarized by (mean, covariance-trace).
double lk_paper_form_moments(const Eigen::VectorXd& mean_a, double trace_a,
                             const Eigen::VectorXd& mean_b, double trace_b);

// Exact double sum over two point sets (columns): mean of ||a_i - b_j||.
LkEstimate lk_empirical(const Eigen::MatrixXd& sa, const Eigen::MatrixXd& sb);

// Unbiased MC estimate of E||X - Y||, X ~ a, Y ~ b independent. Arguments are
// canonicalized by chart_less before sampling so the estimate is exactly
// symmetric under swap.
LkEstimate lk_monte_carlo(const ChartGaussian& a, const ChartGaussian& b,
                          std::int64_t n, std::uint64_t seed);

// Folded-normal mean: E|Z| for Z ~ N(mean, stddev^2).
double folded_normal_mean(double mean, double stddev);

// Exact E||X - Y|| for scalar Gaussians (d = 1 only): folded-normal mean with
// m = x_a - x_b and s^2 = var_a + var_b. Independent oracle for the MC path
// and for auditing the paper closed form.
LkEstimate lk_exact_1d(const ChartGaussian& a, const ChartGaussian& b);

}  // namespace chartlab
