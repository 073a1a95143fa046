#include <doctest.h>

#include <cmath>

#include "chartlab/generalization.hpp"
#include "chartlab/rng.hpp"
#include "chartlab/trainer.hpp"

using namespace chartlab;

namespace {

ManifoldSpec scalar_spec(std::vector<double> means, double variance) {
  std::vector<Eigen::VectorXd> m;
  for (double v : means) m.push_back(Eigen::VectorXd::Constant(1, v));
  return make_spec(std::move(m), Eigen::MatrixXd::Identity(1, 1) * variance);
}

PiecewiseAffineGenerator scalar_identity(const ManifoldSpec& spec) {
  return ideal_generator(spec, spec, Permutation::identity(spec.chart_count()));
}

}  // namespace

TEST_CASE("erm risk hand cases") {
  const ManifoldSpec spec = scalar_spec({0.0}, 1.0);
  const auto g = scalar_identity(spec);

  Eigen::MatrixXd src(1, 1), tgt(1, 1);
  src << 0.0;
  tgt << 3.0;
  CHECK(erm_risk(g, {{src, tgt}}) == doctest::Approx(3.0));

  Eigen::MatrixXd src2(1, 2), tgt2(1, 1);
  src2 << 0.0, 2.0;
  tgt2 << 1.0;
  CHECK(erm_risk(g, {{src2, tgt2}}) == doctest::Approx(1.0));

  CHECK_THROWS_AS(erm_risk(g, {}), std::invalid_argument);
}

TEST_CASE("erm risk of an ideal generator on near-Dirac charts is tiny") {
  const ManifoldSpec source = scalar_spec({0.0, 10.0}, 1e-10);
  const ManifoldSpec target = scalar_spec({0.0, 10.0}, 1e-10);
  const auto g = ideal_generator(source, target, Permutation::identity(2));
  const auto paired = draw_paired_batch(source, target, 50, 3);
  CHECK(erm_risk(g, paired) < 1e-4);
}

TEST_CASE("condition arithmetic matches the worked example") {
  const Thm2Result r = thm2_condition(0.1, 0.5, 0.1, 1.0, 0.1, 1.0);
  CHECK(r.lhs == doctest::Approx(-0.3));
  CHECK(r.rhs == doctest::Approx(0.9));
  CHECK(r.satisfied);
  CHECK(r.slack == doctest::Approx(1.2));
}

TEST_CASE("the inequality is strict at the boundary") {
  const Thm2Result r = thm2_condition(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == 0.0);
  CHECK_FALSE(r.satisfied);
}

TEST_CASE("a large Lipschitz constant defeats the condition") {
  const Thm2Result r = thm2_condition(0.0, 0.0, 0.0, 1.0, 1.0, 10.0);
  CHECK(r.rhs == doctest::Approx(-9.0));
  CHECK_FALSE(r.satisfied);
}

TEST_CASE("condition monotonicity in its arguments") {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    const double ec = rng.uniform(), ea = rng.uniform(), eta = rng.uniform();
    const double dt = rng.uniform(), ds = rng.uniform(), mg = rng.uniform();
    const Thm2Result base = thm2_condition(ec, ea, eta, dt, ds, mg);
    if (!base.satisfied) {
      CHECK_FALSE(thm2_condition(ec + 0.5, ea, eta, dt, ds, mg).satisfied);
      CHECK_FALSE(thm2_condition(ec, ea, eta + 0.5, dt, ds, mg).satisfied);
    }
    if (base.satisfied) {
      CHECK(thm2_condition(ec, ea, eta, dt + 0.5, ds, mg).satisfied);
    }
  }
}

TEST_CASE("single chart: local equals global exactly under both forms") {
  const ManifoldSpec spec = scalar_spec({2.0}, 0.5);
  for (LkForm form : {LkForm::paper_closed, LkForm::monte_carlo}) {
    const auto r = eps_local_global(spec, 100, form, 5, 2000);
    CHECK(r.eps_local == r.eps_global);
  }
}

TEST_CASE("near-Dirac two-chart case pins the global scale") {
  const ManifoldSpec spec = scalar_spec({0.0, 10.0}, 1e-10);
  const auto paper = eps_local_global(spec, 10000, LkForm::paper_closed, 7);
  CHECK(paper.eps_local == doctest::Approx(0.0).epsilon(1e-4));
  // bilinear expansion: the two cross terms contribute 2 * 10 / K^2 = 5
  CHECK(paper.eps_global == doctest::Approx(5.0).epsilon(1e-3));

  const auto mc = eps_local_global(spec, 10000, LkForm::monte_carlo, 7, 40000);
  CHECK(mc.eps_local < 1e-4);
  CHECK(mc.eps_global == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("localization advantage holds exactly in closed form on separated specs") {
  for (int k : {2, 4, 8}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const ManifoldSpec spec = build_atlas(k, 2, 5.0, 0.5, seed);
      for (std::int64_t m : {10, 100}) {
        const auto r = eps_local_global(spec, m, LkForm::paper_closed, seed);
        CHECK(r.eps_local < r.eps_global);
      }
    }
  }
}

TEST_CASE("trace expression matches the worked arithmetic") {
  CHECK(thm3_rhs_expression(0.01, 1.0, 1.0, 100, 100) ==
        doctest::Approx(0.1 + 2.0 - (0.01 + 0.02)).epsilon(1e-12));
  CHECK(thm3_rhs_expression(10.0, 1.0, 2.0, 100, 100) < 0.0);
  CHECK(thm3_lhs_expression(0.5, 600.0, 10, 20) ==
        doctest::Approx(0.5 + 3.0).epsilon(1e-12));
}

TEST_CASE("trace expressions agree with an independently coded oracle") {
  Rng rng(23);
  for (int t = 0; t < 1000; ++t) {
    const double tr_m = rng.uniform() * 10.0;
    const double tr_n = rng.uniform() * 10.0;
    const double mg = rng.uniform() * 3.0;
    const auto n = static_cast<std::int64_t>(1 + rng.below(10000));
    const auto m = static_cast<std::int64_t>(1 + rng.below(10000));
    const double eps = rng.uniform();
    const double risk = rng.uniform() * 1000.0;

    // oracle coded from scratch, different operation order
    const double rhs_oracle =
        std::pow(static_cast<double>(m), -0.5) * std::pow(tr_n, 0.5) + tr_n +
        tr_n -
        (std::pow(static_cast<double>(n), -0.5) * std::pow(tr_m, 0.5) + tr_m +
         tr_m) *
            mg;
    const double lhs_oracle = eps + risk * (1.0 / static_cast<double>(n)) *
                                        (1.0 / static_cast<double>(m));

    CHECK(thm3_rhs_expression(tr_m, tr_n, mg, n, m) ==
          doctest::Approx(rhs_oracle).epsilon(1e-12));
    CHECK(thm3_lhs_expression(eps, risk, n, m) ==
          doctest::Approx(lhs_oracle).epsilon(1e-12));
  }
}

TEST_CASE("rhs is monotone decreasing in the source trace and in M_G") {
  double prev = std::numeric_limits<double>::infinity();
  for (double tr_m : {0.01, 0.1, 1.0, 5.0, 10.0}) {
    const double v = thm3_rhs_expression(tr_m, 1.0, 1.5, 100, 100);
    CHECK(v < prev);
    prev = v;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double mg : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    const double v = thm3_rhs_expression(0.5, 1.0, mg, 100, 100);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("thm3_sides on a favorable configuration") {
  const ManifoldSpec source = build_atlas(2, 2, 10.0, 0.01, 31);
  const ManifoldSpec target = build_atlas(2, 2, 10.0, 1.0, 32);
  const auto g = ideal_generator(source, target, Permutation::identity(2));
  const auto r = thm3_sides(g, source, target, 100, 100, 0.0, 33);
  CHECK(r.inputs.tr_sigma_m == doctest::Approx(0.01));
  CHECK(r.inputs.tr_sigma_n == doctest::Approx(1.0));
  CHECK(r.rhs == doctest::Approx(thm3_rhs_expression(
                     0.01, 1.0, r.inputs.m_g, 100, 100)).epsilon(1e-12));
  CHECK(r.lhs >= 0.0);
}

TEST_CASE("thm3_sides near the Dirac boundary") {
  const ManifoldSpec source = scalar_spec({0.0, 5.0}, 1e-10);
  const ManifoldSpec target = scalar_spec({0.0, 5.0}, 1e-10);
  const auto g = ideal_generator(source, target, Permutation::identity(2));
  const auto r = thm3_sides(g, source, target, 50, 50, 0.0, 35);
  CHECK(r.lhs == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(std::fabs(r.rhs) < 1e-4);
}

TEST_CASE("sample-mean MSE follows tr(Sigma)/N") {
  const ManifoldSpec spec = build_atlas(1, 2, 1.0, 2.0, 41);
  const auto r = estimator_mse_check(spec.charts[0], 100, 10000, 43);
  CHECK(r.predicted == doctest::Approx(0.02));
  CHECK(r.ratio > 0.95);
  CHECK(r.ratio < 1.05);
}

TEST_CASE("single observation: MSE is the full trace") {
  const ManifoldSpec spec = scalar_spec({0.0}, 1.0);
  const auto r = estimator_mse_check(spec.charts[0], 1, 10000, 47);
  CHECK(r.empirical_mse == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("doubling N halves the MSE") {
  const ManifoldSpec spec = build_atlas(1, 3, 1.0, 1.5, 53);
  const auto a = estimator_mse_check(spec.charts[0], 200, 10000, 59);
  const auto b = estimator_mse_check(spec.charts[0], 400, 10000, 61);
  CHECK(a.empirical_mse / b.empirical_mse == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("ideal-generator gap is small and shrinks with m") {
  const ManifoldSpec source = build_atlas(4, 2, 20.0, 0.01, 71);
  const ManifoldSpec target = build_atlas(4, 2, 20.0, 0.01, 72);
  const auto g = ideal_generator(source, target, Permutation::identity(4));
  const double small =
      adv_gap(g, source, target, 100, 100, LkForm::paper_closed, 3);
  const double big =
      adv_gap(g, source, target, 100000, 100000, LkForm::paper_closed, 3);
  CHECK(std::fabs(small) < 0.1);
  CHECK(std::fabs(big) < std::fabs(small));
}

TEST_CASE("a constant generator has a large positive gap") {
  // Collapsing onto an extremal chart mean: the pushforward's average
  // distance to the mixture exceeds the baseline's.
  const ManifoldSpec source = scalar_spec({0.0, 20.0, 40.0, 60.0}, 0.01);
  const ManifoldSpec target = source;
  std::vector<AffinePiece> pieces(
      4, AffinePiece{Eigen::MatrixXd::Zero(1, 1), target.charts[0].mean});
  Eigen::MatrixXd anchors(1, 4);
  anchors << 0.0, 20.0, 40.0, 60.0;
  const PiecewiseAffineGenerator g(Permutation::identity(4), pieces, anchors);
  const double gap =
      adv_gap(g, source, target, 1000, 1000, LkForm::paper_closed, 5);
  // push term = mean distance from 0 to the means (30); baseline ~ 25
  CHECK(gap == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("gap evaluation rejects undersized samples") {
  const ManifoldSpec source = build_atlas(4, 2, 5.0, 0.1, 75);
  const ManifoldSpec target = build_atlas(4, 2, 5.0, 0.1, 76);
  const auto g = ideal_generator(source, target, Permutation::identity(4));
  CHECK_THROWS_AS(adv_gap(g, source, target, 2, 100, LkForm::paper_closed, 1),
                  std::invalid_argument);
}
