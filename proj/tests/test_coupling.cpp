#include <doctest.h>

#include <cmath>

#include "chartlab/coupling.hpp"
#include "chartlab/generator.hpp"
#include "chartlab/manifold.hpp"
#include "chartlab/rng.hpp"

using namespace chartlab;

namespace {

CostMatrix make_cost(const Eigen::MatrixXd& entries) {
  CostMatrix c;
  c.entries = entries;
  c.stderr_ = Eigen::MatrixXd::Zero(entries.rows(), entries.cols());
  c.n_per_pair = 0;
  return c;
}

Eigen::MatrixXd random_cost(int k, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd c(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) c(i, j) = 10.0 * rng.uniform();
  }
  return c;
}

}  // namespace

TEST_CASE("permutation validates bijectivity") {
  CHECK_THROWS_AS(Permutation({0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation({0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation(std::vector<int>{}), std::invalid_argument);
  const Permutation p({1, 2, 0});
  CHECK(p.inverse().mapping() == std::vector<int>{2, 0, 1});
  CHECK(Permutation::identity(3).is_identity());
  CHECK_FALSE(p.is_identity());
  CHECK(p.cycle_string() == "(0 1 2)");
  CHECK(Permutation({1, 0, 2}).cycle_string() == "(0 1)(2)");
}

TEST_CASE("coupling matrix validates H(K) membership") {
  Eigen::MatrixXd ok(2, 2);
  ok << 2.0, 0.5, 0.0, 1.5;
  CHECK_NOTHROW(CouplingMatrix{ok});

  Eigen::MatrixXd bad_sum(2, 2);
  bad_sum << 1.0, 1.0, 0.5, 1.0;
  CHECK_THROWS_AS(CouplingMatrix{bad_sum}, std::invalid_argument);

  Eigen::MatrixXd negative(2, 2);
  negative << 3.0, 2.0, -1.0, 0.0;
  CHECK_THROWS_AS(CouplingMatrix{negative}, std::invalid_argument);
}

TEST_CASE("permutation couplings round-trip") {
  const Permutation p({2, 0, 1});
  const CouplingMatrix a = CouplingMatrix::from_permutation(p);
  REQUIRE(a.as_permutation().has_value());
  CHECK(*a.as_permutation() == p);
  for (int j = 0; j < 3; ++j) {
    CHECK(a.entries().col(j).sum() == doctest::Approx(3.0));
  }
}

TEST_CASE("solver picks the diagonal optimum") {
  Eigen::MatrixXd c(2, 2);
  c << 0.0, 5.0, 5.0, 0.0;
  const auto sol = solve_coupling(make_cost(c));
  CHECK(sol.objective == doctest::Approx(0.0));
  CHECK(sol.coupling.entries()(0, 0) == 2.0);
  CHECK(sol.coupling.entries()(1, 1) == 2.0);
  CHECK(sol.coupling.entries()(0, 1) == 0.0);
  REQUIRE(sol.permutation.has_value());
  CHECK(sol.permutation->is_identity());
}

TEST_CASE("ties break toward the lowest row index") {
  Eigen::MatrixXd c(2, 2);
  c << 1.0, 1.0, 1.0, 1.0;
  const auto sol = solve_coupling(make_cost(c));
  CHECK(sol.objective == doctest::Approx(4.0));
  CHECK(sol.coupling.entries()(0, 0) == 2.0);
  CHECK(sol.coupling.entries()(0, 1) == 2.0);
  CHECK(sol.coupling.entries()(1, 0) == 0.0);
  CHECK_FALSE(sol.permutation.has_value());  // both columns hit row 0
}

TEST_CASE("three-chart cyclic cost solves to the scaled identity") {
  Eigen::MatrixXd c(3, 3);
  c << 0.0, 3.0, 9.0, 9.0, 0.0, 3.0, 3.0, 9.0, 0.0;
  const auto sol = solve_coupling(make_cost(c));
  CHECK(sol.objective == doctest::Approx(0.0));
  CHECK(sol.coupling.entries().isApprox(3.0 * Eigen::MatrixXd::Identity(3, 3)));
}

TEST_CASE("solver rejects non-finite costs") {
  Eigen::MatrixXd c(2, 2);
  c << 0.0, std::numeric_limits<double>::infinity(), 1.0, 1.0;
  CHECK_THROWS_AS(solve_coupling(make_cost(c)), std::invalid_argument);
}

TEST_CASE("brute force never beats the closed-form solve") {
  for (int k = 2; k <= 6; ++k) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto c = make_cost(random_cost(k, derive_seed(seed, 0x99, k)));
      const double exact = solve_coupling(c).objective;
      const double best = brute_force_coupling(c, 2000, seed);
      CHECK(best >= exact - 1e-9);
    }
  }
}

TEST_CASE("a feasible but suboptimal candidate scores worse") {
  Eigen::MatrixXd c(2, 2);
  c << 0.0, 5.0, 5.0, 0.0;
  Eigen::MatrixXd uniform(2, 2);
  uniform << 1.0, 1.0, 1.0, 1.0;
  CHECK(coupling_objective(make_cost(c), uniform) == doctest::Approx(10.0));
  CHECK(coupling_objective(make_cost(c), uniform) >
        solve_coupling(make_cost(c)).objective);
}

TEST_CASE("column permutation of costs permutes the solved coupling") {
  const int k = 4;
  const Eigen::MatrixXd base = random_cost(k, 1234);  // generic, no ties
  const Permutation q({2, 0, 3, 1});
  Eigen::MatrixXd permuted(k, k);
  for (int j = 0; j < k; ++j) permuted.col(q(j)) = base.col(j);
  const auto sol_base = solve_coupling(make_cost(base));
  const auto sol_perm = solve_coupling(make_cost(permuted));
  for (int j = 0; j < k; ++j) {
    CHECK(sol_perm.coupling.entries().col(q(j)) ==
          sol_base.coupling.entries().col(j));
  }
}

TEST_CASE("localization verifies an ideal generator on separated charts") {
  const ManifoldSpec source = build_atlas(4, 2, 20.0, 0.01, 41);
  const ManifoldSpec target = build_atlas(4, 2, 20.0, 0.01, 42);
  const Permutation p({1, 2, 3, 0});
  const auto g = ideal_generator(source, target, p);
  const auto report = verify_localization(g, source, target, 4000, 43);
  REQUIRE(report.recovered.has_value());
  CHECK(*report.recovered == p);
  CHECK(report.match);
  CHECK(report.conclusive());
  CHECK(report.discrepancy == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(report.objective_eq14 == doctest::Approx(report.objective_eq16));
}

TEST_CASE("recovery holds whenever the relatedness margin dominates cell noise") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const ManifoldSpec source =
        build_atlas(4, 2, 20.0, 0.01, derive_seed(seed, 0x51));
    const ManifoldSpec target =
        build_atlas(4, 2, 20.0, 0.01, derive_seed(seed, 0x52));
    const Permutation p({3, 0, 1, 2});
    const auto g = ideal_generator(source, target, p);
    const CostMatrix c =
        cost_matrix(g, source, target, 4000, derive_seed(seed, 0x53));
    const double margin =
        inner_relatedness_check(target, 4000, derive_seed(seed, 0x54)).margin;
    if (margin > 6.0 * c.stderr_.maxCoeff()) {
      const auto report = verify_localization(c, p);
      CHECK(report.match);
    }
  }
}

TEST_CASE("single-chart localization is trivially matched") {
  const ManifoldSpec source = build_atlas(1, 2, 1.0, 0.1, 44);
  const ManifoldSpec target = build_atlas(1, 2, 1.0, 0.1, 45);
  const auto g = ideal_generator(source, target, Permutation::identity(1));
  const auto report = verify_localization(g, source, target, 500, 46);
  CHECK(report.match);
}

TEST_CASE("overlapping charts are reported, not asserted") {
  const ManifoldSpec source = build_atlas(3, 2, 0.1, 10.0, 47);
  const ManifoldSpec target = build_atlas(3, 2, 0.1, 10.0, 48);
  const auto g = ideal_generator(source, target, Permutation::identity(3));
  const auto report = verify_localization(g, source, target, 400, 49);
  // With overlap this can legitimately mismatch; it must flag the noise.
  if (!report.match) CHECK_FALSE(report.conclusive());
}

TEST_CASE("near-Dirac cost matrices show the separation structure") {
  const ManifoldSpec source = make_spec(
      {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 10.0)},
      Eigen::MatrixXd::Identity(1, 1) * 1e-12);
  const ManifoldSpec target = make_spec(
      {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 10.0)},
      Eigen::MatrixXd::Identity(1, 1) * 1e-12);
  const auto g = ideal_generator(source, target, Permutation::identity(2));
  const auto c = cost_matrix(g, source, target, 100, 50);
  CHECK(c.entries(0, 0) == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(c.entries(1, 1) == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(c.entries(0, 1) == doctest::Approx(10.0).epsilon(1e-5));
  CHECK(c.entries(1, 0) == doctest::Approx(10.0).epsilon(1e-5));
}

TEST_CASE("overflowing generator output is reported") {
  const ManifoldSpec spec = make_spec(
      {Eigen::VectorXd::Constant(1, 1.0)}, Eigen::MatrixXd::Identity(1, 1));
  std::vector<AffinePiece> pieces = {AffinePiece{
      Eigen::MatrixXd::Constant(1, 1, 1e308), Eigen::VectorXd::Zero(1)}};
  const PiecewiseAffineGenerator g(Permutation::identity(1), pieces,
                                   spec.charts[0].mean);
  CHECK_THROWS_AS(cost_matrix(g, spec, spec, 16, 3), std::runtime_error);
}

TEST_CASE("single-chart Dirac identity has vanishing transport cost") {
  const ManifoldSpec spec = make_spec({Eigen::VectorXd::Zero(2)},
                                      Eigen::MatrixXd::Identity(2, 2) * 1e-12);
  const auto g = ideal_generator(spec, spec, Permutation::identity(1));
  const auto c = cost_matrix(g, spec, spec, 100, 57);
  CHECK(c.entries(0, 0) == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("constant generator produces the column structure") {
  const ManifoldSpec source = make_spec(
      {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 10.0)},
      Eigen::MatrixXd::Identity(1, 1) * 1e-12);
  const auto& target = source;
  // Both pieces map everything to target mean y_0 = 0.
  std::vector<AffinePiece> pieces(2, AffinePiece{Eigen::MatrixXd::Zero(1, 1),
                                                 Eigen::VectorXd::Zero(1)});
  Eigen::MatrixXd anchors(1, 2);
  anchors << 0.0, 10.0;
  const PiecewiseAffineGenerator g(Permutation::identity(2), pieces, anchors);
  const auto c = cost_matrix(g, source, target, 100, 51);
  CHECK(c.entries(0, 0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(c.entries(1, 0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(c.entries(0, 1) == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(c.entries(1, 1) == doctest::Approx(10.0).epsilon(1e-6));
}
