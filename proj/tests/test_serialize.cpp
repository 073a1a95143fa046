#include <doctest.h>

#include "chartlab/serialize.hpp"

using namespace chartlab;

TEST_CASE("manifold JSON round trip is exact") {
  const ManifoldSpec spec = build_atlas(3, 2, 2.5, 0.7, 91);
  const json j = to_json(spec);
  CHECK(j.contains("dimension"));
  CHECK(j.contains("charts"));
  CHECK(j.contains("covariance"));

  const ManifoldSpec back = manifold_from_json(json::parse(j.dump()));
  CHECK(back.dimension == spec.dimension);
  REQUIRE(back.chart_count() == spec.chart_count());
  for (int i = 0; i < spec.chart_count(); ++i) {
    CHECK(back.charts[i].mean == spec.charts[i].mean);
    CHECK(back.charts[i].index == spec.charts[i].index);
  }
  CHECK(back.covariance()->matrix() == spec.covariance()->matrix());
  CHECK(back.separation == spec.separation);
}

TEST_CASE("manifold JSON validation") {
  const json bad{{"dimension", 2},
                 {"charts", json::array({json{{"index", 0},
                                              {"mean", {0.0, 0.0}}},
                                         json{{"index", 0},
                                              {"mean", {1.0, 1.0}}}})},
                 {"covariance", {{1.0, 0.0}, {0.0, 1.0}}}};
  CHECK_THROWS_AS(manifold_from_json(bad), std::invalid_argument);
}

TEST_CASE("generator JSON round trip is exact") {
  const ManifoldSpec source = build_atlas(3, 2, 3.0, 0.4, 92);
  const ManifoldSpec target = build_atlas(3, 2, 3.0, 0.9, 93);
  const auto g = ideal_generator(source, target, Permutation({2, 0, 1}));
  const auto back = generator_from_json(json::parse(to_json(g).dump()));
  CHECK(back.permutation() == g.permutation());
  CHECK(back.anchors() == g.anchors());
  for (int i = 0; i < 3; ++i) {
    CHECK(back.pieces()[i].weight == g.pieces()[i].weight);
    CHECK(back.pieces()[i].offset == g.pieces()[i].offset);
  }
}

TEST_CASE("estimate JSON carries the form tag") {
  const LkEstimate e{1.5, 0.01, 1000, LkForm::monte_carlo};
  const json j = to_json(e);
  CHECK(j.at("value") == 1.5);
  CHECK(j.at("stderr") == 0.01);
  CHECK(j.at("n_used") == 1000);
  CHECK(j.at("form") == "monte_carlo");
}

TEST_CASE("double formatting has 17 significant digits and round-trips") {
  CHECK(fmt_double(0.1) == "0.10000000000000001");
  CHECK(fmt_double(1.0) == "1");
  const double value = 3.0172457286495611;
  CHECK(std::stod(fmt_double(value)) == value);
}

TEST_CASE("csv assembly is stable") {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows.push_back({"1", "2"});
  t.rows.push_back({"3", "4"});
  CHECK(t.to_string() == "a,b\n1,2\n3,4\n");

  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  CHECK(matrix_to_csv(m) == "1,2\n3,4\n");
}
