#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "chartlab/coupling.hpp"
#include "chartlab/generalization.hpp"
#include "chartlab/generator.hpp"
#include "chartlab/lk_metric.hpp"
#include "chartlab/manifold.hpp"

namespace chartlab {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m);   // array of rows
Eigen::MatrixXd matrix_from_json(const json& j);
json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

// {dimension, charts: [{index, mean}], covariance}
json to_json(const ManifoldSpec& spec);
ManifoldSpec manifold_from_json(const json& j);

// {value, stderr, n_used, form}
json to_json(const LkEstimate& e);

// {permutation, pieces: [{W, b}], anchors}; anchors carry the nearest-mean
// assignment rule so a deserialized generator is usable standalone.
json to_json(const PiecewiseAffineGenerator& g);
PiecewiseAffineGenerator generator_from_json(const json& j);

json to_json(const LocalizationReport& r);
json to_json(const LocalGlobalReport& r);
json to_json(const Thm3Report& r);

// Fixed 17-significant-digit decimal rendering used by every CSV emitter, so
// re-runs are byte-identical.
std::string fmt_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

void write_text_file(const std::string& path, const std::string& content);

std::string matrix_to_csv(const Eigen::MatrixXd& m);

}  // namespace chartlab
