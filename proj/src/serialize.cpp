#include "chartlab/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace chartlab {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  }
  return v;
}

json to_json(const ManifoldSpec& spec) {
  json charts = json::array();
  for (const auto& chart : spec.charts) {
    charts.push_back(
        json{{"index", chart.index}, {"mean", vector_to_json(chart.mean)}});
  }
  return json{{"dimension", spec.dimension},
              {"charts", std::move(charts)},
              {"covariance", matrix_to_json(spec.covariance()->matrix())}};
}

ManifoldSpec manifold_from_json(const json& j) {
  const int d = j.at("dimension").get<int>();
  Eigen::MatrixXd sigma = matrix_from_json(j.at("covariance"));
  if (sigma.rows() != d) {
    throw std::invalid_argument("covariance dimension mismatch");
  }
  std::vector<std::pair<int, Eigen::VectorXd>> indexed;
  for (const auto& chart : j.at("charts")) {
    indexed.emplace_back(chart.at("index").get<int>(),
                         vector_from_json(chart.at("mean")));
  }
  // Serialized order is chart order; indices must be 0..K-1 and unique.
  std::vector<Eigen::VectorXd> means(indexed.size());
  std::vector<bool> seen(indexed.size(), false);
  for (auto& [idx, mean] : indexed) {
    if (idx < 0 || idx >= static_cast<int>(indexed.size()) ||
        seen[static_cast<std::size_t>(idx)]) {
      throw std::invalid_argument("chart indices must be unique in [K]");
    }
    seen[static_cast<std::size_t>(idx)] = true;
    means[static_cast<std::size_t>(idx)] = std::move(mean);
  }
  return make_spec(std::move(means), std::move(sigma));
}

json to_json(const LkEstimate& e) {
  return json{{"value", e.value},
              {"stderr", e.stderr_},
              {"n_used", e.n_used},
              {"form", to_string(e.form)}};
}

json to_json(const PiecewiseAffineGenerator& g) {
  json pieces = json::array();
  for (const auto& piece : g.pieces()) {
    pieces.push_back(json{{"W", matrix_to_json(piece.weight)},
                          {"b", vector_to_json(piece.offset)}});
  }
  return json{{"permutation", g.permutation().mapping()},
              {"pieces", std::move(pieces)},
              {"anchors", matrix_to_json(g.anchors())}};
}

PiecewiseAffineGenerator generator_from_json(const json& j) {
  Permutation p(j.at("permutation").get<std::vector<int>>());
  std::vector<AffinePiece> pieces;
  for (const auto& piece : j.at("pieces")) {
    pieces.push_back(AffinePiece{matrix_from_json(piece.at("W")),
                                 vector_from_json(piece.at("b"))});
  }
  return PiecewiseAffineGenerator(std::move(p), std::move(pieces),
                                  matrix_from_json(j.at("anchors")));
}

json to_json(const LocalizationReport& r) {
  json out{{"match", r.match},
           {"objective_eq14", r.objective_eq14},
           {"objective_eq16", r.objective_eq16},
           {"discrepancy", r.discrepancy},
           {"inconclusive_columns", r.inconclusive_columns}};
  if (r.recovered.has_value()) {
    out["recovered_permutation"] = r.recovered->mapping();
  } else {
    out["recovered_permutation"] = nullptr;
  }
  return out;
}

json to_json(const LocalGlobalReport& r) {
  return json{{"eps_local", r.eps_local},
              {"eps_global", r.eps_global},
              {"k", r.k},
              {"m", r.m},
              {"lk_form", to_string(r.form)}};
}

json to_json(const Thm3Report& r) {
  return json{{"lhs", r.lhs},
              {"rhs", r.rhs},
              {"satisfied", r.satisfied},
              {"worst_pair_risk", r.worst_pair_risk},
              {"inputs",
               json{{"epsilon", r.inputs.epsilon},
                    {"n", r.inputs.n},
                    {"m", r.inputs.m},
                    {"tr_sigma_M", r.inputs.tr_sigma_m},
                    {"tr_sigma_N", r.inputs.tr_sigma_n},
                    {"M_G", r.inputs.m_g},
                    {"K", r.inputs.k}}}};
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += fmt_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace chartlab
