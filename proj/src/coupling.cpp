#include "chartlab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "chartlab/generator.hpp"
#include "chartlab/kernels.hpp"
#include "chartlab/manifold.hpp"
#include "chartlab/rng.hpp"

namespace chartlab {

Permutation::Permutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
  const int k = static_cast<int>(mapping_.size());
  if (k < 1) throw std::invalid_argument("permutation must be non-empty");
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  for (int v : mapping_) {
    if (v < 0 || v >= k || seen[static_cast<std::size_t>(v)]) {
      throw std::invalid_argument("mapping is not a bijection on [K]");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(int k) {
  std::vector<int> m(static_cast<std::size_t>(k));
  std::iota(m.begin(), m.end(), 0);
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(mapping_.size());
  for (int i = 0; i < size(); ++i) {
    inv[static_cast<std::size_t>(mapping_[static_cast<std::size_t>(i)])] = i;
  }
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const {
  for (int i = 0; i < size(); ++i) {
    if ((*this)(i) != i) return false;
  }
  return true;
}

std::string Permutation::cycle_string() const {
  std::ostringstream out;
  std::vector<bool> done(mapping_.size(), false);
  for (int start = 0; start < size(); ++start) {
    if (done[static_cast<std::size_t>(start)]) continue;
    out << '(';
    int i = start;
    bool first = true;
    do {
      if (!first) out << ' ';
      out << i;
      done[static_cast<std::size_t>(i)] = true;
      i = (*this)(i);
      first = false;
    } while (i != start);
    out << ')';
  }
  return out.str();
}

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd entries)
    : entries_(std::move(entries)) {
  const auto k = entries_.rows();
  if (k < 1 || entries_.cols() != k) {
    throw std::invalid_argument("coupling must be square and non-empty");
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    double col_sum = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (entries_(i, j) < 0.0) {
        throw std::invalid_argument("coupling entries must be nonnegative");
      }
      col_sum += entries_(i, j);
    }
    if (std::fabs(col_sum - static_cast<double>(k)) > kFeasibilityTol) {
      throw std::invalid_argument("coupling column sums must equal K");
    }
  }
}

CouplingMatrix CouplingMatrix::from_permutation(const Permutation& p) {
  const int k = p.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) a(i, p(i)) = static_cast<double>(k);
  return CouplingMatrix(std::move(a));
}

std::optional<Permutation> CouplingMatrix::as_permutation() const {
  const int k = size();
  std::vector<int> mapping(static_cast<std::size_t>(k), -1);
  for (int i = 0; i < k; ++i) {
    int hit = -1;
    for (int j = 0; j < k; ++j) {
      const double v = entries_(i, j);
      if (v == 0.0) continue;
      if (v != static_cast<double>(k) || hit >= 0) return std::nullopt;
      hit = j;
    }
    if (hit < 0) return std::nullopt;
    mapping[static_cast<std::size_t>(i)] = hit;
  }
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  for (int v : mapping) {
    if (seen[static_cast<std::size_t>(v)]) return std::nullopt;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return Permutation(std::move(mapping));
}

double coupling_objective(const CostMatrix& c, const Eigen::MatrixXd& coupling) {
  return (c.entries.array() * coupling.array()).sum();
}

CostMatrix cost_matrix(const PiecewiseAffineGenerator& g,
                       const ManifoldSpec& source, const ManifoldSpec& target,
                       std::int64_t n_per_pair, std::uint64_t seed) {
  const int k = source.chart_count();
  if (target.chart_count() != k) {
    throw std::invalid_argument("source and target must have equal chart counts");
  }
  if (source.dimension != target.dimension ||
      g.dimension() != source.dimension) {
    throw std::invalid_argument("dimension mismatch");
  }
  if (n_per_pair < 2) throw std::invalid_argument("n_per_pair must be >= 2");

  CostMatrix c;
  c.entries.resize(k, k);
  c.stderr_.resize(k, k);
  c.n_per_pair = n_per_pair;
  // Cells are independent MC jobs; each owns the stream (seed, i*K + j).
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const std::uint64_t cell_seed = derive_seed(
          seed, seed_tag::cost_cell, static_cast<std::uint64_t>(i * k + j));
      const auto& si = source.charts[static_cast<std::size_t>(i)];
      const auto& tj = target.charts[static_cast<std::size_t>(j)];
      const auto stat =
          kernels::mc_moments(n_per_pair, cell_seed, [&](Rng& rng) {
            thread_local Eigen::VectorXd z, s, t;
            draw_point_into(si, rng, z, s);
            draw_point_into(tj, rng, z, t);
            return (g.apply(s) - t).norm();
          });
      c.entries(i, j) = stat.mean();
      c.stderr_(i, j) = stat.stderr_of_mean();
      // non-finite draws survive the reduction, so one check covers the cell
      if (!std::isfinite(c.entries(i, j))) {
        throw std::runtime_error(
            "cost_matrix: generator produced a non-finite output");
      }
    }
  }
  return c;
}

CouplingSolution solve_coupling(const CostMatrix& c) {
  const int k = c.size();
  if (!c.entries.allFinite()) {
    throw std::invalid_argument("cost matrix must be finite");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  double objective = 0.0;
  std::vector<int> best_row(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    int arg = 0;
    for (int i = 1; i < k; ++i) {
      if (c.entries(i, j) < c.entries(arg, j)) arg = i;  // ties keep lowest i
    }
    best_row[static_cast<std::size_t>(j)] = arg;
    a(arg, j) = static_cast<double>(k);
    objective += static_cast<double>(k) * c.entries(arg, j);
  }
  CouplingSolution out{CouplingMatrix(std::move(a)), objective, std::nullopt};
  out.permutation = out.coupling.as_permutation();
  return out;
}

double brute_force_coupling(const CostMatrix& c, std::int64_t n_candidates,
                            std::uint64_t seed) {
  const int k = c.size();
  if (n_candidates < 1) throw std::invalid_argument("need n_candidates >= 1");
  double best = std::numeric_limits<double>::infinity();

  // Random interior/boundary points of H(K): each column is an exponential
  // draw normalized to sum K. Routing them through CouplingMatrix keeps the
  // feasibility invariant checked on every candidate.
  for (std::int64_t t = 0; t < n_candidates; ++t) {
    Rng rng(derive_seed(seed, seed_tag::dirichlet_candidate,
                        static_cast<std::uint64_t>(t)));
    Eigen::MatrixXd a(k, k);
    for (int j = 0; j < k; ++j) {
      double col_sum = 0.0;
      for (int i = 0; i < k; ++i) {
        a(i, j) = -std::log(rng.uniform_pos());
        col_sum += a(i, j);
      }
      for (int i = 0; i < k; ++i) a(i, j) *= static_cast<double>(k) / col_sum;
    }
    best = std::min(best, coupling_objective(c, CouplingMatrix(a).entries()));
  }

  // All scaled permutation matrices while K! is small.
  if (k <= 6) {
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double obj = 0.0;
      for (int i = 0; i < k; ++i) {
        obj += static_cast<double>(k) *
               c.entries(i, perm[static_cast<std::size_t>(i)]);
      }
      best = std::min(best, obj);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return best;
}

LocalizationReport verify_localization(const CostMatrix& c,
                                       const Permutation& declared) {
  const int k = c.size();
  if (declared.size() != k) {
    throw std::invalid_argument("declared permutation size mismatch");
  }
  const CouplingSolution solution = solve_coupling(c);

  LocalizationReport report;
  report.recovered = solution.permutation;
  report.objective_eq14 = solution.objective;
  double paired = 0.0;
  for (int i = 0; i < k; ++i) paired += c.entries(i, declared(i));
  report.objective_eq16 = static_cast<double>(k) * paired;
  report.discrepancy = report.objective_eq16 - report.objective_eq14;
  report.match =
      solution.permutation.has_value() && *solution.permutation == declared;

  // Flag columns whose minimum is not separated from the runner-up by three
  // combined standard errors; the argmin there is statistically unresolved.
  for (int j = 0; j < k && k > 1; ++j) {
    int arg = 0;
    for (int i = 1; i < k; ++i) {
      if (c.entries(i, j) < c.entries(arg, j)) arg = i;
    }
    bool flagged = false;
    for (int i = 0; i < k; ++i) {
      if (i == arg) continue;
      const double gap = c.entries(i, j) - c.entries(arg, j);
      const double combined = 3.0 * std::hypot(c.stderr_(i, j), c.stderr_(arg, j));
      if (gap < combined) flagged = true;
    }
    if (flagged) report.inconclusive_columns.push_back(j);
  }
  return report;
}

LocalizationReport verify_localization(const PiecewiseAffineGenerator& g,
                                       const ManifoldSpec& source,
                                       const ManifoldSpec& target,
                                       std::int64_t n_per_pair,
                                       std::uint64_t seed) {
  return verify_localization(cost_matrix(g, source, target, n_per_pair, seed),
                             g.permutation());
}

}  // namespace chartlab
