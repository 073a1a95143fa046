#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace chartlab {

struct ManifoldSpec;
class PiecewiseAffineGenerator;

// Bijection on [K]. mapping[i] is the image of i.
class Permutation {
 public:
  explicit Permutation(std::vector<int> mapping);
  static Permutation identity(int k);

  int size() const { return static_cast<int>(mapping_.size()); }
  int operator()(int i) const { return mapping_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& mapping() const { return mapping_; }

  Permutation inverse() const;
  bool is_identity() const;
  std::string cycle_string() const;  // "(0 2)(1)" style, fixed points shown

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> mapping_;
};

// Chart-pair transport costs C^{ij} (row = source chart, column = target
// chart), estimated cell-wise with per-cell standard errors.
struct CostMatrix {
  Eigen::MatrixXd entries;
  Eigen::MatrixXd stderr_;
  std::int64_t n_per_pair = 0;

  int size() const { return static_cast<int>(entries.rows()); }
};

// Element of H(K): K x K nonnegative entries, every column summing to K.
class CouplingMatrix {
 public:
  static constexpr double kFeasibilityTol = 1e-9;

  explicit CouplingMatrix(Eigen::MatrixXd entries);  // validates membership
  static CouplingMatrix from_permutation(const Permutation& p);  // K * P_p

  const Eigen::MatrixXd& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.rows()); }

  // The permutation p with entries K at (i, p(i)), if this coupling has that
  // shape; nullopt otherwise.
  std::optional<Permutation> as_permutation() const;

 private:
  Eigen::MatrixXd entries_;
};

// sum_{ij} A^{ij} C^{ij}
double coupling_objective(const CostMatrix& c, const Eigen::MatrixXd& coupling);

// MC estimate of every C^{ij} = E||g(s) - t||, s ~ source chart i, t ~ target
// chart j, n_per_pair draws per cell; cell (i, j) runs on the sub-seed
// derive_seed(seed, cost_cell, i*K + j).
CostMatrix cost_matrix(const PiecewiseAffineGenerator& g,
                       const ManifoldSpec& source, const ManifoldSpec& target,
                       std::int64_t n_per_pair, std::uint64_t seed);

struct CouplingSolution {
  CouplingMatrix coupling;
  double objective = 0.0;
  // Defined when every row holds the minimum of exactly one column.
  std::optional<Permutation> permutation;
};

// Exact minimizer of <A, C> over H(K). The polytope factors over columns into
// scaled simplices, so each column puts its mass K on the cheapest row; ties
// break toward the lowest row index.
CouplingSolution solve_coupling(const CostMatrix& c);

// Oracle for the solver: best objective over n_candidates random points of
// H(K) (column-wise scaled exponential draws) plus all K! scaled permutation
// matrices when K <= 6.
double brute_force_coupling(const CostMatrix& c, std::int64_t n_candidates,
                            std::uint64_t seed);

struct LocalizationReport {
  std::optional<Permutation> recovered;  // from solve_coupling
  bool match = false;                    // recovered equals g's declared p
  double objective_eq14 = 0.0;           // solver objective
  double objective_eq16 = 0.0;           // K * sum_i C^{i, p(i)}, declared p
  double discrepancy = 0.0;  // eq16 - eq14; nonnegative up to rounding
  // Columns whose best and second-best cells differ by < 3 combined stderr;
  // a mismatch there is statistically indistinguishable from noise.
  std::vector<int> inconclusive_columns;

  bool conclusive() const { return inconclusive_columns.empty(); }
};

// Checks that the solved coupling equals K * P_p for the declared permutation
// and that the paired-chart objective agrees with the solver objective.
LocalizationReport verify_localization(const CostMatrix& c,
                                       const Permutation& declared);

// Sampling wrapper: estimates the cost matrix for g, then verifies against
// g's declared permutation.
LocalizationReport verify_localization(const PiecewiseAffineGenerator& g,
                                       const ManifoldSpec& source,
                                       const ManifoldSpec& target,
                                       std::int64_t n_per_pair,
                                       std::uint64_t seed);

}  // namespace chartlab
