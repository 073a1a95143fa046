#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "chartlab/coupling.hpp"
#include "chartlab/manifold.hpp"

namespace chartlab {

struct AffinePiece {
  Eigen::MatrixXd weight;  // d x d
  Eigen::VectorXd offset;  // d
};

// Piecewise-affine map with one piece per source chart. A point is routed to
// the piece of its nearest source-chart mean (Bayes rule under shared
// covariance and equal priors), then mapped by that piece's affine law.
class PiecewiseAffineGenerator {
 public:
  PiecewiseAffineGenerator(Permutation permutation,
                           std::vector<AffinePiece> pieces,
                           Eigen::MatrixXd anchors);  // anchors: d x K

  int piece_count() const { return static_cast<int>(pieces_.size()); }
  int dimension() const { return static_cast<int>(anchors_.rows()); }

  const Permutation& permutation() const { return permutation_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const Eigen::MatrixXd& anchors() const { return anchors_; }

  int piece_index(const Eigen::VectorXd& s) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& s) const;
  Eigen::MatrixXd apply_columns(const Eigen::MatrixXd& s) const;

 private:
  Permutation permutation_;
  std::vector<AffinePiece> pieces_;
  Eigen::MatrixXd anchors_;
};

// Canonical member of F_p: piece i pushes N(x_i, Sigma_M) exactly onto
// N(y_{p(i)}, Sigma_N) with W = Sigma_N^{1/2} Sigma_M^{-1/2} (symmetric
// roots) and b = y_{p(i)} - W x_i.
PiecewiseAffineGenerator ideal_generator(const ManifoldSpec& source,
                                         const ManifoldSpec& target,
                                         const Permutation& p);

struct MembershipReport {
  bool member = false;
  double violation_rate = 0.0;
};

inline constexpr double kMembershipThreshold = 0.01;

// Sampled relaxation of "G(U_i) inside V_{p(i)}": images of chart-i probes
// must land nearer target mean p(i) than any other target mean. True when
// the violation rate stays at or below the threshold.
MembershipReport pti_membership(const PiecewiseAffineGenerator& g,
                                const ManifoldSpec& source,
                                const ManifoldSpec& target,
                                std::int64_t n_probe, double threshold,
                                std::uint64_t seed);

struct PairingInference {
  std::optional<Permutation> pairing;  // majority target per source chart
  double violation_rate = 0.0;         // probes off their chart's majority
};

// Infers which family F_p the generator currently behaves like, without a
// declared p: per source chart, the majority target chart of probe images.
// pairing is set only if the majority map is a bijection and the violation
// rate stays at or below the threshold.
PairingInference infer_pti_index(const PiecewiseAffineGenerator& g,
                                 const ManifoldSpec& source,
                                 const ManifoldSpec& target,
                                 std::int64_t n_probe, double threshold,
                                 std::uint64_t seed);

// Empirical max of ||g(s) - g(s')|| / ||s - s'|| over sampled same-piece
// pairs; converges to the largest per-piece spectral norm from below.
double lipschitz_estimate(const PiecewiseAffineGenerator& g,
                          std::int64_t n_pairs, const ManifoldSpec& region,
                          std::uint64_t seed);

}  // namespace chartlab
