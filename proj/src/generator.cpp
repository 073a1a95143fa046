#include "chartlab/generator.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "chartlab/rng.hpp"

namespace chartlab {

PiecewiseAffineGenerator::PiecewiseAffineGenerator(
    Permutation permutation, std::vector<AffinePiece> pieces,
    Eigen::MatrixXd anchors)
    : permutation_(std::move(permutation)),
      pieces_(std::move(pieces)),
      anchors_(std::move(anchors)) {
  const int k = permutation_.size();
  if (static_cast<int>(pieces_.size()) != k || anchors_.cols() != k) {
    throw std::invalid_argument("need exactly one piece and anchor per chart");
  }
  const auto d = anchors_.rows();
  for (const auto& piece : pieces_) {
    if (piece.weight.rows() != d || piece.weight.cols() != d ||
        piece.offset.size() != d) {
      throw std::invalid_argument("piece dimension mismatch");
    }
    if (!piece.weight.allFinite() || !piece.offset.allFinite()) {
      throw std::invalid_argument("piece parameters must be finite");
    }
  }
}

int PiecewiseAffineGenerator::piece_index(const Eigen::VectorXd& s) const {
  int best = 0;
  double best_dist = (s - anchors_.col(0)).squaredNorm();
  for (int i = 1; i < piece_count(); ++i) {
    const double dist = (s - anchors_.col(i)).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

Eigen::VectorXd PiecewiseAffineGenerator::apply(const Eigen::VectorXd& s) const {
  const auto& piece = pieces_[static_cast<std::size_t>(piece_index(s))];
  return piece.weight * s + piece.offset;
}

Eigen::MatrixXd PiecewiseAffineGenerator::apply_columns(
    const Eigen::MatrixXd& s) const {
  Eigen::MatrixXd out(s.rows(), s.cols());
  for (Eigen::Index c = 0; c < s.cols(); ++c) out.col(c) = apply(s.col(c));
  return out;
}

PiecewiseAffineGenerator ideal_generator(const ManifoldSpec& source,
                                         const ManifoldSpec& target,
                                         const Permutation& p) {
  const int k = source.chart_count();
  if (target.chart_count() != k || p.size() != k) {
    throw std::invalid_argument("chart count mismatch");
  }
  if (source.dimension != target.dimension) {
    throw std::invalid_argument("dimension mismatch");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> src(
      source.covariance()->matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tgt(
      target.covariance()->matrix());
  if (src.info() != Eigen::Success || tgt.info() != Eigen::Success) {
    throw std::runtime_error("covariance eigendecomposition failed");
  }
  // W = Sigma_N^{1/2} Sigma_M^{-1/2}: pushes N(x, Sigma_M) to N(Wx+b, Sigma_N).
  const Eigen::MatrixXd w = tgt.operatorSqrt() * src.operatorInverseSqrt();

  std::vector<AffinePiece> pieces;
  pieces.reserve(static_cast<std::size_t>(k));
  Eigen::MatrixXd anchors(source.dimension, k);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd& x = source.charts[static_cast<std::size_t>(i)].mean;
    const Eigen::VectorXd& y =
        target.charts[static_cast<std::size_t>(p(i))].mean;
    pieces.push_back(AffinePiece{w, y - w * x});
    anchors.col(i) = x;
  }
  return PiecewiseAffineGenerator(p, std::move(pieces), std::move(anchors));
}

namespace {
int nearest_target_chart(const ManifoldSpec& target, const Eigen::VectorXd& v) {
  int best = 0;
  double best_dist = (v - target.charts[0].mean).squaredNorm();
  for (int j = 1; j < target.chart_count(); ++j) {
    const double dist =
        (v - target.charts[static_cast<std::size_t>(j)].mean).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = j;
    }
  }
  return best;
}
}  // namespace

MembershipReport pti_membership(const PiecewiseAffineGenerator& g,
                                const ManifoldSpec& source,
                                const ManifoldSpec& target,
                                std::int64_t n_probe, double threshold,
                                std::uint64_t seed) {
  if (n_probe < 1) throw std::invalid_argument("n_probe must be >= 1");
  const int k = source.chart_count();
  std::int64_t violations = 0;
  for (int i = 0; i < k; ++i) {
    Rng rng(derive_seed(seed, seed_tag::membership_probe,
                        static_cast<std::uint64_t>(i)));
    const auto& chart = source.charts[static_cast<std::size_t>(i)];
    for (std::int64_t t = 0; t < n_probe; ++t) {
      const Eigen::VectorXd image = g.apply(draw_point(chart, rng));
      if (nearest_target_chart(target, image) != g.permutation()(i)) {
        ++violations;
      }
    }
  }
  const double rate = static_cast<double>(violations) /
                      static_cast<double>(n_probe * k);
  return MembershipReport{rate <= threshold, rate};
}

PairingInference infer_pti_index(const PiecewiseAffineGenerator& g,
                                 const ManifoldSpec& source,
                                 const ManifoldSpec& target,
                                 std::int64_t n_probe, double threshold,
                                 std::uint64_t seed) {
  if (n_probe < 1) throw std::invalid_argument("n_probe must be >= 1");
  const int k = source.chart_count();
  std::vector<int> majority(static_cast<std::size_t>(k), 0);
  std::int64_t off_majority = 0;
  for (int i = 0; i < k; ++i) {
    Rng rng(derive_seed(seed, seed_tag::membership_probe,
                        static_cast<std::uint64_t>(i)));
    const auto& chart = source.charts[static_cast<std::size_t>(i)];
    std::vector<std::int64_t> hits(static_cast<std::size_t>(k), 0);
    for (std::int64_t t = 0; t < n_probe; ++t) {
      const Eigen::VectorXd image = g.apply(draw_point(chart, rng));
      ++hits[static_cast<std::size_t>(nearest_target_chart(target, image))];
    }
    int best = 0;
    for (int j = 1; j < k; ++j) {
      if (hits[static_cast<std::size_t>(j)] >
          hits[static_cast<std::size_t>(best)]) {
        best = j;
      }
    }
    majority[static_cast<std::size_t>(i)] = best;
    off_majority += n_probe - hits[static_cast<std::size_t>(best)];
  }

  PairingInference out;
  out.violation_rate = static_cast<double>(off_majority) /
                       static_cast<double>(n_probe * k);
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  bool bijective = true;
  for (int v : majority) {
    if (seen[static_cast<std::size_t>(v)]) {
      bijective = false;
      break;
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
  if (bijective && out.violation_rate <= threshold) {
    out.pairing = Permutation(majority);
  }
  return out;
}

double lipschitz_estimate(const PiecewiseAffineGenerator& g,
                          std::int64_t n_pairs, const ManifoldSpec& region,
                          std::uint64_t seed) {
  if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
  const int k = region.chart_count();
  double best = 0.0;
  for (std::int64_t t = 0; t < n_pairs; ++t) {
    Rng rng(derive_seed(seed, seed_tag::lipschitz_pair,
                        static_cast<std::uint64_t>(t)));
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    const auto& chart = region.charts[static_cast<std::size_t>(i)];
    const Eigen::VectorXd s = draw_point(chart, rng);
    const Eigen::VectorXd s2 = draw_point(chart, rng);
    if (g.piece_index(s) != g.piece_index(s2)) continue;  // same-piece pairs only
    const double den = (s - s2).norm();
    if (den == 0.0) continue;
    best = std::max(best, (g.apply(s) - g.apply(s2)).norm() / den);
  }
  return best;
}

}  // namespace chartlab
