#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "chartlab/generator.hpp"
#include "chartlab/manifold.hpp"

namespace chartlab {

struct TrainConfig {
  double lambda = 0.0;      // identity-loss weight
  int steps = 1;            // 0 is allowed and leaves the initializer untouched
  double step_size = 0.05;
  std::int64_t batch = 64;  // per-chart draws per step
  std::uint64_t seed = 0;
  double init_scale = 0.1;  // spread of the initializer around identity pieces
  double fd_step = 1e-5;    // central finite-difference perturbation
  std::int64_t probe = 64;  // membership probes per chart per step
  double divergence_factor = 1e6;
};

struct TraceRow {
  int step = 0;
  double loss_adv = 0.0;
  double loss_l1 = 0.0;
  std::optional<Permutation> recovered;  // argmin coupling on the step batch
  std::optional<Permutation> pti_index;  // set while the generator is a member

  double combined(double lambda) const { return loss_adv + lambda * loss_l1; }
};

struct TrainTrace {
  std::vector<TraceRow> rows;
};

struct TrainResult {
  TrainTrace trace;
  PiecewiseAffineGenerator generator;
  bool diverged = false;
  int divergence_step = -1;
};

// Adversarial loss of the current generator: the solved-coupling objective on
// a fresh cost matrix, normalized by K^2.
double loss_adv(const PiecewiseAffineGenerator& g, const ManifoldSpec& source,
                const ManifoldSpec& target, std::int64_t batch,
                std::uint64_t seed);

// Identity loss against ground-truth pairing: chart i's source draws pair
// with chart i's target draws at equal sample index.
double loss_l1(const PiecewiseAffineGenerator& g,
               const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>&
                   paired_batch);

std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> draw_paired_batch(
    const ManifoldSpec& source, const ManifoldSpec& target, std::int64_t batch,
    std::uint64_t seed);

// Analytic gradient of loss_l1 with respect to piece offsets: per piece the
// mean of unit direction vectors (g(s) - t)/||g(s) - t|| over the samples the
// piece is responsible for. Returned as one d-vector per piece.
std::vector<Eigen::VectorXd> loss_l1_offset_gradient(
    const PiecewiseAffineGenerator& g,
    const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>&
        paired_batch);

// Plain gradient descent with central finite differences over all piece
// parameters, batches frozen within a step. Deterministic given config.seed.
TrainResult train(const TrainConfig& config, const ManifoldSpec& source,
                  const ManifoldSpec& target);

struct AttractorProbe {
  std::optional<int> first_entry;  // first step whose row is a member
  bool persisted = false;  // recovered stays at that p for every later step
};

AttractorProbe attractor_probe(const TrainTrace& trace);

}  // namespace chartlab
