#include "chartlab/trainer.hpp"

#include <cmath>
#include <stdexcept>

#include "chartlab/coupling.hpp"
#include "chartlab/rng.hpp"

namespace chartlab {

namespace {

struct StepBatch {
  std::vector<Eigen::MatrixXd> src;  // per chart, d x batch
  std::vector<Eigen::MatrixXd> tgt;  // per chart, d x batch, column-paired
};

StepBatch draw_step_batch(const ManifoldSpec& source,
                          const ManifoldSpec& target, std::int64_t batch,
                          std::uint64_t seed) {
  const int k = source.chart_count();
  StepBatch out;
  out.src.reserve(static_cast<std::size_t>(k));
  out.tgt.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    out.src.push_back(sample_chart(source.charts[static_cast<std::size_t>(i)],
                                   batch,
                                   derive_seed(seed, seed_tag::chart_sample,
                                               2 * static_cast<std::uint64_t>(i)))
                          .points);
    out.tgt.push_back(
        sample_chart(target.charts[static_cast<std::size_t>(i)], batch,
                     derive_seed(seed, seed_tag::chart_sample,
                                 2 * static_cast<std::uint64_t>(i) + 1))
            .points);
  }
  return out;
}

// Frozen-batch losses: cost cell (i, j) pairs chart i's source draws with
// chart j's target draws column by column.
struct StepLosses {
  double adv = 0.0;
  double l1 = 0.0;
  CostMatrix cost;
};

StepLosses eval_step(const PiecewiseAffineGenerator& g, const StepBatch& batch) {
  const int k = static_cast<int>(batch.src.size());
  const auto b = batch.src.front().cols();

  std::vector<Eigen::MatrixXd> images;
  images.reserve(batch.src.size());
  for (const auto& s : batch.src) images.push_back(g.apply_columns(s));

  StepLosses out;
  out.cost.entries.resize(k, k);
  out.cost.stderr_.setZero(k, k);
  out.cost.n_per_pair = b;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double acc = 0.0;
      for (Eigen::Index l = 0; l < b; ++l) {
        acc += (images[static_cast<std::size_t>(i)].col(l) -
                batch.tgt[static_cast<std::size_t>(j)].col(l))
                   .norm();
      }
      out.cost.entries(i, j) = acc / static_cast<double>(b);
    }
    out.l1 += out.cost.entries(i, i);
  }
  out.l1 /= static_cast<double>(k);
  out.adv = solve_coupling(out.cost).objective / static_cast<double>(k * k);
  return out;
}

int param_count(int k, int d) { return k * (d * d + d); }

PiecewiseAffineGenerator make_generator(const Eigen::VectorXd& theta, int k,
                                        int d, const Eigen::MatrixXd& anchors) {
  std::vector<AffinePiece> pieces;
  pieces.reserve(static_cast<std::size_t>(k));
  int at = 0;
  for (int i = 0; i < k; ++i) {
    AffinePiece piece;
    piece.weight.resize(d, d);
    for (int c = 0; c < d; ++c) {
      for (int r = 0; r < d; ++r) piece.weight(r, c) = theta[at++];
    }
    piece.offset.resize(d);
    for (int r = 0; r < d; ++r) piece.offset[r] = theta[at++];
    pieces.push_back(std::move(piece));
  }
  return PiecewiseAffineGenerator(Permutation::identity(k), std::move(pieces),
                                  anchors);
}

}  // namespace

double loss_adv(const PiecewiseAffineGenerator& g, const ManifoldSpec& source,
                const ManifoldSpec& target, std::int64_t batch,
                std::uint64_t seed) {
  const int k = source.chart_count();
  const auto c = cost_matrix(g, source, target, batch, seed);
  return solve_coupling(c).objective / static_cast<double>(k * k);
}

double loss_l1(const PiecewiseAffineGenerator& g,
               const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>&
                   paired_batch) {
  if (paired_batch.empty()) {
    throw std::invalid_argument("paired batch must be non-empty");
  }
  double acc = 0.0;
  for (const auto& [src, tgt] : paired_batch) {
    if (src.cols() != tgt.cols() || src.cols() < 1) {
      throw std::invalid_argument("paired batch columns must align");
    }
    double chart_acc = 0.0;
    for (Eigen::Index l = 0; l < src.cols(); ++l) {
      chart_acc += (g.apply(src.col(l)) - tgt.col(l)).norm();
    }
    acc += chart_acc / static_cast<double>(src.cols());
  }
  return acc / static_cast<double>(paired_batch.size());
}

std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> draw_paired_batch(
    const ManifoldSpec& source, const ManifoldSpec& target, std::int64_t batch,
    std::uint64_t seed) {
  const auto b = draw_step_batch(source, target, batch, seed);
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> out;
  out.reserve(b.src.size());
  for (std::size_t i = 0; i < b.src.size(); ++i) {
    out.emplace_back(b.src[i], b.tgt[i]);
  }
  return out;
}

std::vector<Eigen::VectorXd> loss_l1_offset_gradient(
    const PiecewiseAffineGenerator& g,
    const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>&
        paired_batch) {
  const int k = g.piece_count();
  const int d = g.dimension();
  std::vector<Eigen::VectorXd> grad(static_cast<std::size_t>(k),
                                    Eigen::VectorXd::Zero(d));
  const double chart_weight = 1.0 / static_cast<double>(paired_batch.size());
  for (const auto& [src, tgt] : paired_batch) {
    const double w = chart_weight / static_cast<double>(src.cols());
    for (Eigen::Index l = 0; l < src.cols(); ++l) {
      const int piece = g.piece_index(src.col(l));
      const Eigen::VectorXd residual = g.apply(src.col(l)) - tgt.col(l);
      const double norm = residual.norm();
      if (norm > 0.0) {
        grad[static_cast<std::size_t>(piece)] += w * residual / norm;
      }
    }
  }
  return grad;
}

TrainResult train(const TrainConfig& config, const ManifoldSpec& source,
                  const ManifoldSpec& target) {
  const int k = source.chart_count();
  const int d = source.dimension;
  if (target.chart_count() != k || target.dimension != d) {
    throw std::invalid_argument("source/target shape mismatch");
  }
  if (config.steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (config.step_size < 0.0) {
    throw std::invalid_argument("step_size must be >= 0");
  }
  if (config.batch < 2) throw std::invalid_argument("batch must be >= 2");
  if (config.lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

  Eigen::MatrixXd anchors(d, k);
  for (int i = 0; i < k; ++i) {
    anchors.col(i) = source.charts[static_cast<std::size_t>(i)].mean;
  }

  // Initialize around identity pieces: piece i maps its chart mean to
  // mean + init_scale * separation * noise, with the weight perturbed around
  // the identity. Anchoring the offset at the chart mean keeps the basin mix
  // independent of where the charts sit and how far apart they are.
  Rng init_rng(derive_seed(config.seed, seed_tag::train_init));
  const double offset_scale =
      config.init_scale *
      (std::isfinite(source.separation) ? source.separation : 1.0);
  const int p_count = param_count(k, d);
  Eigen::VectorXd theta(p_count);
  {
    int at = 0;
    for (int i = 0; i < k; ++i) {
      Eigen::MatrixXd w(d, d);
      for (int c = 0; c < d; ++c) {
        for (int r = 0; r < d; ++r) {
          w(r, c) = (r == c ? 1.0 : 0.0) + config.init_scale * init_rng.normal();
        }
      }
      Eigen::VectorXd displacement(d);
      for (int r = 0; r < d; ++r) {
        displacement[r] = offset_scale * init_rng.normal();
      }
      const Eigen::VectorXd& x = source.charts[static_cast<std::size_t>(i)].mean;
      const Eigen::VectorXd b = x + displacement - w * x;
      for (int c = 0; c < d; ++c) {
        for (int r = 0; r < d; ++r) theta[at++] = w(r, c);
      }
      for (int r = 0; r < d; ++r) theta[at++] = b[r];
    }
  }

  TrainResult result{TrainTrace{}, make_generator(theta, k, d, anchors), false,
                     -1};
  double initial_combined = -1.0;

  for (int step = 0; step < config.steps; ++step) {
    const std::uint64_t step_seed =
        derive_seed(config.seed, seed_tag::train_step,
                    static_cast<std::uint64_t>(step));
    const StepBatch batch =
        draw_step_batch(source, target, config.batch, step_seed);

    const PiecewiseAffineGenerator current = make_generator(theta, k, d, anchors);
    const StepLosses losses = eval_step(current, batch);

    TraceRow row;
    row.step = step;
    row.loss_adv = losses.adv;
    row.loss_l1 = losses.l1;
    row.recovered = solve_coupling(losses.cost).permutation;
    row.pti_index = infer_pti_index(current, source, target, config.probe,
                                    kMembershipThreshold,
                                    derive_seed(step_seed, seed_tag::train_eval))
                        .pairing;
    result.trace.rows.push_back(std::move(row));

    const double combined = losses.adv + config.lambda * losses.l1;
    if (step == 0) initial_combined = std::max(combined, 1e-12);
    if (combined > config.divergence_factor * initial_combined) {
      result.diverged = true;
      result.divergence_step = step;
      break;
    }

    // Central finite-difference gradient on the frozen batch.
    Eigen::VectorXd grad(p_count);
    for (int p = 0; p < p_count; ++p) {
      const double saved = theta[p];
      theta[p] = saved + config.fd_step;
      const StepLosses up = eval_step(make_generator(theta, k, d, anchors), batch);
      theta[p] = saved - config.fd_step;
      const StepLosses dn = eval_step(make_generator(theta, k, d, anchors), batch);
      theta[p] = saved;
      const double up_c = up.adv + config.lambda * up.l1;
      const double dn_c = dn.adv + config.lambda * dn.l1;
      grad[p] = (up_c - dn_c) / (2.0 * config.fd_step);
    }
    theta -= config.step_size * grad;
  }

  result.generator = make_generator(theta, k, d, anchors);
  return result;
}

AttractorProbe attractor_probe(const TrainTrace& trace) {
  AttractorProbe out;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    if (trace.rows[i].pti_index.has_value()) {
      out.first_entry = trace.rows[i].step;
      const Permutation& p = *trace.rows[i].pti_index;
      out.persisted = true;
      for (std::size_t j = i + 1; j < trace.rows.size(); ++j) {
        if (!trace.rows[j].recovered.has_value() ||
            !(*trace.rows[j].recovered == p)) {
          out.persisted = false;
          break;
        }
      }
      return out;
    }
  }
  return out;
}

}  // namespace chartlab
