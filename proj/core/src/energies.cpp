#include "paramot/energies.hpp"

#include <cmath>

#include "paramot/jackknife.hpp"
#include "paramot/parallel.hpp"

namespace paramot {

namespace {

constexpr Eigen::Index kAllPairsLimit = 10000;

using Eigen::ArrayXd;

PairingMode resolve_pairing(PairingMode mode, Eigen::Index n) {
  if (mode != PairingMode::automatic) return mode;
  return n <= kAllPairsLimit ? PairingMode::all_pairs : PairingMode::split_batch;
}

}  // namespace

PointwisePotential PointwisePotential::none_potential() { return {}; }

PointwisePotential PointwisePotential::quadratic(const VectorXd& center,
                                                 double weight) {
  PointwisePotential v;
  v.kind = Kind::quadratic;
  v.center = center;
  v.weight = weight;
  return v;
}

PointwisePotential PointwisePotential::polynomial_1d(const VectorXd& coeffs) {
  PointwisePotential v;
  v.kind = Kind::polynomial_1d;
  v.coeffs = coeffs;
  return v;
}

double PointwisePotential::constant_term() const {
  return kind == Kind::polynomial_1d && coeffs.size() > 0 ? coeffs(0) : 0.0;
}

double PointwisePotential::eval_varying(const RowVectorXd& x) const {
  switch (kind) {
    case Kind::none:
      return 0.0;
    case Kind::quadratic:
      return weight * (x.transpose() - center).squaredNorm();
    case Kind::polynomial_1d: {
      double acc = 0.0;
      for (Eigen::Index k = coeffs.size() - 1; k >= 1; --k)
        acc = (acc + coeffs(k)) * x(0);
      return acc;
    }
  }
  return 0.0;
}

double PointwisePotential::eval(const RowVectorXd& x) const {
  return constant_term() + eval_varying(x);
}

bool PointwisePotential::operator==(const PointwisePotential& other) const {
  return kind == other.kind && same_values(center, other.center) &&
         weight == other.weight && same_values(coeffs, other.coeffs);
}

void PointwisePotential::validate(int ambient_dim) const {
  switch (kind) {
    case Kind::none:
      return;
    case Kind::quadratic:
      require(center.size() == ambient_dim,
              "quadratic potential center does not match dimension");
      require(center.allFinite() && std::isfinite(weight),
              "quadratic potential parameters must be finite");
      return;
    case Kind::polynomial_1d:
      require(ambient_dim == 1, "polynomial-1d potential needs n = 1");
      require(coeffs.size() >= 1 && coeffs.allFinite(),
              "polynomial potential needs finite coefficients");
      return;
  }
}

InteractionPotential InteractionPotential::none_potential() { return {}; }

InteractionPotential InteractionPotential::constant(double weight) {
  InteractionPotential w;
  w.kind = Kind::constant;
  w.weight = weight;
  return w;
}

InteractionPotential InteractionPotential::squared_distance(double weight) {
  InteractionPotential w;
  w.kind = Kind::squared_distance;
  w.weight = weight;
  return w;
}

InteractionPotential InteractionPotential::gaussian_kernel(double bandwidth,
                                                           double weight) {
  require(bandwidth > 0.0, "gaussian kernel bandwidth must be positive");
  InteractionPotential w;
  w.kind = Kind::gaussian_kernel;
  w.bandwidth = bandwidth;
  w.weight = weight;
  return w;
}

double InteractionPotential::eval(const RowVectorXd& x,
                                  const RowVectorXd& y) const {
  switch (kind) {
    case Kind::none:
      return 0.0;
    case Kind::constant:
      return weight;
    case Kind::squared_distance:
      return weight * (x - y).squaredNorm();
    case Kind::gaussian_kernel:
      return weight *
             std::exp(-(x - y).squaredNorm() / (2.0 * bandwidth * bandwidth));
  }
  return 0.0;
}

double linear_energy(const MapFamily& fam, const VectorXd& theta,
                     const SampleBatch& batch, const PointwisePotential& V) {
  V.validate(fam.ambient_dim());
  if (V.is_none()) return 0.0;
  const MatrixXd images = fam.forward_all(theta, batch.points);
  const std::size_t n = static_cast<std::size_t>(batch.count);
  const double sum = reduce_indexed(n, 0.0, [&](double& acc, std::size_t i) {
    const double v = V.eval_varying(images.row(static_cast<Eigen::Index>(i)));
    if (!std::isfinite(v))
      throw EvaluationError("non-finite potential evaluation", i);
    acc += v;
  });
  return V.constant_term() + sum / static_cast<double>(batch.count);
}

EnergyStats linear_energy_stats(const MapFamily& fam, const VectorXd& theta,
                                const SampleBatch& batch,
                                const PointwisePotential& V) {
  EnergyStats stats;
  stats.value = linear_energy(fam, theta, batch, V);
  if (V.is_none()) return stats;

  const MatrixXd images = fam.forward_all(theta, batch.points);
  ArrayXd buf(batch.count);
  for (Eigen::Index i = 0; i < batch.count; ++i)
    buf(i) = V.eval_varying(images.row(i));
  const int B = std::max(1, std::min<int>(10, static_cast<int>(batch.count)));
  if (B < 2) return stats;
  const VectorXd sums = block_sums(buf, B);
  const VectorXd counts = block_counts(batch.count, B);
  const double total = sums.sum();
  VectorXd loo(B);
  for (int b = 0; b < B; ++b)
    loo(b) = (total - sums(b)) / (static_cast<double>(batch.count) - counts(b));
  stats.std_err = jackknife_se(loo);
  return stats;
}

namespace {

double all_pairs_mean(const MatrixXd& images, const InteractionPotential& w) {
  const Eigen::Index N = images.rows();
  require(N >= 2, "all-pairs interaction needs at least two samples");
  const double inner_count = static_cast<double>(N - 1);
  const double sum =
      reduce_indexed(static_cast<std::size_t>(N), 0.0,
                     [&](double& acc, std::size_t iu) {
                       const Eigen::Index i = static_cast<Eigen::Index>(iu);
                       double row = 0.0;
                       for (Eigen::Index j = 0; j < N; ++j) {
                         if (j == i) continue;
                         const double v = w.eval(images.row(i), images.row(j));
                         if (!std::isfinite(v))
                           throw EvaluationError(
                               "non-finite interaction evaluation", iu);
                         row += v;
                       }
                       acc += row / inner_count;
                     });
  return sum / static_cast<double>(N);
}

double split_batch_mean(const MatrixXd& images, const InteractionPotential& w) {
  const Eigen::Index N = images.rows();
  require(N >= 2, "split-batch interaction needs at least two samples");
  const Eigen::Index H = N / 2;
  const double sum = reduce_indexed(
      static_cast<std::size_t>(H), 0.0, [&](double& acc, std::size_t iu) {
        const Eigen::Index i = static_cast<Eigen::Index>(iu);
        const double v = w.eval(images.row(i), images.row(H + i));
        if (!std::isfinite(v))
          throw EvaluationError("non-finite interaction evaluation", iu);
        acc += v;
      });
  return sum / static_cast<double>(H);
}

}  // namespace

double interaction_energy(const MapFamily& fam, const VectorXd& theta,
                          const SampleBatch& batch,
                          const InteractionPotential& w, PairingMode pairing) {
  if (w.is_none()) return 0.0;
  const MatrixXd images = fam.forward_all(theta, batch.points);
  switch (resolve_pairing(pairing, batch.count)) {
    case PairingMode::all_pairs:
      return all_pairs_mean(images, w);
    case PairingMode::split_batch:
      return split_batch_mean(images, w);
    default:
      return 0.0;  // unreachable
  }
}

EnergyStats interaction_energy_stats(const MapFamily& fam,
                                     const VectorXd& theta,
                                     const SampleBatch& batch,
                                     const InteractionPotential& w,
                                     PairingMode pairing) {
  EnergyStats stats;
  stats.value = interaction_energy(fam, theta, batch, w, pairing);
  if (w.is_none()) return stats;

  const MatrixXd images = fam.forward_all(theta, batch.points);
  const Eigen::Index N = images.rows();
  const PairingMode mode = resolve_pairing(pairing, N);

  if (mode == PairingMode::split_batch) {
    const Eigen::Index H = N / 2;
    ArrayXd buf(H);
    for (Eigen::Index i = 0; i < H; ++i)
      buf(i) = w.eval(images.row(i), images.row(H + i));
    const int B = std::max(1, std::min<int>(10, static_cast<int>(H)));
    if (B < 2) return stats;
    const VectorXd sums = block_sums(buf, B);
    const VectorXd counts = block_counts(H, B);
    const double total = sums.sum();
    VectorXd loo(B);
    for (int b = 0; b < B; ++b)
      loo(b) = (total - sums(b)) / (static_cast<double>(H) - counts(b));
    stats.std_err = jackknife_se(loo);
    return stats;
  }

  // all-pairs: delete-a-block jackknife on the U-statistic via block-pair sums
  const int B = std::max(1, std::min<int>(10, static_cast<int>(N)));
  if (B < 2) return stats;
  std::vector<Eigen::Index> edges(static_cast<std::size_t>(B) + 1);
  for (int b = 0; b <= B; ++b) edges[static_cast<std::size_t>(b)] = N * b / B;
  auto block_of = [&](Eigen::Index i) {
    int b = 0;
    while (edges[static_cast<std::size_t>(b + 1)] <= i) ++b;
    return b;
  };
  MatrixXd S = MatrixXd::Zero(B, B);
  for (Eigen::Index i = 0; i < N; ++i) {
    const int bi = block_of(i);
    for (Eigen::Index j = 0; j < N; ++j) {
      if (j == i) continue;
      S(bi, block_of(j)) += w.eval(images.row(i), images.row(j));
    }
  }
  const double total = S.sum();
  VectorXd loo(B);
  for (int b = 0; b < B; ++b) {
    const double nb = static_cast<double>(edges[static_cast<std::size_t>(b) + 1] -
                                          edges[static_cast<std::size_t>(b)]);
    const double rest = static_cast<double>(N) - nb;
    const double sum_rest =
        total - S.row(b).sum() - S.col(b).sum() + S(b, b);
    loo(b) = sum_rest / (rest * (rest - 1.0));
  }
  stats.std_err = jackknife_se(loo);
  return stats;
}

namespace {

PathProblem make_extended_problem(const MapFamily& fam,
                                  const SampleBatch& batch,
                                  const PotentialBasis& basis,
                                  const PointwisePotential& V,
                                  const InteractionPotential& w,
                                  const ExtendedOptions& opts) {
  V.validate(fam.ambient_dim());
  PathProblem problem{fam, batch, basis, opts.metric, opts.metric_opts,
                      nullptr, 0.0, false};
  if (V.is_none() && w.is_none()) return problem;

  const double sign = opts.flip_energy_sign ? 1.0 : -1.0;
  // capture everything by value: the problem may outlive the caller's args
  problem.extra_segment_cost = [fam, batch, V, w, pairing = opts.pairing,
                                sign](const VectorXd& theta) {
    double e = 0.0;
    if (!V.is_none()) {
      // constant term handled once via constant_offset
      const MatrixXd images = fam.forward_all(theta, batch.points);
      ArrayXd buf(images.rows());
      for (Eigen::Index i = 0; i < images.rows(); ++i)
        buf(i) = V.eval_varying(images.row(i));
      e += pairwise_sum(buf.data(), static_cast<std::size_t>(buf.size())) /
           static_cast<double>(buf.size());
    }
    if (!w.is_none()) e += interaction_energy(fam, theta, batch, w, pairing);
    return sign * e;
  };
  problem.constant_offset = sign * V.constant_term();
  return problem;
}

}  // namespace

ActionReport extended_action_report(const MapFamily& fam, const ParamPath& path,
                                    const SampleBatch& batch,
                                    const PotentialBasis& basis,
                                    const PointwisePotential& V,
                                    const InteractionPotential& w,
                                    const ExtendedOptions& opts) {
  const PathProblem problem =
      make_extended_problem(fam, batch, basis, V, w, opts);
  return path_action(problem, path);
}

double extended_action(const MapFamily& fam, const ParamPath& path,
                       const SampleBatch& batch, const PotentialBasis& basis,
                       const PointwisePotential& V,
                       const InteractionPotential& w,
                       const ExtendedOptions& opts) {
  return extended_action_report(fam, path, batch, basis, V, w, opts).action;
}

std::pair<ParamPath, ActionReport> extended_geodesic_solve(
    const MapFamily& fam, const VectorXd& theta0, const VectorXd& theta1,
    int segments, const SampleBatch& batch, const PotentialBasis& basis,
    const PointwisePotential& V, const InteractionPotential& w,
    const ExtendedOptions& opts) {
  require(segments >= 2, "extended geodesic solve needs K >= 2 segments");
  const PathProblem problem =
      make_extended_problem(fam, batch, basis, V, w, opts);
  return minimize_path(problem, theta0, theta1, segments, opts.solver);
}

}  // namespace paramot
