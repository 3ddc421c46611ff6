#include "paramot/metric.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "paramot/jackknife.hpp"
#include "paramot/parallel.hpp"

namespace paramot {

namespace {

using Eigen::ArrayXd;

ArrayXd rowdot(const MatrixXd& a, const MatrixXd& b) {
  return (a.array() * b.array()).rowwise().sum();
}

double mean_of(const ArrayXd& buf) {
  return pairwise_sum(buf.data(), static_cast<std::size_t>(buf.size())) /
         static_cast<double>(buf.size());
}

std::string basis_description(const PotentialBasis& basis) {
  if (basis.kind() == PotentialBasis::Kind::polynomial)
    return "polynomial(degree=" + std::to_string(basis.degree()) + ")";
  return "gaussian-rbf(J=" + std::to_string(basis.size()) + ")";
}

}  // namespace

struct PotentialProjection::Impl {
  MapFamily fam;
  VectorXd theta;
  const SampleBatch* batch;
  PotentialBasis basis;
  MetricOptions opts;

  Eigen::Index N = 0;
  MatrixXd images;            // N x n
  std::vector<MatrixXd> G;    // J gradient-feature fields, each N x n
  MatrixXd Mn;                // unregularized normal matrix, J x J
  double lambda = 0.0;
  Eigen::LDLT<MatrixXd> ldlt;  // of Mn + lambda I
  int nblocks = 0;
  std::vector<MatrixXd> Mn_block_sums;  // per-block sums of grad psi_j . grad psi_k
  VectorXd counts;                      // per-block sample counts

  // single-thetadot cache: velocity field and coefficients
  mutable VectorXd cached_thetadot;
  mutable MatrixXd cached_V;
  mutable VectorXd cached_c;
  mutable bool has_cached_c = false;

  const MatrixXd& velocity(const VectorXd& thetadot) const {
    if (cached_thetadot.size() != thetadot.size() ||
        cached_thetadot != thetadot) {
      cached_thetadot = thetadot;
      cached_V = fam.map_velocity_all(theta, thetadot, batch->points);
      has_cached_c = false;
    }
    return cached_V;
  }

  const VectorXd& coefficients(const VectorXd& thetadot) const {
    const MatrixXd& V = velocity(thetadot);
    if (!has_cached_c) {
      const Eigen::Index J = basis.size();
      VectorXd rhs(J);
      for (Eigen::Index j = 0; j < J; ++j)
        rhs(j) = mean_of(rowdot(G[static_cast<std::size_t>(j)], V));
      cached_c = ldlt.solve(rhs);
      has_cached_c = true;
    }
    return cached_c;
  }

  MatrixXd predicted_field(const VectorXd& c) const {
    MatrixXd P = MatrixXd::Zero(N, fam.ambient_dim());
    for (Eigen::Index j = 0; j < basis.size(); ++j)
      P += c(j) * G[static_cast<std::size_t>(j)];
    return P;
  }

  // rhs block sums for a velocity field, J x nblocks
  MatrixXd rhs_block_sums(const MatrixXd& V) const {
    MatrixXd S(basis.size(), nblocks);
    for (Eigen::Index j = 0; j < basis.size(); ++j)
      S.row(j) = block_sums(rowdot(G[static_cast<std::size_t>(j)], V), nblocks)
                     .transpose();
    return S;
  }

  // Normal matrix and rhs with block b removed; returns the solved
  // coefficients and leave-one-out normal matrix.
  std::pair<VectorXd, MatrixXd> solve_without_block(
      const MatrixXd& rhs_sums, int b) const {
    require(!Mn_block_sums.empty(),
            "jackknife requested but block sums were not assembled");
    const Eigen::Index J = basis.size();
    const double n_rest = static_cast<double>(N) - counts(b);
    MatrixXd Mn_rest = MatrixXd::Zero(J, J);
    for (int bb = 0; bb < nblocks; ++bb)
      if (bb != b) Mn_rest += Mn_block_sums[static_cast<std::size_t>(bb)];
    Mn_rest /= n_rest;
    VectorXd rhs_rest = VectorXd::Zero(J);
    for (int bb = 0; bb < nblocks; ++bb)
      if (bb != b) rhs_rest += rhs_sums.col(bb);
    rhs_rest /= n_rest;
    const double lam =
        opts.tikhonov_rel * Mn_rest.trace() / static_cast<double>(J);
    MatrixXd A = Mn_rest;
    A.diagonal().array() += lam;
    return {Eigen::LDLT<MatrixXd>(A).solve(rhs_rest), Mn_rest};
  }
};

PotentialProjection::PotentialProjection(const MapFamily& fam,
                                         const VectorXd& theta,
                                         const SampleBatch& batch,
                                         const PotentialBasis& basis,
                                         const MetricOptions& opts)
    : impl_(std::make_unique<Impl>()) {
  fam.require_admissible(theta);
  require(batch.dim() == fam.input_dim(),
          "batch dimension does not match family input dimension");
  require(basis.ambient_dim() == fam.ambient_dim(),
          "basis dimension does not match family ambient dimension");
  require(opts.tikhonov_rel >= 0.0, "negative Tikhonov scale");

  auto& im = *impl_;
  im.fam = fam;
  im.theta = theta;
  im.batch = &batch;
  im.basis = basis;
  im.opts = opts;
  im.N = batch.count;
  im.images = fam.forward_all(theta, batch.points);
  im.G = basis.gradient_features(im.images);

  const Eigen::Index J = basis.size();
  im.nblocks = std::max(
      1, std::min<int>(opts.jackknife_blocks > 0 ? opts.jackknife_blocks : 1,
                       static_cast<int>(im.N)));
  im.counts = block_counts(im.N, im.nblocks);
  if (im.nblocks >= 2)
    im.Mn_block_sums.assign(static_cast<std::size_t>(im.nblocks),
                            MatrixXd::Zero(J, J));
  im.Mn.resize(J, J);
  for (Eigen::Index j = 0; j < J; ++j) {
    for (Eigen::Index k = j; k < J; ++k) {
      const ArrayXd buf = rowdot(im.G[static_cast<std::size_t>(j)],
                                 im.G[static_cast<std::size_t>(k)]);
      const double m = mean_of(buf);
      im.Mn(j, k) = m;
      im.Mn(k, j) = m;
      if (im.nblocks >= 2) {
        const VectorXd bs = block_sums(buf, im.nblocks);
        for (int b = 0; b < im.nblocks; ++b) {
          im.Mn_block_sums[static_cast<std::size_t>(b)](j, k) = bs(b);
          im.Mn_block_sums[static_cast<std::size_t>(b)](k, j) = bs(b);
        }
      }
    }
  }

  const double trace = im.Mn.trace();
  if (opts.tikhonov_rel > 0.0) {
    require(trace > 0.0,
            "basis gradients vanish on the sample images; the potential "
            "solve is degenerate");
    im.lambda = opts.tikhonov_rel * trace / static_cast<double>(J);
  } else {
    // no regularization: fail loudly on rank deficiency, naming directions
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(im.Mn);
    const double lmax = std::max(eig.eigenvalues().maxCoeff(), 0.0);
    const double tol = 1e-12 * std::max(lmax, 1e-300);
    if (eig.eigenvalues()(0) <= tol) {
      std::string msg =
          "potential normal matrix is rank-deficient without regularization; "
          "deficient basis directions:";
      for (Eigen::Index e = 0; e < J; ++e) {
        if (eig.eigenvalues()(e) > tol) break;
        Eigen::Index top = 0;
        eig.eigenvectors().col(e).cwiseAbs().maxCoeff(&top);
        msg += " " + basis.element_name(top);
      }
      throw SolveError(msg);
    }
    im.lambda = 0.0;
  }
  MatrixXd A = im.Mn;
  A.diagonal().array() += im.lambda;
  im.ldlt.compute(A);
  if (im.ldlt.info() != Eigen::Success)
    throw SolveError("LDLT factorization of the potential normal matrix failed");
}

PotentialProjection::~PotentialProjection() = default;
PotentialProjection::PotentialProjection(PotentialProjection&&) noexcept =
    default;

const MatrixXd& PotentialProjection::normal_matrix() const { return impl_->Mn; }
double PotentialProjection::tikhonov() const { return impl_->lambda; }

VectorXd PotentialProjection::solve(const VectorXd& thetadot) const {
  require(thetadot.size() == impl_->fam.param_dim(),
          "thetadot has wrong dimension");
  return impl_->coefficients(thetadot);
}

double PotentialProjection::velocity_energy(const VectorXd& thetadot) const {
  const MatrixXd& V = impl_->velocity(thetadot);
  return mean_of(rowdot(V, V));
}

double PotentialProjection::projected_energy(const VectorXd& thetadot) const {
  const VectorXd& c = impl_->coefficients(thetadot);
  return c.dot(impl_->Mn * c);
}

double PotentialProjection::residual(const VectorXd& thetadot) const {
  const VectorXd c = impl_->coefficients(thetadot);
  const MatrixXd D = impl_->velocity(thetadot) - impl_->predicted_field(c);
  return mean_of(rowdot(D, D));
}

MetricTensor PotentialProjection::map_metric() const {
  return metric_map(impl_->fam, impl_->theta, *impl_->batch, impl_->opts);
}

MetricTensor PotentialProjection::wasserstein_metric() const {
  auto& im = *impl_;
  const int d = im.fam.param_dim();
  const Eigen::Index J = im.basis.size();

  MatrixXd C(J, d);               // solved coefficients per basis direction
  std::vector<MatrixXd> rhs_sums;  // per-direction J x nblocks
  rhs_sums.reserve(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const MatrixXd V =
        im.fam.map_velocity_all(im.theta, VectorXd::Unit(d, k), im.batch->points);
    VectorXd rhs(J);
    for (Eigen::Index j = 0; j < J; ++j)
      rhs(j) = mean_of(rowdot(im.G[static_cast<std::size_t>(j)], V));
    C.col(k) = im.ldlt.solve(rhs);
    rhs_sums.push_back(im.rhs_block_sums(V));
  }

  MetricTensor t;
  t.kind = MetricTensor::Kind::wasserstein;
  t.sample_count = im.N;
  t.basis_name = basis_description(im.basis);
  const MatrixXd raw = C.transpose() * im.Mn * C;
  t.M = 0.5 * (raw + raw.transpose());

  if (im.opts.jackknife_blocks >= 2 && im.nblocks >= 2) {
    std::vector<MatrixXd> loo(static_cast<std::size_t>(im.nblocks));
    for (int b = 0; b < im.nblocks; ++b) {
      MatrixXd Cb(J, d);
      MatrixXd Mn_rest;
      for (int k = 0; k < d; ++k) {
        auto [cb, mrest] =
            im.solve_without_block(rhs_sums[static_cast<std::size_t>(k)], b);
        Cb.col(k) = cb;
        Mn_rest = std::move(mrest);
      }
      const MatrixXd raw_b = Cb.transpose() * Mn_rest * Cb;
      loo[static_cast<std::size_t>(b)] = 0.5 * (raw_b + raw_b.transpose());
    }
    t.std_err.resize(d, d);
    VectorXd vals(im.nblocks);
    for (int a = 0; a < d; ++a)
      for (int bcol = 0; bcol < d; ++bcol) {
        for (int b = 0; b < im.nblocks; ++b)
          vals(b) = loo[static_cast<std::size_t>(b)](a, bcol);
        t.std_err(a, bcol) = jackknife_se(vals);
      }
  }
  return t;
}

VectorXd PotentialProjection::projected_energy_jackknife(
    const VectorXd& thetadot) const {
  auto& im = *impl_;
  const MatrixXd& V = im.velocity(thetadot);
  const MatrixXd rhs_sums = im.rhs_block_sums(V);
  VectorXd out(im.nblocks);
  for (int b = 0; b < im.nblocks; ++b) {
    auto [cb, Mn_rest] = im.solve_without_block(rhs_sums, b);
    out(b) = cb.dot(Mn_rest * cb);
  }
  return out;
}

VectorXd PotentialProjection::velocity_energy_jackknife(
    const VectorXd& thetadot) const {
  auto& im = *impl_;
  const MatrixXd& V = im.velocity(thetadot);
  const VectorXd sums = block_sums(rowdot(V, V), im.nblocks);
  const double total = sums.sum();
  VectorXd out(im.nblocks);
  for (int b = 0; b < im.nblocks; ++b)
    out(b) = (total - sums(b)) / (static_cast<double>(im.N) - im.counts(b));
  return out;
}

MetricTensor metric_map(const MapFamily& fam, const VectorXd& theta,
                        const SampleBatch& batch, const MetricOptions& opts) {
  fam.require_admissible(theta);
  require(batch.dim() == fam.input_dim(),
          "batch dimension does not match family input dimension");
  const int d = fam.param_dim();
  const Eigen::Index N = batch.count;

  // tangent fields T_k = d g / d theta_k over the batch
  std::vector<MatrixXd> T;
  T.reserve(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    T.push_back(fam.map_velocity_all(theta, VectorXd::Unit(d, k), batch.points));
    if (!T.back().allFinite())
      throw SolveError("non-finite parameter Jacobian over the batch");
  }

  const int nblocks =
      std::max(1, std::min<int>(opts.jackknife_blocks > 0 ? opts.jackknife_blocks
                                                          : 1,
                                static_cast<int>(N)));
  const VectorXd counts = block_counts(N, nblocks);

  MetricTensor t;
  t.kind = MetricTensor::Kind::map;
  t.sample_count = N;
  t.M.resize(d, d);
  const bool want_se = opts.jackknife_blocks >= 2 && nblocks >= 2;
  if (want_se) t.std_err = MatrixXd::Zero(d, d);

  for (int j = 0; j < d; ++j) {
    for (int k = j; k < d; ++k) {
      const ArrayXd buf = rowdot(T[static_cast<std::size_t>(j)],
                                 T[static_cast<std::size_t>(k)]);
      const double m = mean_of(buf);
      t.M(j, k) = m;
      t.M(k, j) = m;
      if (want_se) {
        const VectorXd sums = block_sums(buf, nblocks);
        const double total = sums.sum();
        VectorXd loo(nblocks);
        for (int b = 0; b < nblocks; ++b)
          loo(b) = (total - sums(b)) / (static_cast<double>(N) - counts(b));
        const double se = jackknife_se(loo);
        t.std_err(j, k) = se;
        t.std_err(k, j) = se;
      }
    }
  }
  return t;
}

PotentialCoefficients solve_potential(const MapFamily& fam,
                                      const VectorXd& theta,
                                      const VectorXd& thetadot,
                                      const SampleBatch& batch,
                                      const PotentialBasis& basis,
                                      const MetricOptions& opts) {
  PotentialProjection proj(fam, theta, batch, basis, opts);
  return PotentialCoefficients{proj.solve(thetadot), basis};
}

MetricTensor metric_wasserstein(const MapFamily& fam, const VectorXd& theta,
                                const SampleBatch& batch,
                                const PotentialBasis& basis,
                                const MetricOptions& opts) {
  PotentialProjection proj(fam, theta, batch, basis, opts);
  return proj.wasserstein_metric();
}

double projection_residual(const MapFamily& fam, const VectorXd& theta,
                           const VectorXd& thetadot, const SampleBatch& batch,
                           const PotentialBasis& basis,
                           const MetricOptions& opts) {
  PotentialProjection proj(fam, theta, batch, basis, opts);
  return proj.residual(thetadot);
}

}  // namespace paramot
