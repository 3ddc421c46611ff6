#pragma once

#include <memory>
#include <string>
#include <vector>

#include "paramot/common.hpp"
#include "paramot/potential.hpp"
#include "paramot/pushforward.hpp"
#include "paramot/sampler.hpp"

namespace paramot {

// Symmetric PSD tensor on parameter space, either the raw map metric
// E[grad_theta g grad_theta g^T] or the Wasserstein pullback obtained by
// projecting map velocities onto basis-gradient fields in L^2(rho).
struct MetricTensor {
  enum class Kind { map, wasserstein };

  MatrixXd M;
  Kind kind = Kind::map;
  Eigen::Index sample_count = 0;
  std::string basis_name;  // wasserstein only
  MatrixXd std_err;        // jackknife standard error per entry; empty if off

  double quad_form(const VectorXd& thetadot) const {
    return thetadot.dot(M * thetadot);
  }
};

struct MetricOptions {
  // Tikhonov scale: lambda = tikhonov_rel * trace(normal matrix) / J.
  // Zero disables regularization; rank-deficient systems then fail loudly,
  // naming the deficient basis directions.
  double tikhonov_rel = 1e-10;
  // Jackknife block count for standard errors; 0 skips the error bars.
  int jackknife_blocks = 10;
};

// Galerkin workspace for one (family, theta, batch, basis) tuple. Assembles
// the normal matrix E[grad psi_j . grad psi_k] once; every thetadot solve
// shares its factorization.
class PotentialProjection {
 public:
  PotentialProjection(const MapFamily& fam, const VectorXd& theta,
                      const SampleBatch& batch, const PotentialBasis& basis,
                      const MetricOptions& opts = {});
  ~PotentialProjection();
  PotentialProjection(PotentialProjection&&) noexcept;

  const MatrixXd& normal_matrix() const;  // unregularized, J x J
  double tikhonov() const;

  // Least-squares coefficients of Phi with grad Phi ~ map velocity field.
  VectorXd solve(const VectorXd& thetadot) const;

  // E |v|^2 for v the map velocity field; equals thetadot' G_map thetadot.
  double velocity_energy(const VectorXd& thetadot) const;
  // c' Mn c, the L^2(rho) energy of the projected field grad Phi_c.
  double projected_energy(const VectorXd& thetadot) const;
  // Direct per-sample mean of |v - grad Phi|^2 at the solved coefficients.
  double residual(const VectorXd& thetadot) const;

  MetricTensor map_metric() const;
  MetricTensor wasserstein_metric() const;

  // Leave-one-block-out projected energies (jackknife over sample blocks).
  VectorXd projected_energy_jackknife(const VectorXd& thetadot) const;
  VectorXd velocity_energy_jackknife(const VectorXd& thetadot) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

MetricTensor metric_map(const MapFamily& fam, const VectorXd& theta,
                        const SampleBatch& batch, const MetricOptions& = {});

PotentialCoefficients solve_potential(const MapFamily& fam,
                                      const VectorXd& theta,
                                      const VectorXd& thetadot,
                                      const SampleBatch& batch,
                                      const PotentialBasis& basis,
                                      const MetricOptions& = {});

MetricTensor metric_wasserstein(const MapFamily& fam, const VectorXd& theta,
                                const SampleBatch& batch,
                                const PotentialBasis& basis,
                                const MetricOptions& = {});

double projection_residual(const MapFamily& fam, const VectorXd& theta,
                           const VectorXd& thetadot, const SampleBatch& batch,
                           const PotentialBasis& basis,
                           const MetricOptions& = {});

}  // namespace paramot
