#pragma once

#include <string>

#include "paramot/common.hpp"
#include "paramot/geodesic.hpp"
#include "paramot/pushforward.hpp"
#include "paramot/sampler.hpp"

namespace paramot {

// Pointwise potential V: Omega -> R. The polynomial's constant coefficient is
// tracked separately: it integrates to exactly itself over the unit time
// interval and must not leak finite-difference noise into path gradients.
struct PointwisePotential {
  enum class Kind { none, quadratic, polynomial_1d };

  Kind kind = Kind::none;
  VectorXd center;      // quadratic: V(x) = weight * |x - center|^2
  double weight = 1.0;  // quadratic
  VectorXd coeffs;      // polynomial_1d: sum_k coeffs[k] x^k

  static PointwisePotential none_potential();
  static PointwisePotential quadratic(const VectorXd& center,
                                      double weight = 1.0);
  static PointwisePotential polynomial_1d(const VectorXd& coeffs);

  bool is_none() const { return kind == Kind::none; }
  double constant_term() const;
  // value minus the constant term
  double eval_varying(const RowVectorXd& x) const;
  double eval(const RowVectorXd& x) const;
  void validate(int ambient_dim) const;

  bool operator==(const PointwisePotential& other) const;
};

// Symmetric interaction kernel w(x, y) = w(y, x).
struct InteractionPotential {
  enum class Kind { none, constant, squared_distance, gaussian_kernel };

  Kind kind = Kind::none;
  double weight = 1.0;
  double bandwidth = 1.0;  // gaussian kernel

  static InteractionPotential none_potential();
  static InteractionPotential constant(double weight = 1.0);
  static InteractionPotential squared_distance(double weight = 1.0);
  static InteractionPotential gaussian_kernel(double bandwidth,
                                              double weight = 1.0);

  bool is_none() const { return kind == Kind::none; }
  double eval(const RowVectorXd& x, const RowVectorXd& y) const;

  bool operator==(const InteractionPotential&) const = default;
};

enum class PairingMode {
  automatic,   // all-pairs for N <= 10^4, split-batch above
  all_pairs,   // (1/(N(N-1))) sum over i != j, diagonal excluded
  split_batch  // pair the two batch halves, O(N)
};

struct EnergyStats {
  double value = 0.0;
  double std_err = 0.0;  // jackknife over 10 blocks
};

// Monte-Carlo estimate of the linear potential energy E V(g(theta, z)).
double linear_energy(const MapFamily& fam, const VectorXd& theta,
                     const SampleBatch& batch, const PointwisePotential& V);
EnergyStats linear_energy_stats(const MapFamily& fam, const VectorXd& theta,
                                const SampleBatch& batch,
                                const PointwisePotential& V);

// Estimate of the interaction energy E w(g(theta,z1), g(theta,z2)) over
// independent z1, z2.
double interaction_energy(const MapFamily& fam, const VectorXd& theta,
                          const SampleBatch& batch,
                          const InteractionPotential& w,
                          PairingMode pairing = PairingMode::automatic);
EnergyStats interaction_energy_stats(const MapFamily& fam,
                                     const VectorXd& theta,
                                     const SampleBatch& batch,
                                     const InteractionPotential& w,
                                     PairingMode pairing = PairingMode::automatic);

struct ExtendedOptions {
  MetricTensor::Kind metric = MetricTensor::Kind::wasserstein;
  MetricOptions metric_opts;
  PairingMode pairing = PairingMode::automatic;
  // The action subtracts the energies (the sign of the source formulation);
  // set to true to add them instead (MFG convention).
  bool flip_energy_sign = false;
  SolverOptions solver;
};

// Midpoint-rule integral of [kinetic quadratic form -/+ V -/+ W] along the
// path. With both energies absent this is bit-identical to the kinetic
// action on the same batch.
double extended_action(const MapFamily& fam, const ParamPath& path,
                       const SampleBatch& batch, const PotentialBasis& basis,
                       const PointwisePotential& V,
                       const InteractionPotential& w,
                       const ExtendedOptions& opts = {});

ActionReport extended_action_report(const MapFamily& fam, const ParamPath& path,
                                    const SampleBatch& batch,
                                    const PotentialBasis& basis,
                                    const PointwisePotential& V,
                                    const InteractionPotential& w,
                                    const ExtendedOptions& opts = {});

std::pair<ParamPath, ActionReport> extended_geodesic_solve(
    const MapFamily& fam, const VectorXd& theta0, const VectorXd& theta1,
    int segments, const SampleBatch& batch, const PotentialBasis& basis,
    const PointwisePotential& V, const InteractionPotential& w,
    const ExtendedOptions& opts = {});

}  // namespace paramot
