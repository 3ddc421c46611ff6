#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "paramot/common.hpp"
#include "paramot/metric.hpp"

namespace paramot {

// Discrete parameter path: K+1 knots on the uniform time grid t_k = k/K.
struct ParamPath {
  MatrixXd knots;  // (K+1) x d

  Eigen::Index segments() const { return knots.rows() - 1; }
  Eigen::Index param_dim() const { return knots.cols(); }
  double time(Eigen::Index k) const {
    return static_cast<double>(k) / static_cast<double>(segments());
  }
  ParamPath reversed() const;

  static ParamPath linear(const VectorXd& theta0, const VectorXd& theta1,
                          int segments);
  static ParamPath constant(const VectorXd& theta, int segments);
};

struct ConvergenceSample {
  int iteration = 0;
  double action = 0.0;
  double grad_norm = 0.0;
};

struct ActionReport {
  double action = 0.0;
  // sqrt(action); absent for energy-augmented problems where the value is
  // not a squared distance
  std::optional<double> distance;
  std::vector<double> segment_energies;       // per segment, includes dt
  std::vector<double> projection_residuals;   // per segment midpoint
  std::vector<ConvergenceSample> trace;
  bool converged = true;
  int iterations = 0;
  std::string status = "ok";
  double action_std_err = 0.0;  // jackknife over sample blocks, if requested
};

struct SolverOptions {
  double tol = 1e-6;  // on gradient norm, relative to the initial gradient
  int max_iters = 500;
  double fd_step = 1e-5;
  // abort when the objective falls below this (unbounded-below detection)
  double divergence_floor = -1e9;
};

// A discretized action-minimization problem over paths with fixed endpoints.
// Per-segment cost: dt * q(midpoint, dtheta/dt) + dt * extra(midpoint), with
// q the selected metric quadratic form. `constant_offset` is added once to
// reported values (a potential's constant term integrates to itself over
// unit time); it never enters gradients or line-search decisions.
struct PathProblem {
  MapFamily fam;
  SampleBatch batch;
  PotentialBasis basis;
  MetricTensor::Kind metric = MetricTensor::Kind::wasserstein;
  MetricOptions metric_opts;
  std::function<double(const VectorXd&)> extra_segment_cost;  // may be empty
  double constant_offset = 0.0;
  bool compute_action_std_err = false;
};

ActionReport path_action(const PathProblem& problem, const ParamPath& path);

// The optimizer's gradient of the discrete action with respect to interior
// knots (segment-local central differences), flattened knot-major.
VectorXd action_gradient(const PathProblem& problem, const ParamPath& path,
                         double fd_step = 1e-5);

std::pair<ParamPath, ActionReport> minimize_path(const PathProblem& problem,
                                                 const VectorXd& theta0,
                                                 const VectorXd& theta1,
                                                 int segments,
                                                 const SolverOptions& opts);

// Kinetic action of a path under the chosen metric (midpoint rule).
ActionReport action(const MapFamily& fam, const ParamPath& path,
                    const SampleBatch& batch, const PotentialBasis& basis,
                    MetricTensor::Kind kind = MetricTensor::Kind::wasserstein,
                    const MetricOptions& = {});

struct GeodesicOptions {
  SolverOptions solver;
  MetricTensor::Kind metric = MetricTensor::Kind::wasserstein;
  MetricOptions metric_opts;
  bool compute_action_std_err = false;
};

// Minimizes the discrete action over interior knots from the linear
// initialization; returns the path and a report with distance = sqrt(action).
std::pair<ParamPath, ActionReport> geodesic_solve(
    const MapFamily& fam, const VectorXd& theta0, const VectorXd& theta1,
    int segments, const SampleBatch& batch, const PotentialBasis& basis,
    const GeodesicOptions& opts = {});

double distance(const MapFamily& fam, const VectorXd& theta0,
                const VectorXd& theta1, int segments, const SampleBatch& batch,
                const PotentialBasis& basis, const GeodesicOptions& opts = {});

}  // namespace paramot
