#include "paramot/geodesic.hpp"

#include <cmath>
#include <limits>

#include "paramot/jackknife.hpp"
#include "paramot/parallel.hpp"

namespace paramot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Eigen::ArrayXd;

double velocity_mean_energy(const MapFamily& fam, const VectorXd& theta,
                            const VectorXd& thetadot, const SampleBatch& batch) {
  const MatrixXd V = fam.map_velocity_all(theta, thetadot, batch.points);
  const ArrayXd buf = (V.array() * V.array()).rowwise().sum();
  return pairwise_sum(buf.data(), static_cast<std::size_t>(buf.size())) /
         static_cast<double>(buf.size());
}

// One segment of the discrete action. Returns +inf on inadmissible points
// so the line search can reject the trial step.
double segment_value(const PathProblem& P, const VectorXd& a, const VectorXd& b,
                     double dt, double* residual_out = nullptr) {
  const VectorXd mid = 0.5 * (a + b);
  if (!P.fam.admissible(a) || !P.fam.admissible(b) || !P.fam.admissible(mid))
    return kInf;
  const VectorXd thetadot = (b - a) / dt;

  double q = 0.0;
  double resid = 0.0;
  if (P.metric == MetricTensor::Kind::map) {
    q = velocity_mean_energy(P.fam, mid, thetadot, P.batch);
  } else {
    MetricOptions mopts = P.metric_opts;
    mopts.jackknife_blocks = 0;  // no error bars inside the hot path
    PotentialProjection proj(P.fam, mid, P.batch, P.basis, mopts);
    q = proj.projected_energy(thetadot);
    if (residual_out) resid = proj.residual(thetadot);
  }
  if (residual_out) *residual_out = resid;

  double value = dt * q;
  if (P.extra_segment_cost) value += dt * P.extra_segment_cost(mid);
  return value;
}

// Leave-one-block-out segment energies for the jackknife (kinetic part only).
VectorXd segment_energy_jackknife(const PathProblem& P, const VectorXd& a,
                                  const VectorXd& b, double dt, int blocks) {
  const VectorXd mid = 0.5 * (a + b);
  const VectorXd thetadot = (b - a) / dt;
  MetricOptions mopts = P.metric_opts;
  mopts.jackknife_blocks = blocks;
  if (P.metric == MetricTensor::Kind::map) {
    const MatrixXd V = P.fam.map_velocity_all(mid, thetadot, P.batch.points);
    const ArrayXd buf = (V.array() * V.array()).rowwise().sum();
    const int B = std::max(1, std::min<int>(blocks, static_cast<int>(buf.size())));
    const VectorXd sums = block_sums(buf, B);
    const VectorXd counts = block_counts(buf.size(), B);
    const double total = sums.sum();
    VectorXd out(B);
    for (int bb = 0; bb < B; ++bb)
      out(bb) = dt * (total - sums(bb)) /
                (static_cast<double>(buf.size()) - counts(bb));
    return out;
  }
  PotentialProjection proj(P.fam, mid, P.batch, P.basis, mopts);
  return dt * proj.projected_energy_jackknife(thetadot);
}

struct Evaluation {
  double value = 0.0;  // excludes the constant offset
  std::vector<double> segments;
};

Evaluation evaluate_path(const PathProblem& P, const MatrixXd& knots) {
  const Eigen::Index K = knots.rows() - 1;
  const double dt = 1.0 / static_cast<double>(K);
  Evaluation ev;
  ev.segments.assign(static_cast<std::size_t>(K), 0.0);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double v = segment_value(P, knots.row(k).transpose(),
                                   knots.row(k + 1).transpose(), dt);
    ev.segments[static_cast<std::size_t>(k)] = v;
    ev.value += v;
  }
  return ev;
}

// Central finite differences of the action w.r.t. interior knots; only the
// two segments adjacent to a knot change, the rest cancel exactly in the
// difference quotient. Falls back to one-sided steps at admissibility walls.
VectorXd path_gradient(const PathProblem& P, const MatrixXd& knots,
                       const Evaluation& base, double fd_step) {
  const Eigen::Index K = knots.rows() - 1;
  const Eigen::Index d = knots.cols();
  const double dt = 1.0 / static_cast<double>(K);
  const Eigen::Index m = (K - 1) * d;
  VectorXd grad(m);

  parallel_for_blocks(static_cast<std::size_t>(m), [&](std::size_t comp) {
    const Eigen::Index knot = 1 + static_cast<Eigen::Index>(comp) / d;
    const Eigen::Index dim = static_cast<Eigen::Index>(comp) % d;
    const double h = fd_step * std::max(1.0, std::abs(knots(knot, dim)));

    auto two_segments = [&](double delta) {
      MatrixXd local = knots.block(knot - 1, 0, 3, d);
      local(1, dim) += delta;
      const double left = segment_value(P, local.row(0).transpose(),
                                        local.row(1).transpose(), dt);
      if (!std::isfinite(left)) return kInf;
      const double right = segment_value(P, local.row(1).transpose(),
                                         local.row(2).transpose(), dt);
      return left + right;
    };

    const double plus = two_segments(h);
    const double minus = two_segments(-h);
    double g;
    if (std::isfinite(plus) && std::isfinite(minus)) {
      g = (plus - minus) / (2.0 * h);
    } else {
      const double center =
          base.segments[static_cast<std::size_t>(knot - 1)] +
          base.segments[static_cast<std::size_t>(knot)];
      if (std::isfinite(plus))
        g = (plus - center) / h;
      else if (std::isfinite(minus))
        g = (center - minus) / h;
      else
        g = 0.0;
    }
    grad(static_cast<Eigen::Index>(comp)) = g;
  });
  return grad;
}

MatrixXd knots_with_interior(const MatrixXd& base, const VectorXd& x) {
  MatrixXd knots = base;
  const Eigen::Index d = knots.cols();
  const Eigen::Index K = knots.rows() - 1;
  for (Eigen::Index k = 1; k < K; ++k)
    knots.row(k) = x.segment((k - 1) * d, d).transpose();
  return knots;
}

VectorXd interior_of(const MatrixXd& knots) {
  const Eigen::Index d = knots.cols();
  const Eigen::Index K = knots.rows() - 1;
  VectorXd x((K - 1) * d);
  for (Eigen::Index k = 1; k < K; ++k)
    x.segment((k - 1) * d, d) = knots.row(k).transpose();
  return x;
}

}  // namespace

ParamPath ParamPath::reversed() const {
  ParamPath p;
  p.knots = knots.colwise().reverse();
  return p;
}

ParamPath ParamPath::linear(const VectorXd& theta0, const VectorXd& theta1,
                            int segments) {
  require(segments >= 1, "path needs at least one segment");
  require(theta0.size() == theta1.size(), "endpoint dimensions differ");
  ParamPath p;
  p.knots.resize(segments + 1, theta0.size());
  for (int k = 0; k <= segments; ++k) {
    const double t = static_cast<double>(k) / segments;
    p.knots.row(k) = ((1.0 - t) * theta0 + t * theta1).transpose();
  }
  // pin the endpoints bit-exactly
  p.knots.row(0) = theta0.transpose();
  p.knots.row(segments) = theta1.transpose();
  return p;
}

ParamPath ParamPath::constant(const VectorXd& theta, int segments) {
  return linear(theta, theta, segments);
}

ActionReport path_action(const PathProblem& problem, const ParamPath& path) {
  require(path.segments() >= 1, "path needs at least one segment");
  require(path.param_dim() == problem.fam.param_dim(),
          "path dimension does not match the family");
  for (Eigen::Index k = 0; k <= path.segments(); ++k)
    problem.fam.require_admissible(path.knots.row(k).transpose());

  const Eigen::Index K = path.segments();
  const double dt = 1.0 / static_cast<double>(K);

  ActionReport report;
  report.segment_energies.resize(static_cast<std::size_t>(K));
  report.projection_residuals.resize(static_cast<std::size_t>(K));
  double total = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    double resid = 0.0;
    const double v =
        segment_value(problem, path.knots.row(k).transpose(),
                      path.knots.row(k + 1).transpose(), dt, &resid);
    if (!std::isfinite(v))
      throw ValidationError("segment midpoint left the admissible set");
    report.segment_energies[static_cast<std::size_t>(k)] = v;
    report.projection_residuals[static_cast<std::size_t>(k)] = resid;
    total += v;
  }
  report.action = total + problem.constant_offset;
  if (!problem.extra_segment_cost)
    report.distance = std::sqrt(std::max(report.action, 0.0));

  if (problem.compute_action_std_err && !problem.extra_segment_cost) {
    const int B = problem.metric_opts.jackknife_blocks;
    if (B >= 2 && problem.batch.count >= B) {
      MatrixXd loo(B, K);
      for (Eigen::Index k = 0; k < K; ++k)
        loo.col(k) = segment_energy_jackknife(
            problem, path.knots.row(k).transpose(),
            path.knots.row(k + 1).transpose(), dt, B);
      report.action_std_err = jackknife_se(loo.rowwise().sum());
    }
  }
  return report;
}

VectorXd action_gradient(const PathProblem& problem, const ParamPath& path,
                         double fd_step) {
  require(path.segments() >= 2, "gradient needs at least one interior knot");
  const Evaluation ev = evaluate_path(problem, path.knots);
  return path_gradient(problem, path.knots, ev, fd_step);
}

std::pair<ParamPath, ActionReport> minimize_path(const PathProblem& problem,
                                                 const VectorXd& theta0,
                                                 const VectorXd& theta1,
                                                 int segments,
                                                 const SolverOptions& opts) {
  problem.fam.require_admissible(theta0);
  problem.fam.require_admissible(theta1);
  require(segments >= 1, "need at least one segment");

  ParamPath path = ParamPath::linear(theta0, theta1, segments);
  const Eigen::Index K = path.segments();
  for (Eigen::Index k = 1; k < K; ++k)
    path.knots.row(k) =
        problem.fam.project_admissible(path.knots.row(k).transpose())
            .transpose();
  for (Eigen::Index k = 0; k <= K; ++k)
    problem.fam.require_admissible(path.knots.row(k).transpose());

  auto finish = [&](ParamPath p, std::vector<ConvergenceSample> trace,
                    bool converged, int iterations, std::string status) {
    ActionReport report = path_action(problem, p);
    report.trace = std::move(trace);
    report.converged = converged;
    report.iterations = iterations;
    report.status = std::move(status);
    return std::make_pair(std::move(p), std::move(report));
  };

  if (K == 1) return finish(path, {}, true, 0, "ok");

  const Eigen::Index m = (K - 1) * path.param_dim();
  VectorXd x = interior_of(path.knots);
  Evaluation ev = evaluate_path(problem, path.knots);
  if (!std::isfinite(ev.value))
    throw SolveError("initial path evaluates to a non-finite action");
  VectorXd g = path_gradient(problem, path.knots, ev, opts.fd_step);

  std::vector<ConvergenceSample> trace;
  trace.push_back({0, ev.value + problem.constant_offset, g.norm()});

  // relative to the initial gradient, floored at tol itself so an already
  // optimal initialization (flat families) terminates immediately
  const double g0 = g.norm();
  const double gtol = opts.tol * std::max(1.0, g0);
  if (g0 <= gtol) return finish(path, std::move(trace), true, 0, "ok");

  MatrixXd H = MatrixXd::Identity(m, m);
  bool converged = false;
  int iters = 0;
  std::string status = "ok";
  int stagnant = 0;  // accepted iterations without measurable progress

  for (int it = 1; it <= opts.max_iters; ++it) {
    iters = it;
    VectorXd p = -(H * g);
    double dirder = g.dot(p);
    if (!(dirder < 0.0)) {  // restore descent
      H.setIdentity();
      p = -g;
      dirder = -g.squaredNorm();
    }

    double alpha = 1.0;
    bool accepted = false;
    VectorXd x_new;
    Evaluation ev_new;
    while (alpha > 1e-16) {
      x_new = x + alpha * p;
      const MatrixXd knots_new = knots_with_interior(path.knots, x_new);
      ev_new = evaluate_path(problem, knots_new);
      if (std::isfinite(ev_new.value) &&
          ev_new.value <= ev.value + 1e-4 * alpha * dirder) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      status = "line search failed at iteration " + std::to_string(it);
      break;
    }
    if (ev.value - ev_new.value <= 1e-14 * std::max(1.0, std::abs(ev.value))) {
      if (++stagnant >= 10) {
        status = "stalled at the finite-difference noise floor after " +
                 std::to_string(it) + " iterations";
        iters = it;
        x = x_new;
        path.knots = knots_with_interior(path.knots, x_new);
        ev = ev_new;
        break;
      }
    } else {
      stagnant = 0;
    }

    const MatrixXd knots_new = knots_with_interior(path.knots, x_new);
    VectorXd g_new = path_gradient(problem, knots_new, ev_new, opts.fd_step);

    const VectorXd s = x_new - x;
    const VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {  // BFGS inverse update
      const double rho = 1.0 / sy;
      const VectorXd Hy = H * y;
      H -= rho * (Hy * s.transpose() + s * Hy.transpose());
      H += rho * rho * (y.dot(Hy)) * (s * s.transpose());
      H += rho * (s * s.transpose());
    }

    x = x_new;
    path.knots = knots_new;
    ev = ev_new;
    g = g_new;
    trace.push_back({it, ev.value + problem.constant_offset, g.norm()});

    if (ev.value + problem.constant_offset < opts.divergence_floor)
      throw SolveError(
          "action diverged below the configured floor at iteration " +
          std::to_string(it) + "; the functional appears unbounded below");

    if (g.norm() <= gtol) {
      converged = true;
      break;
    }
  }
  if (!converged && status == "ok")
    status = "no convergence after " + std::to_string(iters) + " iterations";
  return finish(path, std::move(trace), converged, iters, std::move(status));
}

ActionReport action(const MapFamily& fam, const ParamPath& path,
                    const SampleBatch& batch, const PotentialBasis& basis,
                    MetricTensor::Kind kind, const MetricOptions& mopts) {
  PathProblem problem{fam, batch, basis, kind, mopts, nullptr, 0.0, false};
  return path_action(problem, path);
}

std::pair<ParamPath, ActionReport> geodesic_solve(
    const MapFamily& fam, const VectorXd& theta0, const VectorXd& theta1,
    int segments, const SampleBatch& batch, const PotentialBasis& basis,
    const GeodesicOptions& opts) {
  require(segments >= 2, "geodesic solve needs K >= 2 segments");
  PathProblem problem{fam,     batch, basis, opts.metric, opts.metric_opts,
                      nullptr, 0.0,   opts.compute_action_std_err};
  return minimize_path(problem, theta0, theta1, segments, opts.solver);
}

double distance(const MapFamily& fam, const VectorXd& theta0,
                const VectorXd& theta1, int segments, const SampleBatch& batch,
                const PotentialBasis& basis, const GeodesicOptions& opts) {
  return geodesic_solve(fam, theta0, theta1, segments, batch, basis, opts)
      .second.distance.value();
}

}  // namespace paramot
