#include "paramot/oracle.hpp"

#include <cmath>

#include "paramot/normal.hpp"
#include "paramot/parallel.hpp"

namespace paramot {

Quantile1D Quantile1D::gaussian(double mean, double sigma) {
  require(std::isfinite(mean) && std::isfinite(sigma) && sigma >= 0.0,
          "gaussian quantile needs finite mean and sigma >= 0");
  Quantile1D qf;
  qf.kind = Kind::analytic_gaussian;
  qf.mean = mean;
  qf.sigma = sigma;
  return qf;
}

Quantile1D Quantile1D::tabulated(const VectorXd& u, const VectorXd& q) {
  require(u.size() >= 2 && u.size() == q.size(),
          "tabulated quantile needs matching grids with >= 2 points");
  require(u.allFinite() && q.allFinite(), "tabulated quantile must be finite");
  require(u(0) > 0.0 && u(u.size() - 1) < 1.0,
          "tabulated quantile u-grid must lie inside (0,1)");
  for (Eigen::Index i = 1; i < u.size(); ++i) {
    require(u(i) > u(i - 1), "quantile u-grid must be strictly increasing");
    require(q(i) >= q(i - 1), "tabulated quantile is not monotone");
  }
  Quantile1D qf;
  qf.kind = Kind::tabulated;
  qf.u = u;
  qf.q = q;
  return qf;
}

double Quantile1D::operator()(double p) const {
  if (kind == Kind::analytic_gaussian) return mean + sigma * inverse_normal_cdf(p);
  if (p <= u(0)) return q(0);
  const Eigen::Index m = u.size();
  if (p >= u(m - 1)) return q(m - 1);
  Eigen::Index lo = 0, hi = m - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (u(mid) <= p ? lo : hi) = mid;
  }
  const double w = (p - u(lo)) / (u(lo + 1) - u(lo));
  return q(lo) + w * (q(lo + 1) - q(lo));
}

double wp_quantile(const Quantile1D& q0, const Quantile1D& q1, double p,
                   Eigen::Index quad_points) {
  require(p >= 1.0, "wp_quantile needs p >= 1");
  require(quad_points >= 64, "wp_quantile needs at least 64 quadrature points");

  if (q0.kind == Quantile1D::Kind::analytic_gaussian &&
      q1.kind == Quantile1D::Kind::analytic_gaussian && p == 2.0) {
    const double dm = q1.mean - q0.mean;
    const double ds = q1.sigma - q0.sigma;
    return std::sqrt(dm * dm + ds * ds);
  }

  // midpoint rule on (0,1); endpoints avoided on purpose, Gaussian quantiles
  // diverge there while |Q0-Q1|^p stays integrable
  const std::size_t m = static_cast<std::size_t>(quad_points);
  const double sum = reduce_indexed(m, 0.0, [&](double& acc, std::size_t i) {
    const double ui = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    acc += std::pow(std::abs(q0(ui) - q1(ui)), p);
  });
  return std::pow(sum / static_cast<double>(m), 1.0 / p);
}

Quantile1D empirical_quantile(const VectorXd& sorted_samples) {
  const Eigen::Index n = sorted_samples.size();
  require(n >= 1, "empirical quantile of empty input");
  require(n >= 2, "empirical quantile needs at least two samples");
  for (Eigen::Index i = 1; i < n; ++i)
    require(sorted_samples(i) >= sorted_samples(i - 1),
            "empirical quantile input must be sorted nondecreasing");
  VectorXd u(n);
  for (Eigen::Index i = 0; i < n; ++i)
    u(i) = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return Quantile1D::tabulated(u, sorted_samples);
}

std::optional<double> closed_form_distance(const MapFamily& fam,
                                           const BaseMeasure& base,
                                           const VectorXd& theta0,
                                           const VectorXd& theta1) {
  fam.require_admissible(theta0);
  fam.require_admissible(theta1);
  switch (fam.kind()) {
    case MapFamily::Kind::translation:
      // W_2 between translates of any base measure
      return (theta1 - theta0).norm();
    case MapFamily::Kind::location_scale_1d:
      if (base.kind != BaseMeasure::Kind::standard_normal) return std::nullopt;
      return std::sqrt((theta1(0) - theta0(0)) * (theta1(0) - theta0(0)) +
                       (theta1(1) - theta0(1)) * (theta1(1) - theta0(1)));
    case MapFamily::Kind::rotation_2d:
      // isotropic base: the image density does not depend on theta
      if (base.kind != BaseMeasure::Kind::standard_normal) return std::nullopt;
      return 0.0;
    default:
      return std::nullopt;
  }
}

}  // namespace paramot
