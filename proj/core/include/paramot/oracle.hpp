#pragma once

#include <optional>

#include "paramot/common.hpp"
#include "paramot/pushforward.hpp"
#include "paramot/sampler.hpp"

namespace paramot {

// One-dimensional quantile function, either an analytic Gaussian or a
// tabulated monotone grid with linear interpolation (constant beyond the
// grid ends).
struct Quantile1D {
  enum class Kind { analytic_gaussian, tabulated };

  Kind kind = Kind::analytic_gaussian;
  double mean = 0.0, sigma = 1.0;  // analytic
  VectorXd u, q;                   // tabulated

  static Quantile1D gaussian(double mean, double sigma);
  static Quantile1D tabulated(const VectorXd& u, const VectorXd& q);

  double operator()(double p) const;
};

// Exact 1D unconstrained W_p via the quantile coupling: midpoint quadrature
// of |Q0 - Q1|^p on (0,1). The analytic Gaussian pair at p = 2 bypasses
// quadrature with sqrt(dmean^2 + dsigma^2).
double wp_quantile(const Quantile1D& q0, const Quantile1D& q1, double p,
                   Eigen::Index quad_points = 4096);

// Tabulated quantile at u_i = (i - 1/2)/N from sorted order statistics.
Quantile1D empirical_quantile(const VectorXd& sorted_samples);

// Registry of closed-form constrained distances for the built-in families;
// nullopt when no closed form is known for the (family, base) pair.
std::optional<double> closed_form_distance(const MapFamily& fam,
                                           const BaseMeasure& base,
                                           const VectorXd& theta0,
                                           const VectorXd& theta1);

}  // namespace paramot
