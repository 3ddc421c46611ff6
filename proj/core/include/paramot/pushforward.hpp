#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "paramot/common.hpp"
#include "paramot/sampler.hpp"

namespace paramot {

// One additive term of a feature-expansion family, a smooth vector field on Z.
struct Feature {
  enum class Kind { polynomial, gaussian_bump };

  struct PolyTerm {
    int component = 0;           // output coordinate the term feeds
    std::vector<int> exponents;  // one exponent per input coordinate
    double coeff = 1.0;
  };

  Kind kind = Kind::polynomial;
  std::vector<PolyTerm> terms;  // polynomial only

  // gaussian_bump only: direction * exp(-|z-center|^2 / (2 h^2))
  VectorXd direction, center;
  double bandwidth = 1.0;

  static Feature polynomial(std::vector<PolyTerm> terms);
  static Feature gaussian_bump(const VectorXd& direction,
                               const VectorXd& center, double bandwidth);
  // The rotational field (-z2, z1) on R^2; its velocity is not a gradient
  // under any potential, which makes the projection gap strictly positive.
  static Feature swirl_2d(double strength = 1.0);

  MatrixXd eval_all(const MatrixXd& Z) const;  // N x n
  void validate(int n) const;

  bool operator==(const Feature& other) const;
};
bool operator==(const Feature::PolyTerm&, const Feature::PolyTerm&);

// Parameterized map family g_theta: Z -> Omega realizing rho(theta,.) as the
// pushforward of the base measure. Built-in kinds:
//   translation        g = z + theta                        d = n
//   location-scale-1d  g = m + s z, theta = (m, s), s > 0   d = 2, n = 1
//   affine-nd          g = b + A z, theta = (b, rowmajor A) d = n + n^2
//   rotation-2d        g = R(theta) z                       d = 1, n = 2
//   feature-expansion  g = z + sum_k theta_k phi_k(z)       d = #features
// theta -> g_theta is injective for translation, location-scale (s > 0) and
// rotation restricted to [0, pi); affine-nd requires A invertible so the
// image density exists. Input dimension always equals ambient dimension.
class MapFamily {
 public:
  enum class Kind {
    translation,
    location_scale_1d,
    affine_nd,
    rotation_2d,
    feature_expansion
  };

  static MapFamily translation(int n);
  static MapFamily location_scale_1d();
  static MapFamily affine_nd(int n);
  static MapFamily rotation_2d();
  static MapFamily feature_expansion(int n, std::vector<Feature> features);

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  int param_dim() const { return d_; }    // d
  int ambient_dim() const { return n_; }  // n
  int input_dim() const { return n_; }    // n1 = n for all built-ins

  const std::vector<Feature>& features() const { return features_; }

  bool admissible(const VectorXd& theta) const noexcept;
  void require_admissible(const VectorXd& theta) const;
  // Nearest convenient admissible point (used to repair path initializations).
  VectorXd project_admissible(VectorXd theta) const;

  VectorXd forward(const VectorXd& theta, const VectorXd& z) const;
  MatrixXd forward_all(const VectorXd& theta, const MatrixXd& Z) const;

  // d x n matrix; row k is the derivative of g w.r.t. theta_k at (theta, z).
  MatrixXd jacobian_theta(const VectorXd& theta, const VectorXd& z) const;

  // Chain-rule particle velocity jacobian_theta^T * thetadot.
  VectorXd map_velocity(const VectorXd& theta, const VectorXd& thetadot,
                        const VectorXd& z) const;
  MatrixXd map_velocity_all(const VectorXd& theta, const VectorXd& thetadot,
                            const MatrixXd& Z) const;  // N x n

  // Image distribution when the base is standard normal and the map is
  // affine in z: returns (mean, covariance) of the Gaussian g_theta # mu.
  std::optional<std::pair<VectorXd, MatrixXd>> gaussian_image(
      const VectorXd& theta, const BaseMeasure& base) const;

  bool operator==(const MapFamily& other) const;

 private:
  Kind kind_ = Kind::translation;
  int d_ = 0;
  int n_ = 0;
  std::vector<Feature> features_;
};

// Scalar test function with an optional closed-form Gaussian expectation,
// used by the pushforward consistency check.
struct TestFunction {
  std::function<double(const RowVectorXd&)> eval;
  // closed form of E f(X), X ~ N(mean, cov); null when unavailable
  std::function<double(const VectorXd&, const MatrixXd&)> gaussian_expectation;
  // expectation independent of the distribution (constants only)
  std::optional<double> exact_value;
  std::string name;

  static TestFunction one();
  static TestFunction coordinate(int i);
  static TestFunction squared_norm();
  // f(x) = sum_k coeffs[k] x^k in one dimension
  static TestFunction polynomial_1d(const VectorXd& coeffs);
};

struct ConsistencyOptions {
  // fallback when no closed form exists: independent high-N estimate
  Eigen::Index reference_samples = 0;
  std::uint64_t reference_seed = 0x9E3779B9u;
};

// Returns (lhs, rhs): lhs is the batch estimate of E f(g(theta, z)); rhs is
// the closed-form Gaussian expectation when available, otherwise a reference
// estimate with its own samples. Throws when neither is configured.
std::pair<double, double> pushforward_consistency(
    const MapFamily& fam, const VectorXd& theta, const SampleBatch& batch,
    const TestFunction& f, const ConsistencyOptions& opts = {});

}  // namespace paramot
