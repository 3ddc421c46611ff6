#include "paramot/pushforward.hpp"

#include <cmath>

namespace paramot {

namespace {
constexpr double kMinAffineDet = 1e-12;

// theta = (b_1..b_n, A row-major)
MatrixXd affine_A(const VectorXd& theta, int n) {
  MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = theta(n + i * n + j);
  return A;
}

}  // namespace

bool operator==(const Feature::PolyTerm& a, const Feature::PolyTerm& b) {
  return a.component == b.component && a.exponents == b.exponents &&
         a.coeff == b.coeff;
}

bool Feature::operator==(const Feature& other) const {
  return kind == other.kind && terms == other.terms &&
         same_values(direction, other.direction) &&
         same_values(center, other.center) && bandwidth == other.bandwidth;
}

bool MapFamily::operator==(const MapFamily& other) const {
  return kind_ == other.kind_ && d_ == other.d_ && n_ == other.n_ &&
         features_ == other.features_;
}

Feature Feature::polynomial(std::vector<PolyTerm> terms) {
  Feature f;
  f.kind = Kind::polynomial;
  f.terms = std::move(terms);
  return f;
}

Feature Feature::gaussian_bump(const VectorXd& direction, const VectorXd& center,
                               double bandwidth) {
  Feature f;
  f.kind = Kind::gaussian_bump;
  f.direction = direction;
  f.center = center;
  f.bandwidth = bandwidth;
  return f;
}

Feature Feature::swirl_2d(double strength) {
  return polynomial({{0, {0, 1}, -strength}, {1, {1, 0}, strength}});
}

void Feature::validate(int n) const {
  if (kind == Kind::polynomial) {
    require(!terms.empty(), "polynomial feature needs at least one term");
    for (const auto& t : terms) {
      require(t.component >= 0 && t.component < n,
              "polynomial feature component out of range");
      require(static_cast<int>(t.exponents.size()) == n,
              "polynomial feature exponent list must match dimension");
      for (int e : t.exponents) require(e >= 0, "negative exponent");
    }
  } else {
    require(direction.size() == n && center.size() == n,
            "gaussian bump direction/center must match dimension");
    require(bandwidth > 0.0, "gaussian bump bandwidth must be positive");
  }
}

MatrixXd Feature::eval_all(const MatrixXd& Z) const {
  const Eigen::Index N = Z.rows();
  const Eigen::Index n = Z.cols();
  MatrixXd out = MatrixXd::Zero(N, n);
  if (kind == Kind::polynomial) {
    for (const auto& t : terms) {
      Eigen::ArrayXd term = Eigen::ArrayXd::Constant(N, t.coeff);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (int e = 0; e < t.exponents[static_cast<std::size_t>(j)]; ++e)
          term *= Z.col(j).array();
      }
      out.col(t.component).array() += term;
    }
  } else {
    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    Eigen::ArrayXd sq = (Z.rowwise() - center.transpose())
                            .rowwise()
                            .squaredNorm()
                            .array();
    Eigen::ArrayXd w = (-sq * inv2h2).exp();
    out = w.matrix() * direction.transpose();
  }
  return out;
}

MapFamily MapFamily::translation(int n) {
  require(n >= 1, "translation family needs n >= 1");
  MapFamily f;
  f.kind_ = Kind::translation;
  f.n_ = n;
  f.d_ = n;
  return f;
}

MapFamily MapFamily::location_scale_1d() {
  MapFamily f;
  f.kind_ = Kind::location_scale_1d;
  f.n_ = 1;
  f.d_ = 2;
  return f;
}

MapFamily MapFamily::affine_nd(int n) {
  require(n >= 1, "affine family needs n >= 1");
  MapFamily f;
  f.kind_ = Kind::affine_nd;
  f.n_ = n;
  f.d_ = n + n * n;
  return f;
}

MapFamily MapFamily::rotation_2d() {
  MapFamily f;
  f.kind_ = Kind::rotation_2d;
  f.n_ = 2;
  f.d_ = 1;
  return f;
}

MapFamily MapFamily::feature_expansion(int n, std::vector<Feature> features) {
  require(n >= 1, "feature expansion needs n >= 1");
  require(!features.empty(), "feature expansion needs at least one feature");
  for (const auto& feat : features) feat.validate(n);
  MapFamily f;
  f.kind_ = Kind::feature_expansion;
  f.n_ = n;
  f.d_ = static_cast<int>(features.size());
  f.features_ = std::move(features);
  return f;
}

std::string MapFamily::kind_name() const {
  switch (kind_) {
    case Kind::translation:
      return "translation";
    case Kind::location_scale_1d:
      return "location-scale-1d";
    case Kind::affine_nd:
      return "affine-nd";
    case Kind::rotation_2d:
      return "rotation-2d";
    case Kind::feature_expansion:
      return "feature-expansion";
  }
  return "?";
}

bool MapFamily::admissible(const VectorXd& theta) const noexcept {
  if (theta.size() != d_ || !theta.allFinite()) return false;
  switch (kind_) {
    case Kind::location_scale_1d:
      return theta(1) > 0.0;
    case Kind::affine_nd:
      return std::abs(affine_A(theta, n_).determinant()) > kMinAffineDet;
    default:
      return true;
  }
}

void MapFamily::require_admissible(const VectorXd& theta) const {
  require(theta.size() == d_, kind_name() + ": theta has length " +
                                  std::to_string(theta.size()) + ", expected " +
                                  std::to_string(d_));
  require(theta.allFinite(), kind_name() + ": theta has non-finite entries");
  switch (kind_) {
    case Kind::location_scale_1d:
      require(theta(1) > 0.0,
              "location-scale-1d: scale must be positive (admissible set "
              "m in R, s > 0)");
      break;
    case Kind::affine_nd:
      require(std::abs(affine_A(theta, n_).determinant()) > kMinAffineDet,
              "affine-nd: matrix part must be invertible");
      break;
    default:
      break;
  }
}

VectorXd MapFamily::project_admissible(VectorXd theta) const {
  switch (kind_) {
    case Kind::location_scale_1d:
      if (theta(1) <= 0.0) theta(1) = 1e-6;
      return theta;
    case Kind::affine_nd: {
      MatrixXd A = affine_A(theta, n_);
      double bump = 1e-6;
      while (std::abs(A.determinant()) <= kMinAffineDet && bump < 1.0) {
        A += bump * MatrixXd::Identity(n_, n_);
        bump *= 2.0;
      }
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) theta(n_ + i * n_ + j) = A(i, j);
      return theta;
    }
    default:
      return theta;
  }
}

VectorXd MapFamily::forward(const VectorXd& theta, const VectorXd& z) const {
  require_admissible(theta);
  require(z.size() == n_, kind_name() + ": z has wrong dimension");
  return forward_all(theta, z.transpose()).row(0).transpose();
}

MatrixXd MapFamily::forward_all(const VectorXd& theta, const MatrixXd& Z) const {
  require_admissible(theta);
  require(Z.cols() == n_, kind_name() + ": sample matrix has wrong dimension");
  switch (kind_) {
    case Kind::translation:
      return Z.rowwise() + theta.transpose();
    case Kind::location_scale_1d:
      return (theta(0) + theta(1) * Z.array()).matrix();
    case Kind::affine_nd: {
      const MatrixXd A = affine_A(theta, n_);
      return (Z * A.transpose()).rowwise() + theta.head(n_).transpose();
    }
    case Kind::rotation_2d: {
      const double c = std::cos(theta(0)), s = std::sin(theta(0));
      MatrixXd R(2, 2);
      R << c, -s, s, c;
      return Z * R.transpose();
    }
    case Kind::feature_expansion: {
      MatrixXd out = Z;
      for (int k = 0; k < d_; ++k)
        out += theta(k) * features_[static_cast<std::size_t>(k)].eval_all(Z);
      return out;
    }
  }
  return {};
}

MatrixXd MapFamily::jacobian_theta(const VectorXd& theta,
                                   const VectorXd& z) const {
  require_admissible(theta);
  require(z.size() == n_, kind_name() + ": z has wrong dimension");
  MatrixXd J(d_, n_);
  switch (kind_) {
    case Kind::translation:
      J = MatrixXd::Identity(d_, n_);
      break;
    case Kind::location_scale_1d:
      J(0, 0) = 1.0;
      J(1, 0) = z(0);
      break;
    case Kind::affine_nd: {
      J.setZero();
      for (int i = 0; i < n_; ++i) J(i, i) = 1.0;  // d g / d b_i = e_i
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) J(n_ + i * n_ + j, i) = z(j);
      break;
    }
    case Kind::rotation_2d: {
      const double c = std::cos(theta(0)), s = std::sin(theta(0));
      // d/dtheta R(theta) z
      J(0, 0) = -s * z(0) - c * z(1);
      J(0, 1) = c * z(0) - s * z(1);
      break;
    }
    case Kind::feature_expansion: {
      const MatrixXd Zrow = z.transpose();
      for (int k = 0; k < d_; ++k)
        J.row(k) = features_[static_cast<std::size_t>(k)].eval_all(Zrow).row(0);
      break;
    }
  }
  return J;
}

VectorXd MapFamily::map_velocity(const VectorXd& theta, const VectorXd& thetadot,
                                 const VectorXd& z) const {
  require(thetadot.size() == d_,
          kind_name() + ": thetadot has wrong dimension");
  return jacobian_theta(theta, z).transpose() * thetadot;
}

MatrixXd MapFamily::map_velocity_all(const VectorXd& theta,
                                     const VectorXd& thetadot,
                                     const MatrixXd& Z) const {
  require_admissible(theta);
  require(thetadot.size() == d_,
          kind_name() + ": thetadot has wrong dimension");
  require(Z.cols() == n_, kind_name() + ": sample matrix has wrong dimension");
  const Eigen::Index N = Z.rows();
  switch (kind_) {
    case Kind::translation:
      return MatrixXd::Ones(N, 1) * thetadot.transpose();
    case Kind::location_scale_1d:
      return (thetadot(0) + thetadot(1) * Z.array()).matrix();
    case Kind::affine_nd: {
      MatrixXd Adot(n_, n_);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) Adot(i, j) = thetadot(n_ + i * n_ + j);
      return (Z * Adot.transpose()).rowwise() + thetadot.head(n_).transpose();
    }
    case Kind::rotation_2d: {
      const double c = std::cos(theta(0)), s = std::sin(theta(0));
      MatrixXd Rdot(2, 2);
      Rdot << -s, -c, c, -s;
      return thetadot(0) * (Z * Rdot.transpose());
    }
    case Kind::feature_expansion: {
      MatrixXd out = MatrixXd::Zero(N, n_);
      for (int k = 0; k < d_; ++k)
        out += thetadot(k) * features_[static_cast<std::size_t>(k)].eval_all(Z);
      return out;
    }
  }
  return {};
}

std::optional<std::pair<VectorXd, MatrixXd>> MapFamily::gaussian_image(
    const VectorXd& theta, const BaseMeasure& base) const {
  if (base.kind != BaseMeasure::Kind::standard_normal || base.dim != n_)
    return std::nullopt;
  require_admissible(theta);
  switch (kind_) {
    case Kind::translation:
      return std::make_pair(theta, MatrixXd::Identity(n_, n_));
    case Kind::location_scale_1d: {
      VectorXd m(1);
      m << theta(0);
      MatrixXd S(1, 1);
      S << theta(1) * theta(1);
      return std::make_pair(m, S);
    }
    case Kind::affine_nd: {
      const MatrixXd A = affine_A(theta, n_);
      return std::make_pair(VectorXd(theta.head(n_)), MatrixXd(A * A.transpose()));
    }
    case Kind::rotation_2d:
      return std::make_pair(VectorXd::Zero(2), MatrixXd::Identity(2, 2));
    case Kind::feature_expansion:
      return std::nullopt;
  }
  return std::nullopt;
}

TestFunction TestFunction::one() {
  TestFunction f;
  f.name = "one";
  f.eval = [](const RowVectorXd&) { return 1.0; };
  f.gaussian_expectation = [](const VectorXd&, const MatrixXd&) { return 1.0; };
  f.exact_value = 1.0;  // normalization holds for every pushforward
  return f;
}

TestFunction TestFunction::coordinate(int i) {
  TestFunction f;
  f.name = "coordinate_" + std::to_string(i);
  f.eval = [i](const RowVectorXd& x) { return x(i); };
  f.gaussian_expectation = [i](const VectorXd& mean, const MatrixXd&) {
    return mean(i);
  };
  return f;
}

TestFunction TestFunction::squared_norm() {
  TestFunction f;
  f.name = "squared_norm";
  f.eval = [](const RowVectorXd& x) { return x.squaredNorm(); };
  f.gaussian_expectation = [](const VectorXd& mean, const MatrixXd& cov) {
    return mean.squaredNorm() + cov.trace();
  };
  return f;
}

TestFunction TestFunction::polynomial_1d(const VectorXd& coeffs) {
  TestFunction f;
  f.name = "polynomial_1d";
  f.eval = [coeffs](const RowVectorXd& x) {
    double acc = 0.0;
    for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k)
      acc = acc * x(0) + coeffs(k);
    return acc;
  };
  f.gaussian_expectation = [coeffs](const VectorXd& mean, const MatrixXd& cov) {
    // E x^k for x ~ N(m, s^2): m_k = m m_{k-1} + (k-1) s^2 m_{k-2}
    const double m = mean(0), s2 = cov(0, 0);
    std::vector<double> mom(static_cast<std::size_t>(coeffs.size()), 1.0);
    for (std::size_t k = 1; k < mom.size(); ++k)
      mom[k] = m * mom[k - 1] + (k >= 2 ? (k - 1) * s2 * mom[k - 2] : 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < mom.size(); ++k) acc += coeffs(k) * mom[k];
    return acc;
  };
  return f;
}

std::pair<double, double> pushforward_consistency(
    const MapFamily& fam, const VectorXd& theta, const SampleBatch& batch,
    const TestFunction& f, const ConsistencyOptions& opts) {
  require(static_cast<bool>(f.eval), "test function has no evaluator");
  require(batch.dim() == fam.input_dim(),
          "batch dimension does not match the family input dimension");

  const MatrixXd images = fam.forward_all(theta, batch.points);
  VectorXd values(batch.count);
  for (Eigen::Index i = 0; i < batch.count; ++i) {
    values(i) = f.eval(images.row(i));
    if (!std::isfinite(values(i)))
      throw EvaluationError("non-finite test function value",
                            static_cast<std::size_t>(i));
  }
  const double lhs = mean_reduce(values);

  if (f.exact_value) return {lhs, *f.exact_value};
  const auto gaussian = fam.gaussian_image(theta, batch.measure);
  if (gaussian && f.gaussian_expectation) {
    return {lhs, f.gaussian_expectation(gaussian->first, gaussian->second)};
  }
  if (opts.reference_samples > 0) {
    const SampleBatch ref =
        draw(batch.measure, opts.reference_seed, opts.reference_samples);
    const MatrixXd ref_images = fam.forward_all(theta, ref.points);
    VectorXd ref_values(ref.count);
    for (Eigen::Index i = 0; i < ref.count; ++i)
      ref_values(i) = f.eval(ref_images.row(i));
    return {lhs, mean_reduce(ref_values)};
  }
  throw ValidationError(
      "pushforward consistency: no closed form for this family/test function "
      "and no reference estimate configured");
}

}  // namespace paramot
