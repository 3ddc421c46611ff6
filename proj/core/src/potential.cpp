#include "paramot/potential.hpp"

#include <cmath>

namespace paramot {

namespace {

// multi-indices with 1 <= |alpha| <= degree, graded lexicographic
std::vector<std::vector<int>> enumerate_multi_indices(int n, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> alpha(static_cast<std::size_t>(n), 0);
  for (int total = 1; total <= degree; ++total) {
    // enumerate compositions of `total` into n parts, lexicographic
    std::fill(alpha.begin(), alpha.end(), 0);
    alpha[0] = total;
    while (true) {
      out.push_back(alpha);
      // next composition: find rightmost position before last with value > 0
      int k = n - 2;
      while (k >= 0 && alpha[static_cast<std::size_t>(k)] == 0) --k;
      if (k < 0) break;
      --alpha[static_cast<std::size_t>(k)];
      int rest = total;
      for (int j = 0; j <= k; ++j) rest -= alpha[static_cast<std::size_t>(j)];
      for (int j = k + 1; j < n; ++j) alpha[static_cast<std::size_t>(j)] = 0;
      alpha[static_cast<std::size_t>(k + 1)] = rest;
    }
  }
  return out;
}

}  // namespace

PotentialBasis PotentialBasis::polynomial(int ambient_dim, int degree) {
  require(ambient_dim >= 1, "polynomial basis needs ambient dimension >= 1");
  require(degree >= 1, "polynomial basis needs degree >= 1");
  PotentialBasis b;
  b.kind_ = Kind::polynomial;
  b.n_ = ambient_dim;
  b.degree_ = degree;
  b.alpha_ = enumerate_multi_indices(ambient_dim, degree);
  return b;
}

PotentialBasis PotentialBasis::gaussian_rbf(const MatrixXd& centers,
                                            double bandwidth) {
  require(centers.rows() >= 1, "rbf basis needs at least one center");
  require(centers.allFinite(), "rbf centers must be finite");
  require(bandwidth > 0.0, "rbf bandwidth must be positive");
  PotentialBasis b;
  b.kind_ = Kind::gaussian_rbf;
  b.n_ = static_cast<int>(centers.cols());
  b.centers_ = centers;
  b.bandwidth_ = bandwidth;
  return b;
}

PotentialBasis PotentialBasis::gaussian_rbf_lattice(
    const MatrixXd& images, const std::vector<int>& counts) {
  const int n = static_cast<int>(images.cols());
  require(static_cast<int>(counts.size()) == n,
          "lattice counts must match dimension");
  Eigen::Index total = 1;
  for (int c : counts) {
    require(c >= 2, "lattice needs at least 2 points per dimension");
    total *= c;
  }
  const VectorXd lo = images.colwise().minCoeff();
  const VectorXd hi = images.colwise().maxCoeff();
  double spacing = 0.0;
  MatrixXd centers(total, n);
  for (Eigen::Index idx = 0; idx < total; ++idx) {
    Eigen::Index rem = idx;
    for (int j = 0; j < n; ++j) {
      const int cj = counts[static_cast<std::size_t>(j)];
      const Eigen::Index pos = rem % cj;
      rem /= cj;
      const double step = (hi(j) - lo(j)) / (cj - 1);
      centers(idx, j) = lo(j) + step * static_cast<double>(pos);
      spacing = std::max(spacing, step);
    }
  }
  if (spacing <= 0.0) spacing = 1.0;  // degenerate box
  return gaussian_rbf(centers, spacing);
}

Eigen::Index PotentialBasis::size() const {
  return kind_ == Kind::polynomial ? static_cast<Eigen::Index>(alpha_.size())
                                   : centers_.rows();
}

bool PotentialBasis::operator==(const PotentialBasis& other) const {
  return kind_ == other.kind_ && n_ == other.n_ && degree_ == other.degree_ &&
         alpha_ == other.alpha_ && same_values(centers_, other.centers_) &&
         bandwidth_ == other.bandwidth_;
}

std::string PotentialBasis::element_name(Eigen::Index j) const {
  if (kind_ == Kind::gaussian_rbf) return "rbf[" + std::to_string(j) + "]";
  const auto& a = alpha_[static_cast<std::size_t>(j)];
  std::string s;
  for (int k = 0; k < n_; ++k) {
    if (a[static_cast<std::size_t>(k)] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(k + 1);
    if (a[static_cast<std::size_t>(k)] > 1)
      s += "^" + std::to_string(a[static_cast<std::size_t>(k)]);
  }
  return s;
}

std::vector<MatrixXd> PotentialBasis::gradient_features(
    const MatrixXd& images) const {
  require(images.cols() == n_, "images do not match basis dimension");
  require(images.allFinite(), "images must be finite");
  const Eigen::Index N = images.rows();
  const Eigen::Index J = size();
  std::vector<MatrixXd> G(static_cast<std::size_t>(J));

  if (kind_ == Kind::polynomial) {
    // power table per dimension up to max degree
    std::vector<std::vector<Eigen::ArrayXd>> pow(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) {
      auto& pk = pow[static_cast<std::size_t>(k)];
      pk.resize(static_cast<std::size_t>(degree_) + 1);
      pk[0] = Eigen::ArrayXd::Ones(N);
      for (int e = 1; e <= degree_; ++e)
        pk[static_cast<std::size_t>(e)] =
            pk[static_cast<std::size_t>(e - 1)] * images.col(k).array();
    }
    for (Eigen::Index j = 0; j < J; ++j) {
      const auto& a = alpha_[static_cast<std::size_t>(j)];
      MatrixXd g = MatrixXd::Zero(N, n_);
      for (int k = 0; k < n_; ++k) {
        const int ak = a[static_cast<std::size_t>(k)];
        if (ak == 0) continue;
        Eigen::ArrayXd col = Eigen::ArrayXd::Constant(N, static_cast<double>(ak));
        for (int m = 0; m < n_; ++m) {
          const int e = a[static_cast<std::size_t>(m)] - (m == k ? 1 : 0);
          col *= pow[static_cast<std::size_t>(m)][static_cast<std::size_t>(e)];
        }
        g.col(k) = col;
      }
      G[static_cast<std::size_t>(j)] = std::move(g);
    }
  } else {
    const double inv_h2 = 1.0 / (bandwidth_ * bandwidth_);
    for (Eigen::Index j = 0; j < J; ++j) {
      const MatrixXd diff = images.rowwise() - centers_.row(j);
      const Eigen::ArrayXd w =
          (-0.5 * inv_h2 * diff.rowwise().squaredNorm().array()).exp();
      G[static_cast<std::size_t>(j)] =
          (-inv_h2) * (diff.array().colwise() * w).matrix();
    }
  }
  return G;
}

VectorXd PotentialBasis::grad_phi(const VectorXd& coeffs,
                                  const VectorXd& x) const {
  require(coeffs.size() == size(), "coefficient length does not match basis");
  require(x.size() == n_, "point does not match basis dimension");
  const auto G = gradient_features(x.transpose());
  VectorXd g = VectorXd::Zero(n_);
  for (Eigen::Index j = 0; j < size(); ++j)
    g += coeffs(j) * G[static_cast<std::size_t>(j)].row(0).transpose();
  return g;
}

VectorXd PotentialBasis::values(const VectorXd& x) const {
  require(x.size() == n_, "point does not match basis dimension");
  VectorXd v(size());
  if (kind_ == Kind::polynomial) {
    for (Eigen::Index j = 0; j < size(); ++j) {
      const auto& a = alpha_[static_cast<std::size_t>(j)];
      double t = 1.0;
      for (int k = 0; k < n_; ++k)
        for (int e = 0; e < a[static_cast<std::size_t>(k)]; ++e) t *= x(k);
      v(j) = t;
    }
  } else {
    const double inv2h2 = 1.0 / (2.0 * bandwidth_ * bandwidth_);
    for (Eigen::Index j = 0; j < size(); ++j)
      v(j) = std::exp(-(x.transpose() - centers_.row(j)).squaredNorm() * inv2h2);
  }
  return v;
}

VectorXd grad_phi(const PotentialBasis& basis, const PotentialCoefficients& c,
                  const VectorXd& x) {
  require(c.basis == basis, "coefficients were built for a different basis");
  return basis.grad_phi(c.c, x);
}

MatrixXd gradient_feature_matrix(const PotentialBasis& basis,
                                 const MatrixXd& images) {
  const Eigen::Index N = images.rows();
  const Eigen::Index n = basis.ambient_dim();
  const Eigen::Index J = basis.size();
  const auto G = basis.gradient_features(images);
  MatrixXd M(N * n, J);
  for (Eigen::Index j = 0; j < J; ++j) {
    const MatrixXd& g = G[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < N; ++i)
      M.block(i * n, j, n, 1) = g.row(i).transpose();
  }
  return M;
}

}  // namespace paramot
