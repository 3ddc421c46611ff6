#pragma once

#include <string>
#include <vector>

#include "paramot/common.hpp"

namespace paramot {

// Finite basis for the potential Phi: Omega -> R. Constants are excluded by
// construction: only grad Phi enters the transport problem, and dropping the
// null direction keeps the Galerkin normal matrix full rank.
class PotentialBasis {
 public:
  enum class Kind { polynomial, gaussian_rbf };

  // Monomials x^alpha with 1 <= |alpha| <= degree, graded lexicographic order.
  static PotentialBasis polynomial(int ambient_dim, int degree);
  // psi_j(x) = exp(-|x - c_j|^2 / (2 h^2)), one per center row.
  static PotentialBasis gaussian_rbf(const MatrixXd& centers, double bandwidth);
  // Centers on a fixed per-dimension lattice over the bounding box of the
  // given images (deterministic in the images); bandwidth = lattice spacing.
  static PotentialBasis gaussian_rbf_lattice(const MatrixXd& images,
                                             const std::vector<int>& counts);

  Kind kind() const { return kind_; }
  int ambient_dim() const { return n_; }
  Eigen::Index size() const;  // J
  int degree() const { return degree_; }
  const MatrixXd& centers() const { return centers_; }
  double bandwidth() const { return bandwidth_; }

  // Human-readable name of basis element j ("x1^2*x2", "rbf[3]").
  std::string element_name(Eigen::Index j) const;

  // grad psi_j at every image row; element j of the result is N x n.
  std::vector<MatrixXd> gradient_features(const MatrixXd& images) const;

  // Single-point gradient of Phi_c = sum_j c_j psi_j.
  VectorXd grad_phi(const VectorXd& coeffs, const VectorXd& x) const;

  // Scalar basis values psi_j(x), mostly for diagnostics and tests.
  VectorXd values(const VectorXd& x) const;

  bool operator==(const PotentialBasis& other) const;

 private:
  Kind kind_ = Kind::polynomial;
  int n_ = 1;
  int degree_ = 0;                       // polynomial only
  std::vector<std::vector<int>> alpha_;  // polynomial multi-indices
  MatrixXd centers_;                     // rbf only, J x n
  double bandwidth_ = 1.0;
};

struct PotentialCoefficients {
  VectorXd c;
  PotentialBasis basis;
};

VectorXd grad_phi(const PotentialBasis& basis, const PotentialCoefficients& c,
                  const VectorXd& x);

// Stacked Galerkin assembly: row block i holds grad psi_j(x_i) over columns j,
// so the matrix is (N*n) x J and (matrix * c) stacks grad Phi_c per image.
MatrixXd gradient_feature_matrix(const PotentialBasis& basis,
                                 const MatrixXd& images);

}  // namespace paramot
