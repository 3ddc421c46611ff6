#pragma once

#include "paramot/common.hpp"

namespace paramot {

// Sums of a buffer over fixed contiguous blocks [n*b/B, n*(b+1)/B); the
// ranges depend only on (n, B), each block summed with the pairwise tree.
VectorXd block_sums(const Eigen::ArrayXd& buf, int nblocks);

VectorXd block_counts(Eigen::Index n, int nblocks);

// Standard error from leave-one-out estimates: sqrt((B-1)/B * sum (x_b - mean)^2).
double jackknife_se(const VectorXd& leave_one_out);

}  // namespace paramot
