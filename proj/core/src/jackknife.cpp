#include "paramot/jackknife.hpp"

#include <cmath>

#include "paramot/parallel.hpp"

namespace paramot {

VectorXd block_sums(const Eigen::ArrayXd& buf, int nblocks) {
  const Eigen::Index n = buf.size();
  VectorXd sums(nblocks);
  for (int b = 0; b < nblocks; ++b) {
    const Eigen::Index lo = n * b / nblocks;
    const Eigen::Index hi = n * (b + 1) / nblocks;
    sums(b) = pairwise_sum(buf.data() + lo, static_cast<std::size_t>(hi - lo));
  }
  return sums;
}

VectorXd block_counts(Eigen::Index n, int nblocks) {
  VectorXd counts(nblocks);
  for (int b = 0; b < nblocks; ++b)
    counts(b) = static_cast<double>(n * (b + 1) / nblocks - n * b / nblocks);
  return counts;
}

double jackknife_se(const VectorXd& leave_one_out) {
  const int B = static_cast<int>(leave_one_out.size());
  if (B < 2) return 0.0;
  const double mean = leave_one_out.mean();
  const double ss = (leave_one_out.array() - mean).square().sum();
  return std::sqrt(ss * (B - 1) / B);
}

}  // namespace paramot
