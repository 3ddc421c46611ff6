#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace paramot {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad inputs: inadmissible parameters, dimension mismatches, malformed data.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// A per-sample evaluation produced NaN/inf; carries the first offending index.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& msg, std::size_t sample_index)
      : Error(msg + " (sample index " + std::to_string(sample_index) + ")"),
        sample_index_(sample_index) {}
  std::size_t sample_index() const noexcept { return sample_index_; }

 private:
  std::size_t sample_index_;
};

// Linear solve or optimizer failure (rank deficiency, divergence).
class SolveError : public Error {
 public:
  explicit SolveError(const std::string& msg) : Error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

// exact elementwise equality, shape included (Eigen lacks a bool operator==)
inline bool same_values(const MatrixXd& a, const MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}
inline bool same_values(const VectorXd& a, const VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace paramot
