#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "paramot/common.hpp"

namespace paramot {

// Base measure mu(z) on Z. Sampling is counter-based: sample i, dimension j
// consumes one splitmix64 output indexed by i*dim+j, so batches are
// bit-identical across runs and worker counts. Normals come from the uniform
// stream through the Acklam inverse CDF.
struct BaseMeasure {
  enum class Kind { standard_normal, uniform_box, tabulated_quantile };

  Kind kind = Kind::standard_normal;
  int dim = 1;
  // uniform_box only
  VectorXd lo, hi;
  // tabulated_quantile only (1D): u strictly increasing in (0,1),
  // q nondecreasing; sampled by linear interpolation of the quantile.
  VectorXd table_u, table_q;

  static BaseMeasure standard_normal(int dim);
  static BaseMeasure uniform_box(const VectorXd& lo, const VectorXd& hi);
  static BaseMeasure unit_box(int dim);
  static BaseMeasure tabulated_quantile(const VectorXd& u, const VectorXd& q);

  void validate() const;  // throws ValidationError
  std::string kind_name() const;

  bool operator==(const BaseMeasure& other) const;
};

// Immutable batch of base-space samples. Regenerating from
// (measure, seed, count) reproduces the identical matrix.
struct SampleBatch {
  BaseMeasure measure;
  std::uint64_t seed = 0;
  Eigen::Index count = 0;
  MatrixXd points;  // count x measure.dim

  Eigen::Index dim() const { return points.cols(); }
};

SampleBatch draw(const BaseMeasure& measure, std::uint64_t seed,
                 Eigen::Index count);

// Arithmetic mean of f over the batch under the fixed blocked-pairwise
// reduction. f may be invoked concurrently from worker threads and must be
// pure. Non-finite evaluations raise EvaluationError with the first
// offending sample index.
double expect(const SampleBatch& batch,
              const std::function<double(const RowVectorXd&)>& f);

// Mean of a precomputed per-sample value buffer; same reduction contract.
double mean_reduce(const VectorXd& values);

// Raw counter-based generator, exposed for modules that need auxiliary
// deterministic streams (reference estimates, probe generation in tests).
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter);
// Uniform double in (0,1), never exactly 0 or 1.
double uniform01_at(std::uint64_t seed, std::uint64_t counter);

}  // namespace paramot
