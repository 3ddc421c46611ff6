#include "paramot/sampler.hpp"

#include <cmath>

#include "paramot/normal.hpp"
#include "paramot/parallel.hpp"

namespace paramot {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform01_at(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = splitmix64_at(seed, counter) >> 11;  // 53 bits
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

BaseMeasure BaseMeasure::standard_normal(int dim) {
  BaseMeasure m;
  m.kind = Kind::standard_normal;
  m.dim = dim;
  m.validate();
  return m;
}

BaseMeasure BaseMeasure::uniform_box(const VectorXd& lo, const VectorXd& hi) {
  BaseMeasure m;
  m.kind = Kind::uniform_box;
  m.dim = static_cast<int>(lo.size());
  m.lo = lo;
  m.hi = hi;
  m.validate();
  return m;
}

BaseMeasure BaseMeasure::unit_box(int dim) {
  return uniform_box(VectorXd::Zero(dim), VectorXd::Ones(dim));
}

BaseMeasure BaseMeasure::tabulated_quantile(const VectorXd& u,
                                            const VectorXd& q) {
  BaseMeasure m;
  m.kind = Kind::tabulated_quantile;
  m.dim = 1;
  m.table_u = u;
  m.table_q = q;
  m.validate();
  return m;
}

void BaseMeasure::validate() const {
  require(dim >= 1, "base measure dimension must be positive");
  switch (kind) {
    case Kind::standard_normal:
      break;
    case Kind::uniform_box:
      require(lo.size() == dim && hi.size() == dim,
              "uniform-box bounds must match the dimension");
      require(lo.allFinite() && hi.allFinite(),
              "uniform-box bounds must be finite");
      require((lo.array() < hi.array()).all(),
              "uniform-box requires lo < hi in every dimension");
      break;
    case Kind::tabulated_quantile: {
      require(dim == 1, "tabulated quantile measures are 1D only");
      require(table_u.size() >= 2 && table_u.size() == table_q.size(),
              "tabulated quantile needs matching u/q grids with >= 2 points");
      require(table_u.allFinite() && table_q.allFinite(),
              "tabulated quantile grids must be finite");
      require(table_u(0) > 0.0 && table_u(table_u.size() - 1) < 1.0,
              "tabulated quantile u-grid must lie inside (0,1)");
      for (Eigen::Index i = 1; i < table_u.size(); ++i) {
        require(table_u(i) > table_u(i - 1),
                "tabulated quantile u-grid must be strictly increasing");
        require(table_q(i) >= table_q(i - 1),
                "tabulated quantile is not monotone");
      }
      break;
    }
  }
}

bool BaseMeasure::operator==(const BaseMeasure& other) const {
  return kind == other.kind && dim == other.dim && same_values(lo, other.lo) &&
         same_values(hi, other.hi) && same_values(table_u, other.table_u) &&
         same_values(table_q, other.table_q);
}

std::string BaseMeasure::kind_name() const {
  switch (kind) {
    case Kind::standard_normal:
      return "standard-normal";
    case Kind::uniform_box:
      return "uniform-box";
    case Kind::tabulated_quantile:
      return "tabulated-quantile";
  }
  return "?";
}

namespace {

double interp_quantile(const VectorXd& u, const VectorXd& q, double p) {
  if (p <= u(0)) return q(0);
  const Eigen::Index m = u.size();
  if (p >= u(m - 1)) return q(m - 1);
  // binary search for the bracketing segment
  Eigen::Index lo = 0, hi = m - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (u(mid) <= p ? lo : hi) = mid;
  }
  const double w = (p - u(lo)) / (u(lo + 1) - u(lo));
  return q(lo) + w * (q(lo + 1) - q(lo));
}

}  // namespace

SampleBatch draw(const BaseMeasure& measure, std::uint64_t seed,
                 Eigen::Index count) {
  measure.validate();
  require(count >= 1, "sample count must be positive");

  SampleBatch batch;
  batch.measure = measure;
  batch.seed = seed;
  batch.count = count;
  batch.points.resize(count, measure.dim);

  const int dim = measure.dim;
  auto& points = batch.points;
  const std::size_t n = static_cast<std::size_t>(count);
  const std::size_t rows_per_block = kReduceLeaf;
  const std::size_t nblocks = (n + rows_per_block - 1) / rows_per_block;

  parallel_for_blocks(nblocks, [&](std::size_t b) {
    const std::size_t lo = b * rows_per_block;
    const std::size_t hi = std::min(n, lo + rows_per_block);
    for (std::size_t i = lo; i < hi; ++i) {
      for (int j = 0; j < dim; ++j) {
        const std::uint64_t counter =
            static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(dim) + j;
        const double u = uniform01_at(seed, counter);
        double v = 0.0;
        switch (measure.kind) {
          case BaseMeasure::Kind::standard_normal:
            v = inverse_normal_cdf(u);
            break;
          case BaseMeasure::Kind::uniform_box:
            v = measure.lo(j) + (measure.hi(j) - measure.lo(j)) * u;
            break;
          case BaseMeasure::Kind::tabulated_quantile:
            v = interp_quantile(measure.table_u, measure.table_q, u);
            break;
        }
        points(static_cast<Eigen::Index>(i), j) = v;
      }
    }
  });
  return batch;
}

double expect(const SampleBatch& batch,
              const std::function<double(const RowVectorXd&)>& f) {
  require(batch.count > 0, "expect over an empty batch");
  const std::size_t n = static_cast<std::size_t>(batch.count);
  const double sum =
      reduce_indexed(n, 0.0, [&](double& acc, std::size_t i) {
        const double v = f(batch.points.row(static_cast<Eigen::Index>(i)));
        if (!std::isfinite(v)) {
          throw EvaluationError("non-finite evaluation in expect", i);
        }
        acc += v;
      });
  return sum / static_cast<double>(batch.count);
}

double mean_reduce(const VectorXd& values) {
  const std::size_t n = static_cast<std::size_t>(values.size());
  require(n > 0, "mean of an empty vector");
  return pairwise_sum(values.data(), n) / static_cast<double>(n);
}

}  // namespace paramot
