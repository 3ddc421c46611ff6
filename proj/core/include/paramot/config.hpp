#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paramot/energies.hpp"
#include "paramot/geodesic.hpp"
#include "paramot/metric.hpp"
#include "paramot/potential.hpp"
#include "paramot/pushforward.hpp"
#include "paramot/sampler.hpp"

namespace paramot {

enum class Subcommand { metric, geodesic, distance, extended, oracle_compare };

std::string subcommand_name(Subcommand s);
std::optional<Subcommand> subcommand_from_name(const std::string& name);

// Basis choice as written in a config; resolved against sample images at run
// time (the rbf lattice needs the empirical bounding box).
struct BasisSpec {
  PotentialBasis::Kind kind = PotentialBasis::Kind::polynomial;
  int degree = 2;                // polynomial
  MatrixXd centers;              // rbf, explicit centers
  std::vector<int> lattice;      // rbf, per-dimension lattice counts
  double bandwidth = 0.0;        // rbf; 0 means lattice spacing

  bool operator==(const BasisSpec& other) const;
};

// Full description of one batch run. Numeric outputs are a pure function of
// this struct; the seed is mandatory so no run ever picks up entropy.
struct RunConfig {
  Subcommand subcommand = Subcommand::distance;
  MapFamily family = MapFamily::translation(1);
  BaseMeasure base = BaseMeasure::standard_normal(1);
  std::optional<VectorXd> theta;           // metric
  std::optional<VectorXd> theta0, theta1;  // path subcommands
  std::uint64_t seed = 0;
  Eigen::Index samples = 100000;
  int knots = 16;
  BasisSpec basis;
  MetricTensor::Kind metric_kind = MetricTensor::Kind::wasserstein;
  MetricOptions metric_opts;
  PointwisePotential potential;
  InteractionPotential interaction;
  PairingMode pairing = PairingMode::automatic;
  bool flip_energy_sign = false;
  SolverOptions solver;
  double oracle_p = 2.0;
  Eigen::Index oracle_quad_points = 4096;

  bool operator==(const RunConfig& other) const;
};

// Carries every validation problem found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Parses the documented JSON config format. Strict: unknown keys are errors;
// all problems are reported together. `subcommand` supplies the CLI
// subcommand when the file omits it (a conflicting value is an error).
RunConfig parse_config(const std::string& text,
                       std::optional<Subcommand> subcommand = std::nullopt);

// Canonical echo with every default filled in; parse_config(render_config(c))
// reproduces c exactly.
std::string render_config(const RunConfig& config);

}  // namespace paramot
