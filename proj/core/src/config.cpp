#include "paramot/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace paramot {

using json = nlohmann::ordered_json;

std::string subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::metric:
      return "metric";
    case Subcommand::geodesic:
      return "geodesic";
    case Subcommand::distance:
      return "distance";
    case Subcommand::extended:
      return "extended";
    case Subcommand::oracle_compare:
      return "oracle-compare";
  }
  return "?";
}

std::optional<Subcommand> subcommand_from_name(const std::string& name) {
  if (name == "metric") return Subcommand::metric;
  if (name == "geodesic") return Subcommand::geodesic;
  if (name == "distance") return Subcommand::distance;
  if (name == "extended") return Subcommand::extended;
  if (name == "oracle-compare") return Subcommand::oracle_compare;
  return std::nullopt;
}

bool BasisSpec::operator==(const BasisSpec& other) const {
  return kind == other.kind && degree == other.degree &&
         same_values(centers, other.centers) && lattice == other.lattice &&
         bandwidth == other.bandwidth;
}

namespace {

bool same_opt(const std::optional<VectorXd>& a,
              const std::optional<VectorXd>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a.has_value() || same_values(*a, *b);
}

}  // namespace

bool RunConfig::operator==(const RunConfig& other) const {
  return subcommand == other.subcommand && family == other.family &&
         base == other.base && same_opt(theta, other.theta) &&
         same_opt(theta0, other.theta0) && same_opt(theta1, other.theta1) &&
         seed == other.seed && samples == other.samples &&
         knots == other.knots && basis == other.basis &&
         metric_kind == other.metric_kind &&
         metric_opts.tikhonov_rel == other.metric_opts.tikhonov_rel &&
         metric_opts.jackknife_blocks == other.metric_opts.jackknife_blocks &&
         potential == other.potential && interaction == other.interaction &&
         pairing == other.pairing &&
         flip_energy_sign == other.flip_energy_sign &&
         solver.tol == other.solver.tol &&
         solver.max_iters == other.solver.max_iters &&
         solver.fd_step == other.solver.fd_step &&
         solver.divergence_floor == other.solver.divergence_floor &&
         oracle_p == other.oracle_p &&
         oracle_quad_points == other.oracle_quad_points;
}

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error([&issues] {
        std::string msg = "invalid config:";
        for (const auto& s : issues) msg += "\n  - " + s;
        return msg;
      }()),
      issues_(std::move(issues)) {}

namespace {

struct Parser {
  std::vector<std::string> errors;

  void error(const std::string& msg) { errors.push_back(msg); }

  void check_keys(const json& j, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const bool known = std::any_of(
          allowed.begin(), allowed.end(),
          [&](const char* k) { return it.key() == k; });
      if (!known) error("unknown key '" + it.key() + "' in " + path);
    }
  }

  const json* object(const json& j, const std::string& path,
                     const std::string& key, bool required = false) {
    if (!j.contains(key)) {
      if (required) error(path + "." + key + " is required");
      return nullptr;
    }
    if (!j.at(key).is_object()) {
      error(path + "." + key + " must be an object");
      return nullptr;
    }
    return &j.at(key);
  }

  std::optional<double> number(const json& j, const std::string& path,
                               const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_number()) {
      error(path + "." + key + " must be a number");
      return std::nullopt;
    }
    return j.at(key).get<double>();
  }

  double number_or(const json& j, const std::string& path,
                   const std::string& key, double fallback) {
    return number(j, path, key).value_or(fallback);
  }

  std::optional<long long> integer(const json& j, const std::string& path,
                                   const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_number_integer() && !j.at(key).is_number_unsigned()) {
      error(path + "." + key + " must be an integer");
      return std::nullopt;
    }
    return j.at(key).get<long long>();
  }

  std::optional<std::string> string(const json& j, const std::string& path,
                                    const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_string()) {
      error(path + "." + key + " must be a string");
      return std::nullopt;
    }
    return j.at(key).get<std::string>();
  }

  std::optional<bool> boolean(const json& j, const std::string& path,
                              const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_boolean()) {
      error(path + "." + key + " must be a boolean");
      return std::nullopt;
    }
    return j.at(key).get<bool>();
  }

  std::optional<VectorXd> vector(const json& j, const std::string& path,
                                 const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    const json& v = j.at(key);
    if (!v.is_array()) {
      error(path + "." + key + " must be an array of numbers");
      return std::nullopt;
    }
    VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        error(path + "." + key + " must be an array of numbers");
        return std::nullopt;
      }
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }

  std::optional<MatrixXd> matrix(const json& j, const std::string& path,
                                 const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    const json& v = j.at(key);
    if (!v.is_array() || v.empty()) {
      error(path + "." + key + " must be a non-empty array of rows");
      return std::nullopt;
    }
    std::vector<VectorXd> rows;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_array()) {
        error(path + "." + key + " rows must be arrays");
        return std::nullopt;
      }
      VectorXd row(v[i].size());
      for (std::size_t c = 0; c < v[i].size(); ++c) {
        if (!v[i][c].is_number()) {
          error(path + "." + key + " entries must be numbers");
          return std::nullopt;
        }
        row(static_cast<Eigen::Index>(c)) = v[i][c].get<double>();
      }
      if (!rows.empty() && rows.front().size() != row.size()) {
        error(path + "." + key + " rows have inconsistent lengths");
        return std::nullopt;
      }
      rows.push_back(std::move(row));
    }
    MatrixXd out(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return out;
  }
};

MapFamily parse_family(Parser& P, const json& top) {
  const json* fj = P.object(top, "config", "family", /*required=*/true);
  if (!fj) return MapFamily::translation(1);
  P.check_keys(*fj, "family", {"kind", "dim", "features"});
  const auto kind = P.string(*fj, "family", "kind");
  if (!kind) {
    P.error("family.kind is required");
    return MapFamily::translation(1);
  }
  try {
    if (*kind == "translation") {
      const auto dim = P.integer(*fj, "family", "dim");
      if (!dim) {
        P.error("family.dim is required for translation");
        return MapFamily::translation(1);
      }
      return MapFamily::translation(static_cast<int>(*dim));
    }
    if (*kind == "location-scale-1d") return MapFamily::location_scale_1d();
    if (*kind == "affine-nd") {
      const auto dim = P.integer(*fj, "family", "dim");
      if (!dim) {
        P.error("family.dim is required for affine-nd");
        return MapFamily::translation(1);
      }
      return MapFamily::affine_nd(static_cast<int>(*dim));
    }
    if (*kind == "rotation-2d") return MapFamily::rotation_2d();
    if (*kind == "feature-expansion") {
      const auto dim = P.integer(*fj, "family", "dim");
      if (!dim || !fj->contains("features") || !fj->at("features").is_array()) {
        P.error("feature-expansion needs family.dim and family.features");
        return MapFamily::translation(1);
      }
      std::vector<Feature> feats;
      std::size_t idx = 0;
      for (const json& fe : fj->at("features")) {
        const std::string fpath = "family.features[" + std::to_string(idx++) + "]";
        if (!fe.is_object()) {
          P.error(fpath + " must be an object");
          continue;
        }
        P.check_keys(fe, fpath,
                     {"kind", "terms", "direction", "center", "bandwidth"});
        const auto fkind = P.string(fe, fpath, "kind");
        if (fkind == "polynomial") {
          if (!fe.contains("terms") || !fe.at("terms").is_array()) {
            P.error(fpath + ".terms must be an array");
            continue;
          }
          std::vector<Feature::PolyTerm> terms;
          std::size_t tix = 0;
          for (const json& te : fe.at("terms")) {
            const std::string tpath = fpath + ".terms[" + std::to_string(tix++) + "]";
            if (!te.is_object()) {
              P.error(tpath + " must be an object");
              continue;
            }
            P.check_keys(te, tpath, {"component", "exponents", "coeff"});
            Feature::PolyTerm t;
            t.component =
                static_cast<int>(P.integer(te, tpath, "component").value_or(0));
            const auto expv = P.vector(te, tpath, "exponents");
            if (expv)
              for (Eigen::Index e = 0; e < expv->size(); ++e)
                t.exponents.push_back(static_cast<int>((*expv)(e)));
            t.coeff = P.number_or(te, tpath, "coeff", 1.0);
            terms.push_back(std::move(t));
          }
          feats.push_back(Feature::polynomial(std::move(terms)));
        } else if (fkind == "gaussian-bump") {
          const auto dir = P.vector(fe, fpath, "direction");
          const auto cen = P.vector(fe, fpath, "center");
          const double bw = P.number_or(fe, fpath, "bandwidth", 1.0);
          if (!dir || !cen) {
            P.error(fpath + " needs direction and center");
            continue;
          }
          feats.push_back(Feature::gaussian_bump(*dir, *cen, bw));
        } else {
          P.error(fpath + ".kind must be 'polynomial' or 'gaussian-bump'");
        }
      }
      return MapFamily::feature_expansion(static_cast<int>(*dim),
                                          std::move(feats));
    }
    P.error("family.kind '" + *kind + "' is not one of translation, "
            "location-scale-1d, affine-nd, rotation-2d, feature-expansion");
  } catch (const Error& e) {
    P.error(std::string("family: ") + e.what());
  }
  return MapFamily::translation(1);
}

BaseMeasure parse_base(Parser& P, const json& top, const MapFamily& fam) {
  if (!top.contains("base"))
    return BaseMeasure::standard_normal(fam.input_dim());
  const json* bj = P.object(top, "config", "base");
  if (!bj) return BaseMeasure::standard_normal(fam.input_dim());
  P.check_keys(*bj, "base", {"kind", "dim", "lo", "hi", "u", "q"});
  const auto kind = P.string(*bj, "base", "kind");
  try {
    if (!kind || *kind == "standard-normal") {
      const auto dim = P.integer(*bj, "base", "dim");
      return BaseMeasure::standard_normal(
          dim ? static_cast<int>(*dim) : fam.input_dim());
    }
    if (*kind == "uniform-box") {
      const auto lo = P.vector(*bj, "base", "lo");
      const auto hi = P.vector(*bj, "base", "hi");
      if (!lo || !hi) {
        P.error("uniform-box base needs lo and hi arrays");
        return BaseMeasure::standard_normal(fam.input_dim());
      }
      return BaseMeasure::uniform_box(*lo, *hi);
    }
    if (*kind == "tabulated-quantile") {
      const auto u = P.vector(*bj, "base", "u");
      const auto q = P.vector(*bj, "base", "q");
      if (!u || !q) {
        P.error("tabulated-quantile base needs u and q arrays");
        return BaseMeasure::standard_normal(fam.input_dim());
      }
      return BaseMeasure::tabulated_quantile(*u, *q);
    }
    P.error("base.kind '" + *kind + "' is not one of standard-normal, "
            "uniform-box, tabulated-quantile");
  } catch (const Error& e) {
    P.error(std::string("base: ") + e.what());
  }
  return BaseMeasure::standard_normal(fam.input_dim());
}

BasisSpec parse_basis(Parser& P, const json& top, const MapFamily& fam) {
  BasisSpec spec;
  if (!top.contains("basis")) return spec;
  const json* bj = P.object(top, "config", "basis");
  if (!bj) return spec;
  P.check_keys(*bj, "basis",
               {"kind", "degree", "centers", "lattice", "bandwidth"});
  const auto kind = P.string(*bj, "basis", "kind");
  if (!kind || *kind == "polynomial") {
    spec.kind = PotentialBasis::Kind::polynomial;
    spec.degree = static_cast<int>(P.integer(*bj, "basis", "degree").value_or(2));
    if (spec.degree < 1) P.error("basis.degree must be >= 1");
    return spec;
  }
  if (*kind == "gaussian-rbf") {
    spec.kind = PotentialBasis::Kind::gaussian_rbf;
    spec.bandwidth = P.number_or(*bj, "basis", "bandwidth", 0.0);
    const auto centers = P.matrix(*bj, "basis", "centers");
    const auto lattice = P.vector(*bj, "basis", "lattice");
    if (centers && lattice) {
      P.error("basis: give either centers or lattice, not both");
    } else if (centers) {
      spec.centers = *centers;
      if (spec.centers.cols() != fam.ambient_dim())
        P.error("basis.centers columns must match the family dimension");
      if (spec.bandwidth <= 0.0)
        P.error("basis.bandwidth must be positive with explicit centers");
    } else if (lattice) {
      if (lattice->size() != fam.ambient_dim()) {
        P.error("basis.lattice must give one count per dimension");
      } else {
        for (Eigen::Index i = 0; i < lattice->size(); ++i) {
          const int c = static_cast<int>((*lattice)(i));
          if (c < 2) P.error("basis.lattice counts must be >= 2");
          spec.lattice.push_back(c);
        }
      }
    } else {
      P.error("gaussian-rbf basis needs centers or lattice");
    }
    return spec;
  }
  P.error("basis.kind '" + *kind + "' is not one of polynomial, gaussian-rbf");
  return spec;
}

void parse_energies(Parser& P, const json& top, RunConfig& cfg) {
  if (!top.contains("energies")) return;
  const json* ej = P.object(top, "config", "energies");
  if (!ej) return;
  P.check_keys(*ej, "energies",
               {"potential", "interaction", "pairing", "flip_sign"});
  if (const json* vj = P.object(*ej, "energies", "potential")) {
    P.check_keys(*vj, "energies.potential",
                 {"kind", "center", "weight", "coeffs"});
    const auto kind = P.string(*vj, "energies.potential", "kind");
    if (!kind || *kind == "none") {
      cfg.potential = PointwisePotential::none_potential();
    } else if (*kind == "quadratic") {
      const auto center = P.vector(*vj, "energies.potential", "center");
      if (!center) {
        P.error("quadratic potential needs a center");
      } else {
        cfg.potential = PointwisePotential::quadratic(
            *center, P.number_or(*vj, "energies.potential", "weight", 1.0));
      }
    } else if (*kind == "polynomial-1d") {
      const auto coeffs = P.vector(*vj, "energies.potential", "coeffs");
      if (!coeffs)
        P.error("polynomial-1d potential needs coeffs");
      else
        cfg.potential = PointwisePotential::polynomial_1d(*coeffs);
    } else {
      P.error("energies.potential.kind '" + *kind +
              "' is not one of none, quadratic, polynomial-1d");
    }
  }
  if (const json* wj = P.object(*ej, "energies", "interaction")) {
    P.check_keys(*wj, "energies.interaction", {"kind", "weight", "bandwidth"});
    const auto kind = P.string(*wj, "energies.interaction", "kind");
    if (!kind || *kind == "none") {
      cfg.interaction = InteractionPotential::none_potential();
    } else if (*kind == "constant") {
      cfg.interaction = InteractionPotential::constant(
          P.number_or(*wj, "energies.interaction", "weight", 1.0));
    } else if (*kind == "squared-distance") {
      cfg.interaction = InteractionPotential::squared_distance(
          P.number_or(*wj, "energies.interaction", "weight", 1.0));
    } else if (*kind == "gaussian-kernel") {
      const double bw = P.number_or(*wj, "energies.interaction", "bandwidth", 1.0);
      if (bw <= 0.0)
        P.error("energies.interaction.bandwidth must be positive");
      else
        cfg.interaction = InteractionPotential::gaussian_kernel(
            bw, P.number_or(*wj, "energies.interaction", "weight", 1.0));
    } else {
      P.error("energies.interaction.kind '" + *kind +
              "' is not one of none, constant, squared-distance, "
              "gaussian-kernel");
    }
  }
  if (const auto pairing = P.string(*ej, "energies", "pairing")) {
    if (*pairing == "auto")
      cfg.pairing = PairingMode::automatic;
    else if (*pairing == "all-pairs")
      cfg.pairing = PairingMode::all_pairs;
    else if (*pairing == "split-batch")
      cfg.pairing = PairingMode::split_batch;
    else
      P.error("energies.pairing '" + *pairing +
              "' is not one of auto, all-pairs, split-batch");
  }
  cfg.flip_energy_sign =
      P.boolean(*ej, "energies", "flip_sign").value_or(false);
}

}  // namespace

RunConfig parse_config(const std::string& text,
                       std::optional<Subcommand> subcommand) {
  json top;
  try {
    top = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  if (!top.is_object()) throw ConfigError({"config must be a JSON object"});

  Parser P;
  P.check_keys(top, "config",
               {"subcommand", "family", "base", "theta", "theta0", "theta1",
                "seed", "samples", "knots", "basis", "metric", "energies",
                "optimizer", "oracle"});

  RunConfig cfg;

  if (const auto sub = P.string(top, "config", "subcommand")) {
    const auto parsed = subcommand_from_name(*sub);
    if (!parsed) {
      P.error("subcommand '" + *sub + "' is not one of metric, geodesic, "
              "distance, extended, oracle-compare");
    } else if (subcommand && *subcommand != *parsed) {
      P.error("config subcommand '" + *sub +
              "' conflicts with the CLI subcommand '" +
              subcommand_name(*subcommand) + "'");
    } else {
      cfg.subcommand = *parsed;
    }
  } else if (subcommand) {
    cfg.subcommand = *subcommand;
  } else {
    P.error("subcommand is required (in the config or on the command line)");
  }

  cfg.family = parse_family(P, top);
  cfg.base = parse_base(P, top, cfg.family);

  cfg.theta = P.vector(top, "config", "theta");
  cfg.theta0 = P.vector(top, "config", "theta0");
  cfg.theta1 = P.vector(top, "config", "theta1");

  if (const auto seed = P.integer(top, "config", "seed"))
    cfg.seed = static_cast<std::uint64_t>(*seed);
  else
    P.error("seed is required (runs never draw entropy)");

  cfg.samples = P.integer(top, "config", "samples").value_or(100000);
  if (cfg.samples < 1) P.error("samples must be >= 1");
  cfg.knots = static_cast<int>(P.integer(top, "config", "knots").value_or(16));

  cfg.basis = parse_basis(P, top, cfg.family);

  if (const json* mj = P.object(top, "config", "metric")) {
    P.check_keys(*mj, "metric", {"kind", "tikhonov", "jackknife_blocks"});
    if (const auto kind = P.string(*mj, "metric", "kind")) {
      if (*kind == "map")
        cfg.metric_kind = MetricTensor::Kind::map;
      else if (*kind == "wasserstein")
        cfg.metric_kind = MetricTensor::Kind::wasserstein;
      else
        P.error("metric.kind '" + *kind + "' is not one of map, wasserstein");
    }
    cfg.metric_opts.tikhonov_rel = P.number_or(*mj, "metric", "tikhonov", 1e-10);
    if (cfg.metric_opts.tikhonov_rel < 0.0)
      P.error("metric.tikhonov must be >= 0");
    cfg.metric_opts.jackknife_blocks = static_cast<int>(
        P.integer(*mj, "metric", "jackknife_blocks").value_or(10));
  }

  parse_energies(P, top, cfg);

  if (const json* oj = P.object(top, "config", "optimizer")) {
    P.check_keys(*oj, "optimizer",
                 {"tol", "max_iters", "fd_step", "divergence_floor"});
    cfg.solver.tol = P.number_or(*oj, "optimizer", "tol", 1e-6);
    if (cfg.solver.tol <= 0.0) P.error("optimizer.tol must be positive");
    cfg.solver.max_iters = static_cast<int>(
        P.integer(*oj, "optimizer", "max_iters").value_or(500));
    if (cfg.solver.max_iters < 1) P.error("optimizer.max_iters must be >= 1");
    cfg.solver.fd_step = P.number_or(*oj, "optimizer", "fd_step", 1e-5);
    if (cfg.solver.fd_step <= 0.0) P.error("optimizer.fd_step must be positive");
    cfg.solver.divergence_floor =
        P.number_or(*oj, "optimizer", "divergence_floor", -1e9);
  }

  if (const json* oj = P.object(top, "config", "oracle")) {
    P.check_keys(*oj, "oracle", {"p", "quad_points"});
    cfg.oracle_p = P.number_or(*oj, "oracle", "p", 2.0);
    if (cfg.oracle_p < 1.0) P.error("oracle.p must be >= 1");
    cfg.oracle_quad_points =
        P.integer(*oj, "oracle", "quad_points").value_or(4096);
    if (cfg.oracle_quad_points < 64) P.error("oracle.quad_points must be >= 64");
  }

  // cross-field consistency
  const int d = cfg.family.param_dim();
  auto check_theta = [&](const char* name, const std::optional<VectorXd>& t) {
    if (!t) return;
    if (t->size() != d) {
      P.error(std::string(name) + " has length " + std::to_string(t->size()) +
              " but the family has d = " + std::to_string(d));
      return;
    }
    try {
      cfg.family.require_admissible(*t);
    } catch (const Error& e) {
      P.error(std::string(name) + ": " + e.what());
    }
  };
  check_theta("theta", cfg.theta);
  check_theta("theta0", cfg.theta0);
  check_theta("theta1", cfg.theta1);

  if (cfg.base.dim != cfg.family.input_dim())
    P.error("base dimension " + std::to_string(cfg.base.dim) +
            " does not match the family input dimension " +
            std::to_string(cfg.family.input_dim()));

  if (cfg.subcommand == Subcommand::metric) {
    if (!cfg.theta) P.error("metric runs need theta");
  } else {
    if (!cfg.theta0 || !cfg.theta1)
      P.error(subcommand_name(cfg.subcommand) + " runs need theta0 and theta1");
    if (cfg.knots < 2)
      P.error("path subcommands need knots >= 2");
  }
  if (cfg.knots < 1) P.error("knots must be >= 1");

  try {
    cfg.potential.validate(cfg.family.ambient_dim());
  } catch (const Error& e) {
    P.error(std::string("energies.potential: ") + e.what());
  }

  if (!P.errors.empty()) throw ConfigError(std::move(P.errors));
  return cfg;
}

namespace {

json vector_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

json family_json(const MapFamily& fam) {
  json f;
  f["kind"] = fam.kind_name();
  switch (fam.kind()) {
    case MapFamily::Kind::translation:
    case MapFamily::Kind::affine_nd:
      f["dim"] = fam.ambient_dim();
      break;
    case MapFamily::Kind::feature_expansion: {
      f["dim"] = fam.ambient_dim();
      json feats = json::array();
      for (const auto& feat : fam.features()) {
        json fe;
        if (feat.kind == Feature::Kind::polynomial) {
          fe["kind"] = "polynomial";
          json terms = json::array();
          for (const auto& t : feat.terms) {
            json te;
            te["component"] = t.component;
            json ex = json::array();
            for (int e : t.exponents) ex.push_back(e);
            te["exponents"] = ex;
            te["coeff"] = t.coeff;
            terms.push_back(te);
          }
          fe["terms"] = terms;
        } else {
          fe["kind"] = "gaussian-bump";
          fe["direction"] = vector_json(feat.direction);
          fe["center"] = vector_json(feat.center);
          fe["bandwidth"] = feat.bandwidth;
        }
        feats.push_back(fe);
      }
      f["features"] = feats;
      break;
    }
    default:
      break;
  }
  return f;
}

}  // namespace

std::string render_config(const RunConfig& cfg) {
  json j;
  j["subcommand"] = subcommand_name(cfg.subcommand);
  j["family"] = family_json(cfg.family);

  json base;
  base["kind"] = cfg.base.kind_name();
  switch (cfg.base.kind) {
    case BaseMeasure::Kind::standard_normal:
      base["dim"] = cfg.base.dim;
      break;
    case BaseMeasure::Kind::uniform_box:
      base["lo"] = vector_json(cfg.base.lo);
      base["hi"] = vector_json(cfg.base.hi);
      break;
    case BaseMeasure::Kind::tabulated_quantile:
      base["u"] = vector_json(cfg.base.table_u);
      base["q"] = vector_json(cfg.base.table_q);
      break;
  }
  j["base"] = base;

  if (cfg.theta) j["theta"] = vector_json(*cfg.theta);
  if (cfg.theta0) j["theta0"] = vector_json(*cfg.theta0);
  if (cfg.theta1) j["theta1"] = vector_json(*cfg.theta1);

  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  j["knots"] = cfg.knots;

  json basis;
  if (cfg.basis.kind == PotentialBasis::Kind::polynomial) {
    basis["kind"] = "polynomial";
    basis["degree"] = cfg.basis.degree;
  } else {
    basis["kind"] = "gaussian-rbf";
    if (cfg.basis.centers.size() > 0)
      basis["centers"] = matrix_json(cfg.basis.centers);
    if (!cfg.basis.lattice.empty()) {
      json lat = json::array();
      for (int c : cfg.basis.lattice) lat.push_back(c);
      basis["lattice"] = lat;
    }
    basis["bandwidth"] = cfg.basis.bandwidth;
  }
  j["basis"] = basis;

  json metric;
  metric["kind"] =
      cfg.metric_kind == MetricTensor::Kind::map ? "map" : "wasserstein";
  metric["tikhonov"] = cfg.metric_opts.tikhonov_rel;
  metric["jackknife_blocks"] = cfg.metric_opts.jackknife_blocks;
  j["metric"] = metric;

  json energies;
  json pot;
  switch (cfg.potential.kind) {
    case PointwisePotential::Kind::none:
      pot["kind"] = "none";
      break;
    case PointwisePotential::Kind::quadratic:
      pot["kind"] = "quadratic";
      pot["center"] = vector_json(cfg.potential.center);
      pot["weight"] = cfg.potential.weight;
      break;
    case PointwisePotential::Kind::polynomial_1d:
      pot["kind"] = "polynomial-1d";
      pot["coeffs"] = vector_json(cfg.potential.coeffs);
      break;
  }
  energies["potential"] = pot;
  json inter;
  switch (cfg.interaction.kind) {
    case InteractionPotential::Kind::none:
      inter["kind"] = "none";
      break;
    case InteractionPotential::Kind::constant:
      inter["kind"] = "constant";
      inter["weight"] = cfg.interaction.weight;
      break;
    case InteractionPotential::Kind::squared_distance:
      inter["kind"] = "squared-distance";
      inter["weight"] = cfg.interaction.weight;
      break;
    case InteractionPotential::Kind::gaussian_kernel:
      inter["kind"] = "gaussian-kernel";
      inter["weight"] = cfg.interaction.weight;
      inter["bandwidth"] = cfg.interaction.bandwidth;
      break;
  }
  energies["interaction"] = inter;
  energies["pairing"] = cfg.pairing == PairingMode::automatic ? "auto"
                        : cfg.pairing == PairingMode::all_pairs
                            ? "all-pairs"
                            : "split-batch";
  energies["flip_sign"] = cfg.flip_energy_sign;
  j["energies"] = energies;

  json optimizer;
  optimizer["tol"] = cfg.solver.tol;
  optimizer["max_iters"] = cfg.solver.max_iters;
  optimizer["fd_step"] = cfg.solver.fd_step;
  optimizer["divergence_floor"] = cfg.solver.divergence_floor;
  j["optimizer"] = optimizer;

  json oracle;
  oracle["p"] = cfg.oracle_p;
  oracle["quad_points"] = cfg.oracle_quad_points;
  j["oracle"] = oracle;

  return j.dump(2);
}

}  // namespace paramot
