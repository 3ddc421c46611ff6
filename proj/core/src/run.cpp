#include "paramot/run.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "paramot/energies.hpp"
#include "paramot/oracle.hpp"
#include "paramot/version.hpp"

namespace paramot {

using json = nlohmann::ordered_json;

PotentialBasis resolve_basis(const BasisSpec& spec, const MapFamily& fam,
                             const MatrixXd& probe_images) {
  if (spec.kind == PotentialBasis::Kind::polynomial)
    return PotentialBasis::polynomial(fam.ambient_dim(), spec.degree);
  if (spec.centers.size() > 0)
    return PotentialBasis::gaussian_rbf(spec.centers, spec.bandwidth);
  PotentialBasis basis =
      PotentialBasis::gaussian_rbf_lattice(probe_images, spec.lattice);
  if (spec.bandwidth > 0.0)
    basis = PotentialBasis::gaussian_rbf(basis.centers(), spec.bandwidth);
  return basis;
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

json values_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_path_csv(const std::string& file, const ParamPath& path,
                    const ActionReport& report) {
  std::ofstream out(file);
  if (!out) throw Error("cannot open " + file + " for writing");
  const Eigen::Index d = path.param_dim();
  out << "t";
  for (Eigen::Index j = 0; j < d; ++j) out << ",theta_" << (j + 1);
  out << ",segment_energy,projection_residual\n";
  const Eigen::Index K = path.segments();
  for (Eigen::Index k = 0; k <= K; ++k) {
    out << csv_number(path.time(k));
    for (Eigen::Index j = 0; j < d; ++j)
      out << "," << csv_number(path.knots(k, j));
    // row k describes segment [t_k, t_{k+1}]; the final row has no segment
    const double e =
        k < K ? report.segment_energies[static_cast<std::size_t>(k)] : 0.0;
    const double r =
        k < K ? report.projection_residuals[static_cast<std::size_t>(k)] : 0.0;
    out << "," << csv_number(e) << "," << csv_number(r) << "\n";
  }
}

PotentialBasis basis_for_run(const RunConfig& cfg, const SampleBatch& batch) {
  std::vector<MatrixXd> image_sets;
  if (cfg.theta)
    image_sets.push_back(cfg.family.forward_all(*cfg.theta, batch.points));
  if (cfg.theta0)
    image_sets.push_back(cfg.family.forward_all(*cfg.theta0, batch.points));
  if (cfg.theta1)
    image_sets.push_back(cfg.family.forward_all(*cfg.theta1, batch.points));
  MatrixXd probe;
  for (const auto& m : image_sets) {
    const Eigen::Index off = probe.rows();
    probe.conservativeResize(off + m.rows(), m.cols());
    probe.bottomRows(m.rows()) = m;
  }
  return resolve_basis(cfg.basis, cfg.family, probe);
}

void run_metric(const RunConfig& cfg, const SampleBatch& batch,
                RunResult& result) {
  const MetricTensor gmap =
      metric_map(cfg.family, *cfg.theta, batch, cfg.metric_opts);
  result.matrices["metric_map"] = gmap.M;
  if (gmap.std_err.size() > 0)
    result.matrices["metric_map_std_err"] = gmap.std_err;

  if (cfg.metric_kind == MetricTensor::Kind::wasserstein) {
    const PotentialBasis basis = basis_for_run(cfg, batch);
    PotentialProjection proj(cfg.family, *cfg.theta, batch, basis,
                             cfg.metric_opts);
    const MetricTensor gw = proj.wasserstein_metric();
    result.matrices["metric_wasserstein"] = gw.M;
    if (gw.std_err.size() > 0)
      result.matrices["metric_wasserstein_std_err"] = gw.std_err;
    const int d = cfg.family.param_dim();
    MatrixXd resid(1, d);
    for (int k = 0; k < d; ++k)
      resid(0, k) = proj.residual(VectorXd::Unit(d, k));
    result.matrices["projection_residuals"] = resid;
  }
}

void run_path_subcommand(const RunConfig& cfg, const SampleBatch& batch,
                         RunResult& result) {
  const PotentialBasis basis = basis_for_run(cfg, batch);

  ParamPath path{MatrixXd()};
  ActionReport report;
  if (cfg.subcommand == Subcommand::extended) {
    ExtendedOptions opts;
    opts.metric = cfg.metric_kind;
    opts.metric_opts = cfg.metric_opts;
    opts.pairing = cfg.pairing;
    opts.flip_energy_sign = cfg.flip_energy_sign;
    opts.solver = cfg.solver;
    std::tie(path, report) = extended_geodesic_solve(
        cfg.family, *cfg.theta0, *cfg.theta1, cfg.knots, batch, basis,
        cfg.potential, cfg.interaction, opts);
    result.scalars["action"] = report.action;
  } else {
    GeodesicOptions opts;
    opts.solver = cfg.solver;
    opts.metric = cfg.metric_kind;
    opts.metric_opts = cfg.metric_opts;
    opts.compute_action_std_err = true;
    std::tie(path, report) = geodesic_solve(cfg.family, *cfg.theta0,
                                            *cfg.theta1, cfg.knots, batch,
                                            basis, opts);
    result.scalars["action"] = report.action;
    result.scalars["distance"] = report.distance.value();
    result.scalars["action_std_err"] = report.action_std_err;
    result.scalars["distance_std_err"] =
        report.action > 0.0
            ? report.action_std_err / (2.0 * std::sqrt(report.action))
            : 0.0;
  }

  if (cfg.subcommand == Subcommand::oracle_compare) {
    std::optional<double> oracle_value =
        closed_form_distance(cfg.family, cfg.base, *cfg.theta0, *cfg.theta1);
    if (!oracle_value) {
      if (cfg.family.ambient_dim() != 1)
        throw ValidationError(
            "no oracle available: closed forms cover translation, "
            "location-scale-1d and isotropic rotation-2d; the quantile oracle "
            "needs a 1D family");
      MatrixXd im0 = cfg.family.forward_all(*cfg.theta0, batch.points);
      MatrixXd im1 = cfg.family.forward_all(*cfg.theta1, batch.points);
      VectorXd s0 = im0.col(0), s1 = im1.col(0);
      std::sort(s0.data(), s0.data() + s0.size());
      std::sort(s1.data(), s1.data() + s1.size());
      oracle_value =
          wp_quantile(empirical_quantile(s0), empirical_quantile(s1),
                      cfg.oracle_p, cfg.oracle_quad_points);
    }
    result.scalars["oracle_distance"] = *oracle_value;
    result.scalars["constrained_distance"] = result.scalars["distance"];
    result.scalars["gap"] = result.scalars["distance"] - *oracle_value;
  }

  result.scalars["converged"] = report.converged ? 1.0 : 0.0;
  result.path = path;
  result.report = report;
  if (!report.converged) {
    result.exit_code = ExitCode::unconverged;
    result.status = report.status;
  }
}

json build_summary(const RunResult& result) {
  json j;
  j["config"] = json::parse(render_config(result.config));
  j["status"] = result.status;
  j["exit_code"] = static_cast<int>(result.exit_code);
  json res;
  for (const auto& [key, value] : result.scalars) res[key] = value;
  if (!result.matrices.empty()) {
    json mats;
    for (const auto& [key, value] : result.matrices)
      mats[key] = matrix_json(value);
    res["matrices"] = mats;
  }
  if (result.report) {
    const ActionReport& r = *result.report;
    res["converged"] = r.converged;
    res["iterations"] = r.iterations;
    res["solver_status"] = r.status;
    res["segment_energies"] = values_json(r.segment_energies);
    res["projection_residuals"] = values_json(r.projection_residuals);
    json trace = json::array();
    for (const auto& t : r.trace) {
      json row = json::array();
      row.push_back(t.iteration);
      row.push_back(t.action);
      row.push_back(t.grad_norm);
      trace.push_back(row);
    }
    res["trace"] = trace;
  }
  j["results"] = res;
  if (!result.csv_file.empty()) j["csv_file"] = result.csv_file;
  j["library_version"] = version();
  j["rng_algorithm"] = rng_algorithm();
  // wall clock is the one nondeterministic field; kept last so tooling can
  // strip it when comparing runs
  j["wall_clock_ms"] = result.wall_clock_ms;
  return j;
}

}  // namespace

RunResult run(const RunConfig& cfg, const RunOutput& out) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  result.config = cfg;

  try {
    const SampleBatch batch = draw(cfg.base, cfg.seed, cfg.samples);
    if (cfg.subcommand == Subcommand::metric)
      run_metric(cfg, batch, result);
    else
      run_path_subcommand(cfg, batch, result);
  } catch (const ConfigError& e) {
    result.exit_code = ExitCode::validation_failure;
    result.status = e.what();
  } catch (const ValidationError& e) {
    result.exit_code = ExitCode::validation_failure;
    result.status = e.what();
  } catch (const EvaluationError& e) {
    result.exit_code = ExitCode::numeric_failure;
    result.status = e.what();
  } catch (const SolveError& e) {
    result.exit_code = ExitCode::numeric_failure;
    result.status = e.what();
  } catch (const std::exception& e) {
    result.exit_code = ExitCode::internal_error;
    result.status = e.what();
  }

  const bool failed = result.exit_code == ExitCode::validation_failure ||
                      result.exit_code == ExitCode::numeric_failure ||
                      result.exit_code == ExitCode::internal_error;

  if (out.write_files && !failed) {
    std::filesystem::create_directories(out.directory);
    if (result.path) {
      result.csv_file = "path.csv";
      write_path_csv(out.directory + "/" + result.csv_file, *result.path,
                     *result.report);
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  result.wall_clock_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  result.summary_json = build_summary(result).dump(2) + "\n";

  if (out.write_files && !failed) {
    std::ofstream summary(out.directory + "/summary.json");
    if (!summary) throw Error("cannot write summary.json");
    summary << result.summary_json;
  }
  return result;
}

}  // namespace paramot
