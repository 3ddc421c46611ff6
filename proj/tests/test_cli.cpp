#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "paramot/config.hpp"
#include "paramot/parallel.hpp"
#include "paramot/run.hpp"

using namespace paramot;
using json = nlohmann::ordered_json;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("paramot_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PARAMOT_CLI_PATH) + " " + args +
                          " >/dev/null 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  return WEXITSTATUS(raw);
}

const char* kDistanceConfig = R"({
  "family": {"kind": "translation", "dim": 2},
  "theta0": [0, 0],
  "theta1": [3, 4],
  "seed": 1,
  "samples": 2000,
  "knots": 4
})";

json strip_wall_clock(const std::string& summary) {
  json j = json::parse(summary);
  j.erase("wall_clock_ms");
  return j;
}

}  // namespace

TEST_CASE("run: translation distance end to end") {
  const fs::path dir = temp_dir("distance");
  RunConfig cfg = parse_config(kDistanceConfig, Subcommand::distance);
  RunOutput out;
  out.directory = dir.string();
  const RunResult result = run(cfg, out);

  CHECK(result.exit_code == ExitCode::ok);
  CHECK(std::abs(result.scalars.at("distance") - 5.0) <= 1e-6);
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "path.csv"));

  // CSV header carries the normative column order
  std::ifstream csv(dir / "path.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,theta_1,theta_2,segment_energy,projection_residual");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 5);  // K+1 knots
}

TEST_CASE("run: summaries are reproducible and thread-count independent") {
  RunConfig cfg = parse_config(kDistanceConfig, Subcommand::distance);
  RunOutput out;
  out.write_files = false;

  set_max_threads(1);
  const RunResult r1 = run(cfg, out);
  const RunResult r2 = run(cfg, out);
  set_max_threads(8);
  const RunResult r8 = run(cfg, out);
  set_max_threads(0);

  CHECK(strip_wall_clock(r1.summary_json) == strip_wall_clock(r2.summary_json));
  CHECK(strip_wall_clock(r1.summary_json) == strip_wall_clock(r8.summary_json));

  // re-running the echoed config reproduces every numeric output
  const RunConfig echoed = parse_config(render_config(cfg));
  const RunResult re = run(echoed, out);
  CHECK(strip_wall_clock(r1.summary_json) == strip_wall_clock(re.summary_json));
}

TEST_CASE("run: uniform-box base through a full distance run") {
  // translation distance is base-independent; the box base exercises the
  // non-Gaussian sampling path end to end
  const char* text = R"({
    "family": {"kind": "translation", "dim": 2},
    "base": {"kind": "uniform-box", "lo": [0, 0], "hi": [1, 1]},
    "theta0": [0, 0],
    "theta1": [3, 4],
    "seed": 8,
    "samples": 5000,
    "knots": 4
  })";
  RunConfig cfg = parse_config(text, Subcommand::distance);
  RunOutput out;
  out.write_files = false;
  const RunResult result = run(cfg, out);
  CHECK(result.exit_code == ExitCode::ok);
  CHECK(std::abs(result.scalars.at("distance") - 5.0) <= 1e-6);
}

TEST_CASE("run: rbf lattice basis resolves against the image bounding box") {
  const char* text = R"({
    "family": {"kind": "location-scale-1d"},
    "theta": [0.5, 1.5],
    "seed": 6,
    "samples": 20000,
    "basis": {"kind": "gaussian-rbf", "lattice": [7]}
  })";
  RunConfig cfg = parse_config(text, Subcommand::metric);
  RunOutput out;
  out.write_files = false;
  const RunResult result = run(cfg, out);
  CHECK(result.exit_code == ExitCode::ok);
  const MatrixXd& gm = result.matrices.at("metric_map");
  const MatrixXd& gw = result.matrices.at("metric_wasserstein");
  // the finite rbf span keeps the projected energy below the map energy
  VectorXd probe(2);
  probe << 0.3, -0.8;
  CHECK(probe.dot(gw * probe) <= probe.dot(gm * probe) + 1e-10);
  CHECK(gw.trace() > 0.0);
}

TEST_CASE("run: numeric failures map to their own exit code") {
  // degenerate base (constant quantile) + unregularized solve: rank deficient
  const char* text = R"({
    "family": {"kind": "translation", "dim": 1},
    "theta": [0],
    "seed": 1,
    "samples": 256,
    "base": {"kind": "tabulated-quantile", "u": [0.25, 0.75], "q": [2, 2]},
    "metric": {"kind": "wasserstein", "tikhonov": 0}
  })";
  RunConfig cfg = parse_config(text, Subcommand::metric);
  RunOutput out;
  out.write_files = false;
  const RunResult result = run(cfg, out);
  CHECK(result.exit_code == ExitCode::numeric_failure);
  CHECK(result.status.find("rank-deficient") != std::string::npos);
}

TEST_CASE("run: metric subcommand emits tensors and residuals") {
  const char* text = R"({
    "family": {"kind": "location-scale-1d"},
    "theta": [0, 1],
    "seed": 2,
    "samples": 20000
  })";
  RunConfig cfg = parse_config(text, Subcommand::metric);
  RunOutput out;
  out.write_files = false;
  const RunResult result = run(cfg, out);
  CHECK(result.exit_code == ExitCode::ok);
  CHECK(result.matrices.count("metric_map") == 1);
  CHECK(result.matrices.count("metric_wasserstein") == 1);
  CHECK(result.matrices.count("metric_map_std_err") == 1);
  CHECK(result.matrices.count("projection_residuals") == 1);
  CHECK((result.matrices.at("metric_map") - MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() <= 0.05);
}

TEST_CASE("run: oracle-compare reports both values and the gap") {
  const char* text = R"({
    "family": {"kind": "location-scale-1d"},
    "theta0": [0, 1],
    "theta1": [1, 2],
    "seed": 5,
    "samples": 20000,
    "knots": 8
  })";
  RunConfig cfg = parse_config(text, Subcommand::oracle_compare);
  RunOutput out;
  out.write_files = false;
  const RunResult result = run(cfg, out);
  CHECK(result.exit_code == ExitCode::ok);
  const double oracle = result.scalars.at("oracle_distance");
  const double constrained = result.scalars.at("constrained_distance");
  CHECK(oracle == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(result.scalars.at("gap") ==
        doctest::Approx(constrained - oracle).epsilon(1e-12));
  CHECK(std::abs(result.scalars.at("gap")) / oracle <= 0.02);
}

TEST_CASE("run: unconverged solves still write their best path") {
  const char* text = R"({
    "family": {"kind": "feature-expansion", "dim": 2, "features": [
      {"kind": "polynomial", "terms": [
        {"component": 0, "exponents": [0, 1], "coeff": -1.0},
        {"component": 1, "exponents": [1, 0], "coeff": 1.0}
      ]}
    ]},
    "theta0": [0],
    "theta1": [1],
    "seed": 4,
    "samples": 2000,
    "knots": 4,
    "optimizer": {"max_iters": 1}
  })";
  const fs::path dir = temp_dir("unconverged");
  RunConfig cfg = parse_config(text, Subcommand::geodesic);
  RunOutput out;
  out.directory = dir.string();
  const RunResult result = run(cfg, out);
  CHECK(result.exit_code == ExitCode::unconverged);
  CHECK(fs::exists(dir / "path.csv"));
  CHECK(fs::exists(dir / "summary.json"));
}

TEST_CASE("cli binary: exit codes and byte-identical summaries") {
  const fs::path dir = temp_dir("cli");
  write_file(dir / "good.json", kDistanceConfig);
  CHECK(run_cli("distance --config " + (dir / "good.json").string() +
                " --out " + (dir / "out1").string()) == 0);
  CHECK(run_cli("distance --config " + (dir / "good.json").string() +
                " --out " + (dir / "out2").string() + " --threads 2") == 0);

  const json s1 = strip_wall_clock(read_file(dir / "out1" / "summary.json"));
  const json s2 = strip_wall_clock(read_file(dir / "out2" / "summary.json"));
  CHECK(s1 == s2);

  // validation failure: bad scale, exit 2
  write_file(dir / "bad.json", R"({
    "family": {"kind": "location-scale-1d"},
    "theta0": [0, -1],
    "theta1": [1, 2],
    "seed": 1
  })");
  CHECK(run_cli("distance --config " + (dir / "bad.json").string()) == 2);

  // unknown key: exit 2
  write_file(dir / "unknown.json", R"({
    "family": {"kind": "translation", "dim": 1},
    "theta0": [0], "theta1": [1],
    "seed": 1,
    "typo_key": 1
  })");
  CHECK(run_cli("distance --config " + (dir / "unknown.json").string()) == 2);

  // missing file: exit 2
  CHECK(run_cli("distance --config " + (dir / "absent.json").string()) == 2);

  // seed override changes the batch, summary stays valid
  CHECK(run_cli("distance --config " + (dir / "good.json").string() +
                " --out " + (dir / "out3").string() + " --seed 99") == 0);
  const json s3 = json::parse(read_file(dir / "out3" / "summary.json"));
  CHECK(s3["config"]["seed"] == 99);
}
