// paramot: constrained dynamical optimal transport over parameterized
// pushforward families. Subcommands dispatch one batch run described by a
// JSON config; results land in summary.json (and path.csv for path runs).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "paramot/config.hpp"
#include "paramot/parallel.hpp"
#include "paramot/run.hpp"
#include "paramot/version.hpp"

namespace {

struct CommonArgs {
  std::string config_file;
  std::string out_dir = ".";
  int threads = 0;
  std::int64_t seed_override = -1;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_file, "run configuration (JSON)")
      ->required();
  sub->add_option("--out", args.out_dir, "output directory (default: .)");
  sub->add_option("--threads", args.threads,
                  "cap worker threads; results do not depend on it");
  sub->add_option("--seed", args.seed_override,
                  "override the config seed");
}

int execute(paramot::Subcommand subcommand, const CommonArgs& args) {
  if (args.threads > 0) paramot::set_max_threads(args.threads);

  std::ifstream in(args.config_file);
  if (!in) {
    std::cerr << "error: cannot read config file '" << args.config_file
              << "'\n";
    return static_cast<int>(paramot::ExitCode::validation_failure);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  paramot::RunConfig config;
  try {
    config = paramot::parse_config(buffer.str(), subcommand);
  } catch (const paramot::ConfigError& e) {
    std::cerr << "configuration is invalid:\n";
    for (const auto& issue : e.issues()) std::cerr << "  - " << issue << "\n";
    return static_cast<int>(paramot::ExitCode::validation_failure);
  }
  if (args.seed_override >= 0)
    config.seed = static_cast<std::uint64_t>(args.seed_override);

  paramot::RunOutput out;
  out.directory = args.out_dir;
  const paramot::RunResult result = paramot::run(config, out);

  if (result.exit_code == paramot::ExitCode::ok ||
      result.exit_code == paramot::ExitCode::unconverged) {
    std::cout << result.summary_json;
    if (result.exit_code == paramot::ExitCode::unconverged)
      std::cerr << "warning: solver did not converge (" << result.status
                << "); best path written\n";
  } else {
    std::cerr << "error: " << result.status << "\n";
  }
  return static_cast<int>(result.exit_code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained dynamical optimal transport on parameterized "
               "pushforward families"};
  app.set_version_flag("--version", std::string(paramot::version()));
  app.require_subcommand(1);

  struct SubEntry {
    paramot::Subcommand subcommand;
    CommonArgs args;
  };
  std::vector<std::pair<CLI::App*, SubEntry>> entries;
  entries.reserve(8);  // CLI11 keeps references into the stored args

  auto add = [&](paramot::Subcommand s, const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    entries.push_back({sub, {s, {}}});
    add_common(sub, entries.back().second.args);
  };
  add(paramot::Subcommand::metric, "metric",
      "map and Wasserstein metric tensors at theta");
  add(paramot::Subcommand::geodesic, "geodesic",
      "minimize the discrete action between theta0 and theta1");
  add(paramot::Subcommand::distance, "distance",
      "constrained distance between theta0 and theta1");
  add(paramot::Subcommand::extended, "extended",
      "action minimization with potential/interaction energies");
  add(paramot::Subcommand::oracle_compare, "oracle-compare",
      "constrained distance against the exact 1D/closed-form oracle");

  CLI11_PARSE(app, argc, argv);

  for (auto& [sub, entry] : entries)
    if (sub->parsed()) return execute(entry.subcommand, entry.args);
  return static_cast<int>(paramot::ExitCode::internal_error);
}
