// Command-line entry point: runs one experiment from a config file, or
// consolidates manifests into a summary table.
//
//   fbmlab --config lambda.cfg --out runs/l1 --workers 4 --seed-list 1,2,3
//   fbmlab report runs/l1/manifest.json runs/l2/manifest.json --out runs
//
// FBMLAB_CONFIG, FBMLAB_OUT, FBMLAB_WORKERS, FBMLAB_SEED_LIST and FBMLAB_PLOTS
// mirror the flags. Flags win over the environment, which wins over the file.
//
// Exit status: 0 success, 1 compute failure, 2 invalid configuration.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "fbmlab/core.hpp"
#include "fbmlab/harness/config.hpp"
#include "fbmlab/harness/runner.hpp"

namespace {

std::string env_or_empty(const char *name) {
  const char *v = std::getenv(name);
  return v ? v : "";
}

} // namespace

int main(int argc, char **argv) {
  using namespace fbmlab::harness;

  CLI::App app{"fbmlab: fractional Brownian motion experiments"};
  std::string config_path, out, workers, seed_list, plots;
  app.add_option("--config", config_path, "experiment config file")
      ->envname("FBMLAB_CONFIG");
  app.add_option("--out", out, "output directory")->envname("FBMLAB_OUT");
  app.add_option("--workers", workers, "worker threads")->envname("FBMLAB_WORKERS");
  app.add_option("--seed-list", seed_list, "comma-separated seeds")
      ->envname("FBMLAB_SEED_LIST");
  app.add_option("--plots", plots, "on|off")->envname("FBMLAB_PLOTS");
  bool show_schema = false;
  app.add_flag("--schema", show_schema, "print the config schema and exit");

  auto *rep = app.add_subcommand("report", "summarize run manifests");
  std::vector<std::string> manifests;
  std::string report_out;
  rep->add_option("manifests", manifests, "manifest.json files");
  rep->add_option("--out", report_out, "directory for report.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (show_schema) {
    std::cout << schema_help();
    return 0;
  }

  try {
    if (rep->parsed()) {
      report(manifests, report_out.empty() ? env_or_empty("FBMLAB_OUT") : report_out,
             std::cout);
      return 0;
    }
    if (config_path.empty()) {
      std::cerr << "config: no --config given (or FBMLAB_CONFIG set)\n";
      return 2;
    }
    const RawConfig raw = read_config_file(config_path);
    const ExperimentConfig cfg = build_config(raw, {out, workers, seed_list, plots});
    const RunManifest m = run(cfg, std::cerr);
    std::cout << m.headline.label << " = " << m.headline.estimate << "  CI ["
              << m.headline.ci_lo << ", " << m.headline.ci_hi << "]  ("
              << m.headline.status << ")\n";
    return 0;
  } catch (const ConfigError &e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
