#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lrp/cli.hpp"
#include "lrp/exploration.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Long-range percolation exploration, coupling and estimation"};
  std::string config_path, seed, assert_level, out_path, csv_path;
  unsigned workers = 1;
  bool timing = false;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--seed", seed, "seed override, decimal or 0x-prefixed hex");
  app.add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--assert", assert_level, "assertion level: off, lemma-checks, full-trace");
  app.add_option("--out", out_path, "output document path (default: stdout)");
  app.add_option("--csv", csv_path, "CSV side file for tabular series");
  app.add_flag("--timing", timing, "record wall time in the output document");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lrp::kExitValidation;
  }

  nlohmann::json config;
  {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read " << config_path << "\n";
      return lrp::kExitValidation;
    }
    try {
      in >> config;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: " << config_path << ": " << e.what() << "\n";
      return lrp::kExitValidation;
    }
  }
  if (!seed.empty() && config.is_object()) config["seed"] = seed;
  if (!assert_level.empty() && config.is_object()) config["assert"] = assert_level;

  const auto res = lrp::run_command(config, {workers, timing});
  const std::string text = res.document.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream(out_path) << text;
  }
  if (!csv_path.empty() && res.csv) std::ofstream(csv_path) << *res.csv;
  if (res.document.contains("error")) {
    std::cerr << "error [" << res.document["error"]["kind"].get<std::string>() << "] "
              << res.document["error"]["message"].get<std::string>() << "\n";
  }
  return res.exit_code;
}
