#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bhq/io/config.hpp"
#include "bhq/io/run.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bhq::io::ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bhquench: truncated-correlation dynamics of the Bose-Hubbard model after a "
      "hopping quench, with first-order and exact-diagonalization cross-checks"};
  app.set_version_flag("--version", bhq::io::kCodeVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::vector<std::string> overrides;

  const std::pair<const char*, const char*> modes[] = {
      {"simulate", "integrate the truncated equations and dump trajectories"},
      {"analytic", "evaluate the first-order solution on the same grid"},
      {"ed", "exact propagation (dense or Krylov) with the standard probes"},
      {"compare", "truncated run against an ed or analytic reference"},
      {"front", "correlation-front arrival times and velocity fits"},
  };
  for (const auto& [name, description] : modes) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output-dir", output_dir,
                    "artifact directory (beats BHQUENCH_OUTPUT_DIR and the config)");
    sub->add_option("--override", overrides,
                    "config override as key.path=value; repeatable");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    std::string text = read_file(config_path);
    text = bhq::io::apply_override(text, std::string("mode=") +
                                             app.get_subcommands().front()->get_name());
    for (const std::string& assignment : overrides)
      text = bhq::io::apply_override(text, assignment);

    // Precedence for the artifact directory: --output-dir, then the
    // environment, then the config file.
    std::string dir = output_dir;
    if (dir.empty())
      if (const char* env = std::getenv("BHQUENCH_OUTPUT_DIR"); env != nullptr && *env != '\0')
        dir = env;
    if (!dir.empty()) text = bhq::io::apply_override(text, "output_dir=" + dir);

    bhq::io::RunConfig config = bhq::io::parse_config(text);
    for (const std::string& warning : config.warnings)
      std::cerr << "warning: " << warning << "\n";
    bhq::io::run(config);
  } catch (const bhq::io::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
