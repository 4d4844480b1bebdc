#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bmms/cli.hpp"

namespace {

struct CommonFlags {
  std::string config;
  long seed = -1;
  long chains = -1;
  std::string out;
  bool no_figures = false;
  bool probit = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "key = value configuration file");
  cmd->add_option("--seed", flags.seed, "random seed (overrides config)");
  cmd->add_option("--chains", flags.chains, "number of chains");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_flag("--no-figures", flags.no_figures, "skip SVG figure output");
  cmd->add_flag("--probit", flags.probit, "binary response with probit link");
}

bmms::KeyValueConfig merge(const CommonFlags& flags) {
  bmms::KeyValueConfig cfg;
  if (!flags.config.empty()) {
    cfg = bmms::KeyValueConfig::from_file(flags.config);
  }
  if (flags.seed >= 0) cfg.set("seed", std::to_string(flags.seed));
  if (flags.chains >= 1) cfg.set("chains", std::to_string(flags.chains));
  if (!flags.out.empty()) cfg.set("out", flags.out);
  if (flags.no_figures) cfg.set("figures", "0");
  if (flags.probit) cfg.set("probit", "1");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian modular multiscale regression"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string pending;
  for (const char* name : {"simulate", "fit", "predict", "summarize"}) {
    auto* cmd = app.add_subcommand(
        name, std::string("run the ") + name + " command");
    add_common(cmd, flags);
    cmd->callback([&pending, name]() { pending = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  bmms::KeyValueConfig cfg;
  try {
    cfg = merge(flags);
  } catch (const bmms::MissingInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return bmms::cli::run_command_safely(pending, cfg);
}
