#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "pensiongame/cli.hpp"
#include "pensiongame/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Robust Nash equilibria of a DB pension surplus game"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = pensiongame::default_threads();

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "closed-form equilibrium, written to solution.json"},
      {"sweep", "ratio tables over preference grids, one CSV per game and market"},
      {"verify", "moment, payoff, HJBI and sensitivity checks, written to verify.json"},
      {"simulate", "surplus paths and Monte-Carlo payoff estimates"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "scenario file (.toml or .json)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "overrides the configured seed");
    sub->add_option("--threads", threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pensiongame::cli::kParse;
  }

  const CLI::App* sub = app.get_subcommands().front();
  pensiongame::cli::RunOptions opt;
  opt.out_dir = out_dir;
  opt.threads = threads;
  if (sub->count("--seed") > 0) opt.seed = seed;
  return pensiongame::cli::run_command(sub->get_name(), config, opt, std::cout, std::cerr);
}
