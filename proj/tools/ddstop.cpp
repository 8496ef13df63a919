#include <CLI11.hpp>

#include "ddstop/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Data-driven optimal stopping laboratory"};
  app.set_version_flag("--version", std::string(ddstop::cli::kVersion));
  app.require_subcommand(1, 1);

  ddstop::cli::RunOptions opts;
  std::uint64_t seed = 0;
  int threads = 0;
  for (const auto& name : ddstop::cli::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "JSON config file")->required();
    sub->add_option("--out", opts.out_dir, "output directory (default $DDSTOP_OUT_DIR, else ./out)");
    sub->add_option("--seed", seed, "master seed, overrides the config");
    sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  const auto* chosen = app.get_subcommands().front();
  if (chosen->count("--seed")) opts.seed = seed;
  if (chosen->count("--threads")) opts.threads = threads;
  return ddstop::cli::run(chosen->get_name(), opts);
}
