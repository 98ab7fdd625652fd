#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "imprand/cli.hpp"

int main(int argc, char** argv) {
  using namespace imprand;
  CLI::App app{"Interval-forecast randomness audits"};
  app.require_subcommand(1);

  std::string manifest_file;
  std::uint64_t seed = 0;
  std::string out_dir, mode;
  int grid = 0;
  bool fail_on_refute = false;

  for (const char* name : {"simulate", "audit", "scan", "expect", "lawful"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--manifest", manifest_file, "experiment manifest")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the path seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--fail-on-refute", fail_on_refute, "exit with status 2 on a REFUTED verdict");
    sub->add_option("--mode", mode, "audit mode")->check(CLI::IsMember({"bounded", "schnorr"}));
    sub->add_option("--grid", grid, "scan grid denominator")->check(CLI::IsMember({10, 20, 40, 100}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? cli::exit_ok : cli::exit_error;
  }

  auto* sub = app.get_subcommands().front();
  try {
    cli::Context ctx;
    ctx.manifest = manifest::parse_manifest(read_file(manifest_file));
    ctx.base_dir = std::filesystem::path(manifest_file).parent_path();
    if (ctx.base_dir.empty()) ctx.base_dir = ".";
    if (sub->count("--seed")) ctx.overrides.seed = seed;
    if (sub->count("--out")) ctx.overrides.out = out_dir;
    if (sub->count("--mode")) ctx.overrides.mode = audit_mode_from(mode);
    if (sub->count("--grid")) ctx.overrides.grid = grid;
    ctx.overrides.fail_on_refute = fail_on_refute;
    ctx.out = &std::cout;
    return cli::run(sub->get_name(), ctx);
  } catch (const parse_error& e) {
    std::cerr << manifest_file << ": error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return cli::exit_error;
}
