#include "fracinv/config.hpp"
#include "fracinv/parallel.hpp"
#include "fracinv/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Forward and inverse solvers for the fractional heat equation"};
  std::string config_path;
  std::string out_dir;
  std::size_t threads = 1;
  bool selftest = false;
  std::string fault;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: the config's \"output\" field, else ./out)");
  app.add_option("--threads", threads, "worker threads for mode-parallel loops")->check(CLI::Range(1, 256));
  app.add_flag("--selftest", selftest, "run the acceptance suite and report per-criterion results");
  app.add_option("--inject-fault", fault)->check(CLI::IsMember({"weights"}))->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? fracinv::exit_ok : fracinv::exit_usage;
  }
  if (selftest == !config_path.empty()) {
    std::cerr << "error: give exactly one of --config or --selftest\n";
    return fracinv::exit_usage;
  }
  fracinv::parallel::set_threads(threads);

  fracinv::RunConfig config;
  try {
    if (selftest) {
      config.problem = fracinv::ProblemKind::selftest;
    } else {
      config = fracinv::load_config(config_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fracinv::exit_code_for(e);
  }
  if (out_dir.empty()) out_dir = config.output ? config.output->string() : "out";

  fracinv::RunOptions options;
  options.corrupt_weights = fault == "weights";
  options.log = &std::cerr;
  if (selftest) options.log = &std::cout;
  const int code = fracinv::run(config, out_dir, options);
  if (code == fracinv::exit_ok) std::cerr << "wrote " << out_dir << "/report.json\n";
  return code;
}
