#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "riddled/parallel.hpp"

namespace {

unsigned env_threads() {
  const char* v = std::getenv("RIDDLED_SPIN_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0') throw riddled::cli::ConfigError("RIDDLED_SPIN_THREADS must be a non-negative integer");
  return static_cast<unsigned>(n);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace riddled::cli;

  CLI::App app{"Riddled-basin spin measurement experiments"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  int threads_opt = -1;
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "JSON run config")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--threads", threads_opt, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig cfg = load_config(config_path);
    unsigned threads = threads_opt >= 0 ? static_cast<unsigned>(threads_opt) : cfg.threads ? *cfg.threads : env_threads();
    threads = riddled::resolve_threads(threads);
    const std::string dir = !out_dir.empty() ? out_dir : cfg.output_dir.value_or("riddled-out");

    run_subcommand(name, cfg, threads, dir);

    // Timing lives outside the hashed outputs so reruns stay byte-identical.
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream(std::filesystem::path(dir) / "run_info.txt")
        << "subcommand " << name << "\nthreads " << threads << "\nwall_seconds " << secs << "\n";
    std::cerr << name << ": wrote " << dir << " in " << secs << " s with " << threads << " thread(s)\n";
    return 0;
  } catch (const std::exception& e) {
    const int rc = exit_code_for(e);
    std::cerr << "riddled-spin " << name << ": " << e.what() << "\n";
    return rc;
  }
}
