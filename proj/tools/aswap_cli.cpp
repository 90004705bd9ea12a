#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "aswap/config.hpp"
#include "aswap/verify.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

void write_manifest(const aswap::RunConfig& config, const std::string& subcommand,
                    const std::vector<std::string>& artifacts, double wall_seconds) {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["config_hash"] = aswap::config_hash(config);
  j["seed"] = config.seed;
  j["version"] = kVersion;
  j["wall_seconds"] = wall_seconds;
  j["artifacts"] = artifacts;
  j["config"] = aswap::canonical_dump(config);
  std::filesystem::create_directories(config.output_dir);
  std::ofstream out(std::filesystem::path(config.output_dir) / "run-manifest.json");
  out << j.dump(2) << "\n";
}

int run_verify_all(const aswap::RunConfig& config) {
  std::string scratch =
      (std::filesystem::path(config.output_dir) / "verify-scratch").string();
  auto results = aswap::acceptance_checks(scratch);
  bool all_passed = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name << " — " << r.detail << " ["
              << r.seconds << " s]\n";
    all_passed = all_passed && r.passed;
  }
  std::cout << (all_passed ? "verify-all: all checks passed\n"
                           : "verify-all: at least one check FAILED\n");
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tunable-coupler circuit simulator and calibration toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<uint64_t> seed_override;
  std::optional<std::string> out_override;
  int threads = 1;
  app.add_option("--config", config_path, "YAML configuration file");
  app.add_option("--seed", seed_override, "override the config seed");
  app.add_option("--out", out_override, "output directory (default from config or $ASWAP_OUT)");
  app.add_option("--threads", threads, "worker threads (grids are tiny; kept for compatibility)");

  std::vector<CLI::App*> subs;
  for (const auto& name : aswap::artifact_subcommands())
    subs.push_back(app.add_subcommand(name, "write " + name + " data artifacts"));
  CLI::App* verify = app.add_subcommand("verify-all", "run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  aswap::RunConfig config;
  try {
    config = config_path.empty() ? aswap::default_config() : aswap::load_config(config_path);
    if (seed_override) config.seed = *seed_override;
    if (out_override) {
      config.output_dir = *out_override;
    } else if (config_path.empty()) {
      if (const char* env = std::getenv("ASWAP_OUT")) config.output_dir = env;
    }
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    auto start = std::chrono::steady_clock::now();
    if (verify->parsed()) {
      int rc = run_verify_all(config);
      double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_manifest(config, "verify-all", {}, wall);
      return rc;
    }
    for (size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const std::string& name = aswap::artifact_subcommands()[i];
      auto artifacts = aswap::run_subcommand(name, config);
      double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_manifest(config, name, artifacts, wall);
      for (const auto& path : artifacts) std::cout << path << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
