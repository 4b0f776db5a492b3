#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "procure/experiment.hpp"

namespace {

procure::ExperimentConfig configure(const std::string& path, std::optional<std::uint64_t> seed_flag) {
  procure::ExperimentConfig config = procure::load_config(path);
  if (const char* env = std::getenv("PROCURE_LEARN_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      config.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw procure::InvalidConfig(std::string("PROCURE_LEARN_SEED is not an unsigned integer: ") + env);
    }
  }
  if (seed_flag) config.seed = *seed_flag;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted online learning with posted-price data purchases"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::uint64_t> seed;
  bool quick = false;

  auto* run = app.add_subcommand("run", "Run independent trials and write transcript.csv and summary.csv");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the config seed");

  auto* sweep = app.add_subcommand("sweep", "Compare policies over the config's budget grid");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "Override the config seed");

  auto* verify = app.add_subcommand("verify", "Monte-Carlo checks of the pricing law and learner");
  verify->add_flag("--quick", quick, "Smaller sample sizes");

  auto* oracle = app.add_subcommand("oracle", "Best hypothesis in hindsight and sequence statistics");
  oracle->add_option("--config", config_path, "JSON config file")->required();
  oracle->add_option("--seed", seed, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      procure::cmd_run(configure(config_path, seed), jobs, std::cout);
    } else if (*sweep) {
      procure::cmd_sweep(configure(config_path, seed), jobs, std::cout);
    } else if (*verify) {
      procure::VerifyOptions options;
      options.quick = quick;
      const auto checks = procure::cmd_verify(options);
      const auto report = procure::verify_report_json(checks);
      std::cout << report.dump(2) << '\n';
      return report.at("passed").get<bool>() ? 0 : 1;
    } else if (*oracle) {
      std::cout << procure::cmd_oracle(configure(config_path, seed)).dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
