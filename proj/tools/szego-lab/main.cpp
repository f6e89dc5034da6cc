#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "lab/config.hpp"
#include "lab/runner.hpp"

namespace {

enum Exit { kOk = 0, kConfigError = 2, kComputationError = 3, kSuiteFailure = 4 };

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace szego::lab;

  CLI::App app{"Numerical experiments for quasi-periodic Verblunsky coefficients", "szego-lab"};
  app.set_version_flag("--version", kToolVersion);
  std::string command, configPath, outDir;
  unsigned threads = 0;
  bool noCache = false;
  app.add_option("command", command, "one of: " + join(commandNames()) + ", validate")->required();
  app.add_option("--config", configPath, "JSON experiment config")->required();
  app.add_option("--out", outDir, "output directory (default: config 'out' or ./szego-out)");
  auto* threadsOpt = app.add_option("--threads", threads, "worker threads, 0 = all cores");
  app.add_flag("--no-cache", noCache, "ignore and do not write the result cache");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const bool validateOnly = command == "validate";
  const auto cliCommand = commandFromString(command);
  if (!validateOnly && !cliCommand) {
    std::cerr << "error: unknown command '" << command << "' (expected " << join(commandNames())
              << ", validate)\n";
    return kConfigError;
  }

  std::ifstream in(configPath, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config file " << configPath << "\n";
    return kConfigError;
  }
  std::ostringstream text;
  text << in.rdbuf();

  ExperimentConfig config;
  try {
    config = validate(text.str(), validateOnly ? std::nullopt : cliCommand);
  } catch (const ConfigError& e) {
    std::cerr << configPath << ": " << e.what() << "\n";
    return kConfigError;
  }

  if (validateOnly) {
    std::cout << config.canonical().dump(2) << "\n";
    return kOk;
  }

  RunOptions options;
  options.outDir = !outDir.empty() ? outDir : (!config.out.empty() ? config.out : "szego-out");
  options.threads = threadsOpt->count() > 0 ? threads : config.threads;
  options.useCache = !noCache;
  options.log = &std::cerr;

  RunReport report;
  try {
    report = run(config, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << command << ": " << e.what() << "\n";
    return kComputationError;
  }
  std::cerr << command << ": " << (report.cacheHit ? "cache hit" : "computed") << " in "
            << report.envelope.wallTime << " s, config " << report.envelope.configHash << "\n";
  for (const auto& p : report.written) std::cout << p.string() << "\n";
  if (!report.suitePassed) {
    std::cerr << "suite: at least one check failed\n";
    return kSuiteFailure;
  }
  return kOk;
}
