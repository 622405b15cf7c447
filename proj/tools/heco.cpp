#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heco/driver/commands.h"

namespace {

using heco::driver::CommonOptions;

struct SharedFlags {
  std::vector<std::string> defines;
  int64_t n = 0;
  std::string function;
  uint64_t t = heco::kDefaultModulus;
  std::vector<std::string> skip;
  std::string params;
  std::string relin = "always";
  std::string config;
  bool inject_fault = false;
};

void addShared(CLI::App* cmd, SharedFlags& flags, bool with_n) {
  cmd->add_option("-D,--define", flags.defines, "Override a top-level constant, NAME=VALUE");
  if (with_n) cmd->add_option("--n", flags.n, "Vector length (sets the constant N)");
  cmd->add_option("--function", flags.function, "Function to compile");
  cmd->add_option("--t", flags.t, "Plaintext modulus (odd prime)");
  cmd->add_option("--skip-pass", flags.skip, "Skip every occurrence of a pass");
  cmd->add_option("--params", flags.params, "Parameter set (SMALL, MEDIUM, LARGE, XLARGE)");
  cmd->add_option("--relin", flags.relin, "Relinearization policy")
      ->check(CLI::IsMember({"always", "none"}));
  cmd->add_option("--config", flags.config, "Weight, parameter and noise config (JSON)");
  cmd->add_flag("--inject-fault", flags.inject_fault)->group("");
}

CommonOptions buildCommon(const SharedFlags& flags) {
  CommonOptions common;
  for (const auto& d : flags.defines) {
    auto eq = d.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw heco::CompileError(heco::ErrorKind::kInput, "-D expects NAME=VALUE, got '" + d + "'");
    }
    try {
      common.frontend.defines[d.substr(0, eq)] = std::stoll(d.substr(eq + 1));
    } catch (const std::exception&) {
      throw heco::CompileError(heco::ErrorKind::kInput, "-D value must be an integer: '" + d + "'");
    }
  }
  if (flags.n != 0) common.frontend.n = flags.n;
  common.frontend.function = flags.function;
  if (!heco::isValidPlainModulus(flags.t)) {
    throw heco::CompileError(heco::ErrorKind::kInput,
                             "--t must be an odd prime below 2^31, got " + std::to_string(flags.t));
  }
  common.frontend.modulus = flags.t;
  common.pipeline.skip.insert(flags.skip.begin(), flags.skip.end());
  common.pipeline.params = flags.params;
  common.pipeline.relin =
      flags.relin == "none" ? heco::backend::RelinPolicy::kNone : heco::backend::RelinPolicy::kAlways;
  common.pipeline.simdify.flip_rotation_sign = flags.inject_fault;
  common.backend = flags.config.empty() ? heco::backend::BackendConfig::fromEnvironment()
                                        : heco::backend::BackendConfig::loadFile(flags.config);
  if (!flags.params.empty()) common.backend.row(flags.params);
  return common;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batching compiler for homomorphic encryption programs"};
  app.require_subcommand(1);

  SharedFlags compileFlags, runFlags, benchFlags, compareFlags;

  heco::driver::CompileCommand compile;
  bool noTiming = false;
  auto* compileCmd = app.add_subcommand("compile", "Compile a .heco file");
  compileCmd->add_option("file", compile.file, "Source file or corpus name")->required();
  compileCmd->add_option("--emit", compile.emit, "ast | ir | batched | circuit | stats")
      ->check(CLI::IsMember({"ast", "ir", "batched", "circuit", "stats"}));
  compileCmd->add_flag("--json", compile.json, "Emit JSON");
  compileCmd->add_option("--stop-after", compile.stop_after,
                         "With --emit batched, print the IR after this pass (e.g. cleanup.2)");
  compileCmd->add_flag("--no-timing", noTiming, "Omit compile times");
  addShared(compileCmd, compileFlags, true);

  heco::driver::RunCommand run;
  auto* runCmd = app.add_subcommand("run", "Run a program on inputs");
  runCmd->add_option("file", run.file, "Source file or corpus name")->required();
  runCmd->add_option("--input", run.input, "Input JSON file")->required();
  runCmd->add_option("--mode", run.mode, "naive | batched")
      ->check(CLI::IsMember({"naive", "batched"}));
  runCmd->add_flag("--trace", run.trace, "Print one line per circuit op to stderr");
  runCmd->add_flag("--full-trace", run.full_trace, "Like --trace, without eliding slots");
  addShared(runCmd, runFlags, true);

  heco::driver::BenchCommand bench;
  std::vector<int64_t> benchSizes;
  bool benchNoTiming = false;
  auto* benchCmd = app.add_subcommand("bench", "Compare naive and batched circuits");
  benchCmd->add_option("name", bench.name, "Benchmark name or 'all'");
  benchCmd->add_option("--n", benchSizes, "Vector lengths")->delimiter(',');
  benchCmd->add_option("--repeat", bench.repeat, "Random inputs checked per row");
  benchCmd->add_option("--seed", bench.seed, "Random seed");
  benchCmd->add_option("--timing-iterations", bench.timing_iterations, "Compile runs per row");
  benchCmd->add_flag("--json", bench.json, "Emit JSON");
  benchCmd->add_flag("--no-timing", benchNoTiming, "Omit compile times");
  addShared(benchCmd, benchFlags, false);

  heco::driver::CompareCommand compare;
  auto* compareCmd = app.add_subcommand("compare", "Check batched output against the reference");
  compareCmd->add_option("file", compare.file, "Source file or corpus name")->required();
  compareCmd->add_option("--trials", compare.trials, "Number of random inputs");
  compareCmd->add_option("--seed", compare.seed, "Random seed");
  addShared(compareCmd, compareFlags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : heco::driver::kExitError;
  }

  try {
    if (*compileCmd) {
      compile.timing = !noTiming;
      return heco::driver::runCompile(compile, buildCommon(compileFlags), std::cout, std::cerr);
    }
    if (*runCmd) return heco::driver::runRun(run, buildCommon(runFlags), std::cout, std::cerr);
    if (*benchCmd) {
      bench.sizes = benchSizes;
      bench.timing = !benchNoTiming;
      return heco::driver::runBench(bench, buildCommon(benchFlags), std::cout, std::cerr);
    }
    return heco::driver::runCompare(compare, buildCommon(compareFlags), std::cout, std::cerr);
  } catch (const heco::CompileError& e) {
    std::cerr << e.what() << '\n';
    return heco::driver::kExitError;
  }
}
