#ifndef HECO_DRIVER_COMMANDS_H_
#define HECO_DRIVER_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "heco/driver/pipeline.h"
#include "heco/sim/values.h"

namespace heco::driver {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoise = 2;
inline constexpr int kExitMismatch = 3;

struct CommonOptions {
  FrontendOptions frontend;
  PipelineConfig pipeline;
  backend::BackendConfig backend;
};

struct CompileCommand {
  std::string file;
  /// ast | ir | batched | circuit | stats
  std::string emit = "batched";
  bool json = false;
  bool timing = true;
  /// With --emit batched: print the IR after this pass label instead of the
  /// final IR, e.g. "simdify" or "cleanup.2".
  std::string stop_after;
};

struct RunCommand {
  std::string file;
  std::string input;
  /// naive runs the reference interpreter; batched runs the compiled circuit.
  std::string mode = "batched";
  bool trace = false;
  bool full_trace = false;
};

struct BenchCommand {
  /// A corpus name or "all".
  std::string name = "all";
  /// Overrides each benchmark's default sizes.
  std::vector<int64_t> sizes;
  int repeat = 10;
  uint64_t seed = 1;
  bool json = false;
  /// Compile runs per row; the time is averaged without the fastest and
  /// slowest run.
  int timing_iterations = 10;
  bool timing = true;
};

struct CompareCommand {
  std::string file;
  int trials = 100;
  uint64_t seed = 1;
};

int runCompile(const CompileCommand& cmd, const CommonOptions& common, std::ostream& out,
               std::ostream& err);
int runRun(const RunCommand& cmd, const CommonOptions& common, std::ostream& out,
           std::ostream& err);
int runBench(const BenchCommand& cmd, const CommonOptions& common, std::ostream& out,
             std::ostream& err);
int runCompare(const CompareCommand& cmd, const CommonOptions& common, std::ostream& out,
               std::ostream& err);

/// Uniform values in [0, t) for every parameter of `f`.
sim::NamedValues randomInputs(const ir::IrFunction& f, std::mt19937_64& rng);

/// Mean of `samples` after dropping the smallest and largest when there are
/// at least three.
double trimmedMean(std::vector<double> samples);

struct Divergence {
  /// First pass whose output differs from the reference, or "circuit".
  std::string stage;
  /// First differing element of the result.
  int64_t slot = 0;
  sim::NamedValues input;
  sim::PlainValue expected;
  sim::PlainValue actual;
};

/// Runs the reference interpreter and the compiled circuit on `input` (with
/// an unbounded noise budget). Returns the divergence, if any, attributed to
/// the first IR stage that disagrees.
std::optional<Divergence> checkOnce(const FrontendResult& front, const CompileResult& compiled,
                                    const sim::NamedValues& input);

/// Greedily replaces input elements by 0 or 1 while the divergence persists.
sim::NamedValues shrinkInput(const FrontendResult& front, const CompileResult& compiled,
                             sim::NamedValues input);

}  // namespace heco::driver

#endif  // HECO_DRIVER_COMMANDS_H_
