#ifndef HECO_DRIVER_PIPELINE_H_
#define HECO_DRIVER_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heco/backend/analysis.h"
#include "heco/backend/config.h"
#include "heco/backend/lowering.h"
#include "heco/dsl/ast.h"
#include "heco/dsl/typecheck.h"
#include "heco/ir/ir.h"
#include "heco/passes/batching.h"

namespace heco::driver {

struct FrontendOptions {
  /// Function to compile; may be empty when the file defines exactly one.
  std::string function;
  /// Overrides for top-level constants (-D NAME=VALUE).
  std::map<std::string, int64_t> defines;
  /// Shorthand for defines["N"].
  std::optional<int64_t> n;
  uint64_t modulus = kDefaultModulus;
};

struct FrontendResult {
  dsl::Program ast;
  dsl::TypedProgram typed;
  std::string function;
  ir::IrFunction ir;
};

/// Parses, type-checks and lowers one function.
FrontendResult runFrontend(std::string_view source, const FrontendOptions& options);

/// Default batched pass order.
std::vector<std::string> defaultBatchedPasses();
/// Passes applied to the high-level IR before per-element lowering.
std::vector<std::string> naivePasses();
/// Every registered pass name.
std::vector<std::string> knownPasses();

struct PipelineConfig {
  std::vector<std::string> passes = defaultBatchedPasses();
  /// Names removed from `passes`; every occurrence is skipped.
  std::set<std::string> skip;
  backend::RelinPolicy relin = backend::RelinPolicy::kAlways;
  /// Parameter row override; empty selects the smallest sufficient row.
  std::string params;
  passes::SimdifyOptions simdify;
};

/// Throws CompileError(kPipeline) for unknown names, a skipped mandatory pass
/// or an order that breaks merge-arith < simdify, cleanup < lower-folds and
/// materialize after every batching pass.
void validatePipeline(const PipelineConfig& config);

struct StageSnapshot {
  std::string pass;
  ir::IrFunction ir;
};

struct CompileResult {
  ir::IrFunction lowered;
  /// IR after every executed pass, in order.
  std::vector<StageSnapshot> stages;
  ir::IrFunction final_ir;
  backend::CircuitFunction circuit;
  backend::CostReport cost;
  passes::SimdifyStats simdify;
};

/// Runs the batched pipeline, verifying the IR after each pass, then lowers
/// to a circuit, inserts relinearization and estimates the cost.
CompileResult compileBatched(const ir::IrFunction& lowered, const PipelineConfig& config,
                             const backend::BackendConfig& backend);

/// Cleans the IR up, merges arithmetic chains and lowers each element to its
/// own ciphertext.
CompileResult compileNaive(const ir::IrFunction& lowered, const PipelineConfig& config,
                           const backend::BackendConfig& backend);

/// Names repeated passes "cleanup", "cleanup.2", ...
std::vector<std::string> uniquePassLabels(const std::vector<std::string>& passes);

}  // namespace heco::driver

#endif  // HECO_DRIVER_PIPELINE_H_
