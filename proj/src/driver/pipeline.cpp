#include "heco/driver/pipeline.h"

#include <algorithm>
#include <chrono>
#include <functional>

#include "heco/dsl/lower.h"
#include "heco/dsl/parser.h"
#include "heco/ir/rewrites.h"
#include "heco/ir/verifier.h"
#include "heco/passes/preprocess.h"

namespace heco::driver {

FrontendResult runFrontend(std::string_view source, const FrontendOptions& options) {
  FrontendResult r;
  r.ast = dsl::parseSource(source);
  dsl::CheckOptions check;
  check.overrides = options.defines;
  if (options.n) check.overrides["N"] = *options.n;
  check.modulus = options.modulus;
  r.typed = dsl::checkTypes(r.ast, check);
  if (!options.function.empty()) {
    r.function = options.function;
  } else if (r.typed.functions.size() == 1) {
    r.function = r.typed.functions.front().fn.name;
  } else {
    throw CompileError(ErrorKind::kInput, "the file defines " +
                                              std::to_string(r.typed.functions.size()) +
                                              " functions; choose one with --function");
  }
  r.ir = dsl::lowerFunction(r.typed, r.typed.function(r.function));
  ir::verifyOrThrow(r.ir, "after lowering");
  return r;
}

std::vector<std::string> defaultBatchedPasses() {
  return {"canonicalize", "fold",    "cse",     "merge-arith", "fold",
          "vectorize-plain", "cse",  "simdify", "cleanup",     "lower-folds",
          "cleanup",      "materialize", "fold", "cse",        "canonicalize"};
}

std::vector<std::string> naivePasses() { return {"canonicalize", "fold", "cse", "merge-arith"}; }

namespace {

using PassFn = std::function<ir::IrFunction(const ir::IrFunction&, const PipelineConfig&,
                                            passes::SimdifyStats&)>;

const std::map<std::string, PassFn>& registry() {
  static const std::map<std::string, PassFn> passes = {
      {"canonicalize", [](const auto& f, const auto&, auto&) { return ir::canonicalize(f); }},
      {"fold", [](const auto& f, const auto&, auto&) { return ir::constantFold(f); }},
      {"cse", [](const auto& f, const auto&, auto&) { return ir::cse(f); }},
      {"merge-arith", [](const auto& f, const auto&, auto&) { return passes::mergeArith(f); }},
      {"vectorize-plain",
       [](const auto& f, const auto&, auto&) { return passes::vectorizePlaintexts(f); }},
      {"simdify",
       [](const auto& f, const PipelineConfig& c, passes::SimdifyStats& s) {
         return passes::simdify(f, c.simdify, &s);
       }},
      {"cleanup", [](const auto& f, const auto&, auto&) { return passes::cleanup(f); }},
      {"lower-folds", [](const auto& f, const auto&, auto&) { return passes::lowerFolds(f); }},
      {"materialize", [](const auto& f, const auto&, auto&) { return passes::materialize(f); }},
  };
  return passes;
}

const std::set<std::string> kMandatory = {"materialize"};

double elapsedMs(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::vector<std::string> knownPasses() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

void validatePipeline(const PipelineConfig& config) {
  for (const auto& name : config.passes) {
    if (!registry().count(name)) throw CompileError(ErrorKind::kPipeline, "unknown pass '" + name + "'");
  }
  for (const auto& name : config.skip) {
    if (!registry().count(name)) {
      throw CompileError(ErrorKind::kPipeline, "cannot skip unknown pass '" + name + "'");
    }
    if (kMandatory.count(name)) {
      throw CompileError(ErrorKind::kPipeline, "pass '" + name + "' is required and cannot be skipped");
    }
  }
  auto first = [&](const std::string& name) -> std::optional<size_t> {
    auto it = std::find(config.passes.begin(), config.passes.end(), name);
    if (it == config.passes.end()) return std::nullopt;
    return static_cast<size_t>(it - config.passes.begin());
  };
  auto last = [&](const std::string& name) -> std::optional<size_t> {
    auto it = std::find(config.passes.rbegin(), config.passes.rend(), name);
    if (it == config.passes.rend()) return std::nullopt;
    return static_cast<size_t>(config.passes.rend() - it - 1);
  };
  auto requireBefore = [&](const std::string& a, std::optional<size_t> ia, const std::string& b,
                           std::optional<size_t> ib) {
    if (ia && ib && *ia > *ib) {
      throw CompileError(ErrorKind::kPipeline, "pass '" + a + "' must run before '" + b + "'");
    }
  };
  requireBefore("merge-arith", first("merge-arith"), "simdify", first("simdify"));
  requireBefore("cleanup", first("cleanup"), "lower-folds", first("lower-folds"));
  auto materialize = last("materialize");
  if (!materialize) throw CompileError(ErrorKind::kPipeline, "pipeline lacks 'materialize'");
  for (const char* name : {"merge-arith", "vectorize-plain", "simdify", "cleanup", "lower-folds"}) {
    requireBefore(name, last(name), "materialize", materialize);
  }
}

std::vector<std::string> uniquePassLabels(const std::vector<std::string>& passes) {
  std::map<std::string, int> seen;
  std::vector<std::string> labels;
  for (const auto& name : passes) {
    int count = ++seen[name];
    labels.push_back(count == 1 ? name : name + "." + std::to_string(count));
  }
  return labels;
}

namespace {

CompileResult runPasses(const ir::IrFunction& lowered, const std::vector<std::string>& names,
                        const PipelineConfig& config) {
  CompileResult r;
  r.lowered = lowered;
  std::vector<std::string> executed;
  for (const auto& name : names) {
    if (!config.skip.count(name)) executed.push_back(name);
  }
  std::vector<std::string> labels = uniquePassLabels(executed);
  ir::IrFunction current = lowered;
  bool materialized = false;
  for (size_t i = 0; i < executed.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    current = registry().at(executed[i])(current, config, r.simdify);
    r.cost.compile_ms.emplace_back(labels[i], elapsedMs(start));
    materialized = materialized || executed[i] == "materialize";
    ir::verifyOrThrow(current, "after pass '" + labels[i] + "'", {materialized});
    r.stages.push_back({labels[i], current});
  }
  r.final_ir = std::move(current);
  return r;
}

void finishCircuit(CompileResult& r, backend::CircuitFunction circuit, const PipelineConfig& config,
                   const backend::BackendConfig& backend) {
  auto start = std::chrono::steady_clock::now();
  r.circuit = backend::insertRelinearization(circuit, config.relin);
  auto violations = backend::verifyCircuit(r.circuit);
  if (!violations.empty()) {
    throw CompileError(ErrorKind::kPipeline, "invalid circuit: " + violations.front());
  }
  double ms = elapsedMs(start);
  auto timings = std::move(r.cost.compile_ms);
  r.cost = backend::estimateCost(r.circuit, backend, config.params);
  r.cost.compile_ms = std::move(timings);
  r.cost.compile_ms.emplace_back("circuit", ms);
}

}  // namespace

CompileResult compileBatched(const ir::IrFunction& lowered, const PipelineConfig& config,
                             const backend::BackendConfig& backend) {
  validatePipeline(config);
  CompileResult r = runPasses(lowered, config.passes, config);
  finishCircuit(r, backend::lowerToCircuit(r.final_ir), config, backend);
  return r;
}

CompileResult compileNaive(const ir::IrFunction& lowered, const PipelineConfig& config,
                           const backend::BackendConfig& backend) {
  CompileResult r = runPasses(lowered, naivePasses(), config);
  finishCircuit(r, backend::lowerNaive(r.final_ir), config, backend);
  return r;
}

}  // namespace heco::driver
