#include "heco/driver/commands.h"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "heco/driver/corpus.h"
#include "heco/dsl/parser.h"
#include "heco/ir/serialize.h"
#include "heco/sim/ir_interpreter.h"
#include "heco/sim/reference.h"
#include "heco/sim/simulator.h"

namespace heco::driver {

using nlohmann::json;

namespace {

constexpr int64_t kUnboundedBudget = std::numeric_limits<int64_t>::max();

void reportError(std::ostream& err, const std::string& file, const CompileError& e) {
  err << (file.empty() ? "" : file + ": ") << e.what() << '\n';
}

double msSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

struct Compiled {
  FrontendResult front;
  CompileResult result;
};

Compiled compileFile(const std::string& file, const CommonOptions& common) {
  auto start = std::chrono::steady_clock::now();
  Compiled c{runFrontend(readFile(resolveSource(file)), common.frontend), {}};
  double frontend_ms = msSince(start);
  c.result = compileBatched(c.front.ir, common.pipeline, common.backend);
  c.result.cost.compile_ms.insert(c.result.cost.compile_ms.begin(), {"frontend", frontend_ms});
  return c;
}

json simdifyJson(const passes::SimdifyStats& s) {
  return {{"translated_ops", s.translated_ops},
          {"alignment_rotations", s.alignment_rotations},
          {"scalar_extracts", s.scalar_extracts},
          {"dual_use", s.dual_use}};
}

json statsJson(const Compiled& c, bool timing) {
  json j = backend::toJson(c.result.cost);
  j["function"] = c.front.function;
  j["n"] = c.result.final_ir.slots;
  j["t"] = c.result.final_ir.modulus;
  j["simdify"] = simdifyJson(c.result.simdify);
  if (!timing) j.erase("compile_ms");
  return j;
}

void printStats(std::ostream& out, const Compiled& c, bool timing) {
  const auto& cost = c.result.cost;
  out << "function " << c.front.function << "  n=" << c.result.final_ir.slots
      << "  t=" << c.result.final_ir.modulus << '\n';
  out << "ops:";
  for (backend::CircuitOpKind k : backend::kAllCircuitOpKinds) {
    out << ' ' << backend::circuitOpKey(k) << '=' << cost.count(k);
  }
  out << '\n';
  out << "total_ops " << cost.total_ops << "  depth " << cost.depth << "  peak_noise "
      << cost.peak_noise << "  weighted_cost " << cost.weighted_cost << '\n';
  if (cost.params) {
    out << "params " << cost.params->name << " (budget " << cost.params->budget << ")\n";
  } else {
    out << "params none: " << cost.params_error << '\n';
  }
  const auto& s = c.result.simdify;
  out << "simdify translated=" << s.translated_ops << " alignment_rotations="
      << s.alignment_rotations << " scalar_extracts=" << s.scalar_extracts
      << " dual_use=" << s.dual_use << '\n';
  if (timing) {
    out << "compile_ms";
    for (const auto& [pass, ms] : cost.compile_ms) {
      out << ' ' << pass << '=' << std::fixed << std::setprecision(3) << ms;
    }
    out << std::defaultfloat << '\n';
  }
}

// Budget of the parameter row used to run a circuit: the override, the
// selected row, or the largest row when nothing fits.
backend::ParamRow runRow(const backend::CostReport& cost, const backend::BackendConfig& config) {
  if (cost.params) return {cost.params->name, cost.params->budget};
  return config.parameters.back();
}

bool sameValue(const sim::PlainValue& a, const sim::PlainValue& b) { return a == b; }

int64_t firstDifference(const sim::PlainValue& a, const sim::PlainValue& b) {
  size_t n = std::min(a.data.size(), b.data.size());
  for (size_t i = 0; i < n; ++i) {
    if (a.data[i] != b.data[i]) return static_cast<int64_t>(i);
  }
  return static_cast<int64_t>(n);
}

sim::PlainValue runBatched(const CompileResult& compiled, const sim::NamedValues& input) {
  return sim::runCircuit(compiled.circuit, input, {}, kUnboundedBudget);
}

}  // namespace

sim::NamedValues randomInputs(const ir::IrFunction& f, std::mt19937_64& rng) {
  std::uniform_int_distribution<uint64_t> dist(0, f.modulus - 1);
  sim::NamedValues values;
  for (const auto& p : f.params) {
    if (ir::isScalarType(p.type)) {
      values[p.name] = sim::PlainValue::scalar(dist(rng));
    } else {
      std::vector<uint64_t> data(static_cast<size_t>(f.slots));
      for (auto& v : data) v = dist(rng);
      values[p.name] = sim::PlainValue::vector(std::move(data));
    }
  }
  return values;
}

double trimmedMean(std::vector<double> samples) {
  if (samples.empty()) return 0;
  std::sort(samples.begin(), samples.end());
  if (samples.size() >= 3) samples = std::vector<double>(samples.begin() + 1, samples.end() - 1);
  double sum = 0;
  for (double s : samples) sum += s;
  return sum / static_cast<double>(samples.size());
}

std::optional<Divergence> checkOnce(const FrontendResult& front, const CompileResult& compiled,
                                    const sim::NamedValues& input) {
  sim::PlainValue expected = sim::execReference(front.typed, front.function, input);
  sim::PlainValue actual = runBatched(compiled, input);
  if (sameValue(expected, actual)) return std::nullopt;
  Divergence d{"circuit", firstDifference(expected, actual), input, expected, actual};
  auto stageDiffers = [&](const ir::IrFunction& f, const std::string& name) {
    sim::PlainValue v = sim::interpret(f, input);
    if (sameValue(expected, v)) return false;
    d.stage = name;
    d.slot = firstDifference(expected, v);
    d.actual = v;
    return true;
  };
  if (stageDiffers(compiled.lowered, "lowering")) return d;
  for (const auto& stage : compiled.stages) {
    if (stageDiffers(stage.ir, stage.pass)) return d;
  }
  return d;
}

sim::NamedValues shrinkInput(const FrontendResult& front, const CompileResult& compiled,
                             sim::NamedValues input) {
  auto diverges = [&](const sim::NamedValues& in) {
    return !sameValue(sim::execReference(front.typed, front.function, in),
                      runBatched(compiled, in));
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [name, value] : input) {
      for (auto& element : value.data) {
        for (uint64_t candidate : {uint64_t{0}, uint64_t{1}}) {
          if (element <= candidate) break;
          uint64_t saved = element;
          element = candidate;
          if (diverges(input)) {
            changed = true;
            break;
          }
          element = saved;
        }
      }
    }
  }
  return input;
}

int runCompile(const CompileCommand& cmd, const CommonOptions& common, std::ostream& out,
               std::ostream& err) {
  try {
    if (cmd.emit == "ast" || cmd.emit == "ir") {
      FrontendResult front = runFrontend(readFile(resolveSource(cmd.file)), common.frontend);
      if (cmd.emit == "ast") {
        out << dsl::printProgram(front.ast);
      } else if (cmd.json) {
        out << ir::exportJson(front.ir).dump(2) << '\n';
      } else {
        out << ir::printIr(front.ir);
      }
      return kExitOk;
    }
    if (cmd.emit != "batched" && cmd.emit != "circuit" && cmd.emit != "stats") {
      throw CompileError(ErrorKind::kInput, "unknown --emit value '" + cmd.emit +
                                                "' (expected ast, ir, batched, circuit or stats)");
    }
    Compiled c = compileFile(cmd.file, common);
    if (cmd.emit == "batched") {
      const ir::IrFunction* shown = &c.result.final_ir;
      if (!cmd.stop_after.empty()) {
        auto it = std::find_if(c.result.stages.begin(), c.result.stages.end(),
                               [&](const StageSnapshot& s) { return s.pass == cmd.stop_after; });
        if (it == c.result.stages.end()) {
          throw CompileError(ErrorKind::kInput, "no executed pass is labelled '" + cmd.stop_after + "'");
        }
        shown = &it->ir;
      }
      if (cmd.json) {
        out << ir::exportJson(*shown).dump(2) << '\n';
      } else {
        out << ir::printIr(*shown);
      }
    } else if (cmd.emit == "circuit") {
      out << backend::circuitToJson(c.result.circuit).dump(2) << '\n';
    } else if (cmd.json) {
      out << statsJson(c, cmd.timing).dump(2) << '\n';
    } else {
      printStats(out, c, cmd.timing);
    }
    if (!c.result.cost.params) err << "warning: " << c.result.cost.params_error << '\n';
    return kExitOk;
  } catch (const CompileError& e) {
    reportError(err, cmd.file, e);
    return kExitError;
  }
}

int runRun(const RunCommand& cmd, const CommonOptions& common, std::ostream& out,
           std::ostream& err) {
  try {
    if (cmd.mode != "naive" && cmd.mode != "batched") {
      throw CompileError(ErrorKind::kInput, "unknown --mode '" + cmd.mode + "' (expected naive or batched)");
    }
    json raw;
    try {
      raw = json::parse(readFile(cmd.input));
    } catch (const json::parse_error& e) {
      throw CompileError(ErrorKind::kInput, "malformed input JSON: " + std::string(e.what()));
    }
    sim::PlainValue result;
    if (cmd.mode == "naive") {
      FrontendResult front = runFrontend(readFile(resolveSource(cmd.file)), common.frontend);
      result = sim::execReference(front.typed, front.function,
                                  sim::valuesFromJson(raw, common.frontend.modulus));
    } else {
      Compiled c = compileFile(cmd.file, common);
      sim::NamedValues inputs = sim::valuesFromJson(raw, common.frontend.modulus);
      sim::checkInputs(c.front.typed.function(c.front.function), inputs);
      backend::ParamRow row = runRow(c.result.cost, common.backend);
      sim::TraceOptions trace{cmd.trace || cmd.full_trace, cmd.full_trace};
      sim::ExecutionTrace t =
          sim::execCircuit(c.result.circuit, inputs, common.backend.noise, row.budget, trace);
      for (const auto& line : t.lines) err << line << '\n';
      try {
        result = sim::decryptOutputs(c.result.circuit, t, row.budget);
      } catch (const sim::NoiseBudgetExceeded& e) {
        err << "error: " << e.what() << " under parameter set " << row.name << '\n';
        return kExitNoise;
      }
    }
    out << json{{"output", sim::valueToJson(result)}}.dump() << '\n';
    return kExitOk;
  } catch (const CompileError& e) {
    reportError(err, cmd.file, e);
    return kExitError;
  }
}

namespace {

struct BenchRow {
  std::string name;
  int64_t n = 0;
  backend::CostReport naive;
  backend::CostReport batched;
  double ratio = 0;
  double compile_ms = 0;
  bool ok = true;
  std::string failure;
};

BenchRow benchOne(const CorpusEntry& entry, int64_t n, const BenchCommand& cmd,
                  const CommonOptions& common) {
  BenchRow row;
  row.name = entry.name;
  row.n = n;
  CommonOptions options = common;
  options.frontend.n = n;
  options.frontend.function.clear();
  std::string source = readFile(corpusPath(entry.name));
  std::vector<double> samples;
  Compiled c;
  for (int i = 0; i < std::max(1, cmd.timing_iterations); ++i) {
    auto start = std::chrono::steady_clock::now();
    Compiled run{runFrontend(source, options.frontend), {}};
    run.result = compileBatched(run.front.ir, options.pipeline, options.backend);
    samples.push_back(msSince(start));
    if (i == 0) c = std::move(run);
  }
  row.compile_ms = trimmedMean(samples);
  CompileResult naive = compileNaive(c.front.ir, options.pipeline, options.backend);
  row.naive = naive.cost;
  row.batched = c.result.cost;
  row.ratio = row.batched.total_ops == 0
                  ? 0
                  : static_cast<double>(row.naive.total_ops) / static_cast<double>(row.batched.total_ops);

  std::mt19937_64 rng(cmd.seed);
  for (int trial = 0; trial < cmd.repeat && row.ok; ++trial) {
    sim::NamedValues input = randomInputs(c.front.ir, rng);
    sim::PlainValue expected = sim::execReference(c.front.typed, c.front.function, input);
    for (const auto* result : {&c.result, &naive}) {
      sim::PlainValue actual = runBatched(*result, input);
      if (!sameValue(expected, actual)) {
        row.ok = false;
        row.failure = std::string(result == &naive ? "naive" : "batched") +
                      " output differs from the reference at element " +
                      std::to_string(firstDifference(expected, actual));
        break;
      }
    }
  }
  return row;
}

json costSummary(const backend::CostReport& cost, bool timing) {
  json j = backend::toJson(cost);
  if (!timing) j.erase("compile_ms");
  return j;
}

}  // namespace

int runBench(const BenchCommand& cmd, const CommonOptions& common, std::ostream& out,
             std::ostream& err) {
  try {
    std::vector<const CorpusEntry*> entries;
    if (cmd.name == "all") {
      for (const auto& e : corpus()) entries.push_back(&e);
    } else {
      entries.push_back(&corpusEntry(cmd.name));
    }
    std::vector<BenchRow> rows;
    for (const auto* entry : entries) {
      for (int64_t n : cmd.sizes.empty() ? entry->bench_sizes : cmd.sizes) {
        rows.push_back(benchOne(*entry, n, cmd, common));
      }
    }
    bool allOk = std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.ok; });
    if (cmd.json) {
      json j = json::array();
      for (const auto& r : rows) {
        json row = {{"benchmark", r.name},
                    {"n", r.n},
                    {"naive", costSummary(r.naive, cmd.timing)},
                    {"batched", costSummary(r.batched, cmd.timing)},
                    {"total_ops_ratio", r.ratio},
                    {"verdict", r.ok ? "PASS" : "FAILED"}};
        if (cmd.timing) row["compile_ms"] = r.compile_ms;
        if (!r.ok) row["failure"] = r.failure;
        j.push_back(row);
      }
      out << j.dump(2) << '\n';
    } else {
      out << std::left << std::setw(22) << "benchmark" << std::right << std::setw(6) << "n"
          << std::setw(11) << "naive_ops" << std::setw(12) << "batched_ops" << std::setw(10)
          << "ratio" << std::setw(6) << "rot" << std::setw(8) << "mul_cc" << std::setw(8)
          << "mul_cp" << std::setw(7) << "depth" << std::setw(8) << "params";
      if (cmd.timing) out << std::setw(12) << "compile_ms";
      out << "  verdict\n";
      for (const auto& r : rows) {
        out << std::left << std::setw(22) << r.name << std::right << std::setw(6) << r.n
            << std::setw(11) << r.naive.total_ops << std::setw(12) << r.batched.total_ops
            << std::setw(10) << std::fixed << std::setprecision(1) << r.ratio << std::setw(6)
            << r.batched.rotations() << std::setw(8) << r.batched.count(backend::CircuitOpKind::kMulCC)
            << std::setw(8) << r.batched.count(backend::CircuitOpKind::kMulCP) << std::setw(7)
            << r.batched.depth << std::setw(8) << (r.batched.params ? r.batched.params->name : "-");
        if (cmd.timing) out << std::setw(12) << std::setprecision(2) << r.compile_ms;
        out << std::defaultfloat << "  " << (r.ok ? "PASS" : "FAILED: " + r.failure) << '\n';
      }
    }
    return allOk ? kExitOk : kExitMismatch;
  } catch (const CompileError& e) {
    reportError(err, cmd.name, e);
    return kExitError;
  }
}

int runCompare(const CompareCommand& cmd, const CommonOptions& common, std::ostream& out,
               std::ostream& err) {
  try {
    if (cmd.trials < 0) throw CompileError(ErrorKind::kInput, "--trials must be non-negative");
    Compiled c = compileFile(cmd.file, common);
    if (cmd.trials == 0) {
      err << "warning: 0 trials; nothing was compared\n";
      out << "PASS (vacuous, 0 trials)\n";
      return kExitOk;
    }
    std::mt19937_64 rng(cmd.seed);
    for (int trial = 0; trial < cmd.trials; ++trial) {
      sim::NamedValues input = randomInputs(c.front.ir, rng);
      auto divergence = checkOnce(c.front, c.result, input);
      if (!divergence) continue;
      sim::NamedValues small = shrinkInput(c.front, c.result, input);
      auto minimized = checkOnce(c.front, c.result, small);
      const Divergence& d = minimized ? *minimized : *divergence;
      out << "FAIL: divergence on trial " << trial << " (seed " << cmd.seed << ")\n";
      out << "first diverging stage: " << d.stage << ", element " << d.slot << '\n';
      out << "expected: " << sim::formatValue(d.expected) << '\n';
      out << "actual:   " << sim::formatValue(d.actual) << '\n';
      out << "counterexample: " << sim::valuesToJson(d.input).dump() << '\n';
      return kExitMismatch;
    }
    out << "PASS: " << cmd.trials << " trials, batched output equals the reference\n";
    return kExitOk;
  } catch (const CompileError& e) {
    reportError(err, cmd.file, e);
    return kExitError;
  }
}

}  // namespace heco::driver
