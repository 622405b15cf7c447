#include "heco/backend/analysis.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace heco::backend {

std::vector<double> analyzeDepth(const CircuitFunction& c) {
  std::vector<double> depth(c.idBound(), 0.0);
  for (const auto& op : c.ops) {
    double d = 0;
    for (CircuitId v : op.operands) d = std::max(d, depth[v]);
    if (op.kind == CircuitOpKind::kMulCC) d += 1.0;
    if (op.kind == CircuitOpKind::kMulCP) d += 0.5;
    depth[op.id] = d;
  }
  std::vector<double> out;
  for (CircuitId v : c.outputs) out.push_back(depth[v]);
  return out;
}

double circuitDepth(const CircuitFunction& c) {
  auto depths = analyzeDepth(c);
  return depths.empty() ? 0.0 : *std::max_element(depths.begin(), depths.end());
}

std::vector<int64_t> staticNoise(const CircuitFunction& c, const NoiseModel& model) {
  std::vector<int64_t> noise(c.idBound(), 0);
  for (const auto& in : c.inputs) noise[in.id] = model.fresh;
  for (const auto& op : c.ops) {
    const auto& o = op.operands;
    int64_t n = 0;
    switch (op.kind) {
      case CircuitOpKind::kPtConst: n = 0; break;
      case CircuitOpKind::kAddCC:
      case CircuitOpKind::kSubCC: n = std::max(noise[o[0]], noise[o[1]]) + model.add_cc; break;
      case CircuitOpKind::kAddCP: n = noise[o[0]] + model.add_cp; break;
      case CircuitOpKind::kMulCC: n = noise[o[0]] + noise[o[1]] + model.mul_cc; break;
      case CircuitOpKind::kMulCP: n = noise[o[0]] + model.mul_cp; break;
      case CircuitOpKind::kRotate: n = noise[o[0]] + model.rotate; break;
      case CircuitOpKind::kRelinearize: n = noise[o[0]] + model.relinearize; break;
      case CircuitOpKind::kNegate: n = noise[o[0]] + model.negate; break;
    }
    noise[op.id] = n;
  }
  return noise;
}

int64_t peakNoise(const CircuitFunction& c, const NoiseModel& model) {
  auto noise = staticNoise(c, model);
  return noise.empty() ? 0 : *std::max_element(noise.begin(), noise.end());
}

nlohmann::json toJson(const SchemeParams& p) {
  return {{"name", p.name}, {"n", p.slots}, {"t", p.modulus}, {"budget", p.budget}};
}

int64_t chainNoise(double depth, const NoiseModel& model) {
  auto levels = static_cast<int64_t>(std::floor(depth));
  int64_t noise = model.fresh + levels * (model.fresh + model.mul_cc + model.relinearize);
  if (depth - static_cast<double>(levels) > 0) noise += model.mul_cp;
  return noise;
}

ParamRow selectRowForNoise(int64_t noise, const BackendConfig& config) {
  for (const auto& row : config.parameters) {
    if (row.budget >= noise) return row;
  }
  throw CompileError(ErrorKind::kParams,
                     "noise " + std::to_string(noise) + " exceeds largest parameter set (" +
                         config.parameters.back().name + ", budget " +
                         std::to_string(config.parameters.back().budget) + ")");
}

SchemeParams selectParameters(double depth, const BackendConfig& config, int64_t slots,
                              uint64_t modulus) {
  if (depth < 0) throw CompileError(ErrorKind::kParams, "depth must be non-negative");
  int64_t noise = chainNoise(depth, config.noise);
  ParamRow row;
  try {
    row = selectRowForNoise(noise, config);
  } catch (const CompileError&) {
    std::ostringstream depthText;
    depthText << depth;
    throw CompileError(ErrorKind::kParams, "depth " + depthText.str() +
                                               " exceeds largest parameter set (worst-case noise " +
                                               std::to_string(noise) + ")");
  }
  return {row.name, slots, modulus, row.budget};
}

SchemeParams selectParameters(const CircuitFunction& c, const BackendConfig& config) {
  ParamRow row = selectRowForNoise(peakNoise(c, config.noise), config);
  return {row.name, c.slots, c.modulus, row.budget};
}

int64_t CostReport::additiveOps() const {
  return count(CircuitOpKind::kAddCC) + count(CircuitOpKind::kSubCC) +
         count(CircuitOpKind::kAddCP) + count(CircuitOpKind::kNegate);
}

CostReport estimateCost(const CircuitFunction& c, const BackendConfig& config,
                        const std::string& override_params) {
  CostReport r;
  for (CircuitOpKind k : kAllCircuitOpKinds) r.counts[k] = 0;
  for (const auto& op : c.ops) {
    ++r.counts[op.kind];
    if (op.kind != CircuitOpKind::kPtConst) ++r.total_ops;
    if (op.kind == CircuitOpKind::kMulCC && op.operands[0] == op.operands[1]) ++r.square_count;
    r.weighted_cost += config.weight(op.kind);
  }
  r.depth = circuitDepth(c);
  r.peak_noise = peakNoise(c, config.noise);
  try {
    if (override_params.empty()) {
      r.params = selectParameters(c, config);
    } else {
      const ParamRow& row = config.row(override_params);
      r.params = SchemeParams{row.name, c.slots, c.modulus, row.budget};
    }
  } catch (const CompileError& e) {
    r.params_error = e.message();
  }
  return r;
}

nlohmann::json toJson(const CostReport& r) {
  nlohmann::json j;
  j["counts"] = nlohmann::json::object();
  for (const auto& [kind, n] : r.counts) j["counts"][circuitOpKey(kind)] = n;
  j["total_ops"] = r.total_ops;
  j["square_count"] = r.square_count;
  j["depth"] = r.depth;
  j["weighted_cost"] = r.weighted_cost;
  j["peak_noise"] = r.peak_noise;
  if (r.params) {
    j["params"] = toJson(*r.params);
  } else {
    j["params"] = nullptr;
    j["params_error"] = r.params_error;
  }
  j["compile_ms"] = nlohmann::json::object();
  for (const auto& [pass, ms] : r.compile_ms) j["compile_ms"][pass] = ms;
  return j;
}

}  // namespace heco::backend
