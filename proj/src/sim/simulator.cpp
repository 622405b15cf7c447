#include "heco/sim/simulator.h"

#include <algorithm>
#include <sstream>

namespace heco::sim {

using backend::CircuitId;
using backend::CircuitOpKind;

NoiseBudgetExceeded::NoiseBudgetExceeded(int64_t noise, int64_t budget)
    : std::runtime_error("noise budget exceeded: noise " + std::to_string(noise) +
                         " > budget " + std::to_string(budget)),
      noise_(noise),
      budget_(budget) {}

SimCiphertext encryptSim(const PlainValue& v, int64_t slots, const backend::NoiseModel& noise) {
  if (static_cast<int64_t>(v.data.size()) > slots) {
    throw CompileError(ErrorKind::kInput, "cannot encrypt " + std::to_string(v.data.size()) +
                                              " values into " + std::to_string(slots) + " slots");
  }
  SimCiphertext ct;
  ct.slots.assign(static_cast<size_t>(slots), 0);
  std::copy(v.data.begin(), v.data.end(), ct.slots.begin());
  ct.noise = noise.fresh;
  ct.relinearized = true;
  return ct;
}

PlainValue decryptSim(const SimCiphertext& ct, int64_t budget, Shape shape) {
  if (ct.noise > budget) throw NoiseBudgetExceeded(ct.noise, budget);
  if (shape == Shape::kScalar) return PlainValue::scalar(ct.slots.at(0));
  return PlainValue::vector(ct.slots);
}

namespace {

std::string formatSlots(const std::vector<uint64_t>& slots, bool full) {
  std::ostringstream out;
  out << '[';
  size_t shown = full || slots.size() <= 16 ? slots.size() : 16;
  for (size_t i = 0; i < shown; ++i) out << (i ? ", " : "") << slots[i];
  if (shown < slots.size()) out << ", ... (" << slots.size() << " slots)";
  out << ']';
  return out.str();
}

}  // namespace

ExecutionTrace execCircuit(const backend::CircuitFunction& c, const NamedValues& inputs,
                           const backend::NoiseModel& noise, int64_t budget,
                           const TraceOptions& options) {
  const Modulus m{c.modulus};
  const auto n = static_cast<size_t>(c.slots);
  std::vector<SimCiphertext> values(c.idBound());
  ExecutionTrace trace;
  auto record = [&](CircuitId id, const char* kind) {
    const SimCiphertext& v = values[id];
    trace.peak_noise = std::max(trace.peak_noise, v.noise);
    if (options.record) {
      trace.lines.push_back("%" + std::to_string(id) + " " + kind +
                            " noise=" + std::to_string(v.noise) +
                            " slots=" + formatSlots(v.slots, options.full));
    }
  };

  for (const auto& in : c.inputs) {
    auto it = inputs.find(in.param);
    if (it == inputs.end()) throw CompileError(ErrorKind::kInput, "missing input '" + in.param + "'");
    PlainValue v = it->second;
    for (auto& x : v.data) x = m.reduce(static_cast<int64_t>(x));
    if (in.element >= 0) {
      if (static_cast<size_t>(in.element) >= v.data.size()) {
        throw CompileError(ErrorKind::kInput, "input '" + in.param + "' has no element " +
                                                  std::to_string(in.element));
      }
      v = PlainValue::scalar(v.data[static_cast<size_t>(in.element)]);
    }
    values[in.id] = encryptSim(v, c.slots, noise);
    record(in.id, "input");
  }

  for (const auto& op : c.ops) {
    SimCiphertext r;
    const auto& o = op.operands;
    auto zip = [&](const SimCiphertext& a, const SimCiphertext& b, auto fn) {
      std::vector<uint64_t> out(n);
      for (size_t j = 0; j < n; ++j) out[j] = fn(a.slots[j], b.slots[j]);
      return out;
    };
    auto add = [&m](uint64_t a, uint64_t b) { return m.add(a, b); };
    auto mul = [&m](uint64_t a, uint64_t b) { return m.mul(a, b); };
    switch (op.kind) {
      case CircuitOpKind::kPtConst:
        r.slots = op.plaintext.size() == 1 ? std::vector<uint64_t>(n, op.plaintext[0]) : op.plaintext;
        r.noise = 0;
        break;
      case CircuitOpKind::kAddCC:
        r.slots = zip(values[o[0]], values[o[1]], add);
        r.noise = std::max(values[o[0]].noise, values[o[1]].noise) + noise.add_cc;
        break;
      case CircuitOpKind::kSubCC:
        r.slots = zip(values[o[0]], values[o[1]], [&m](uint64_t a, uint64_t b) { return m.sub(a, b); });
        r.noise = std::max(values[o[0]].noise, values[o[1]].noise) + noise.add_cc;
        break;
      case CircuitOpKind::kMulCC:
        r.slots = zip(values[o[0]], values[o[1]], mul);
        r.noise = values[o[0]].noise + values[o[1]].noise + noise.mul_cc;
        r.relinearized = false;
        break;
      case CircuitOpKind::kAddCP:
        r.slots = zip(values[o[0]], values[o[1]], add);
        r.noise = values[o[0]].noise + noise.add_cp;
        r.relinearized = values[o[0]].relinearized;
        break;
      case CircuitOpKind::kMulCP:
        r.slots = zip(values[o[0]], values[o[1]], mul);
        r.noise = values[o[0]].noise + noise.mul_cp;
        r.relinearized = values[o[0]].relinearized;
        break;
      case CircuitOpKind::kRotate: {
        const auto& v = values[o[0]].slots;
        r.slots.resize(n);
        auto k = static_cast<size_t>(floorMod(op.rotation, c.slots));
        for (size_t j = 0; j < n; ++j) r.slots[j] = v[(j + k) % n];
        r.noise = values[o[0]].noise + noise.rotate;
        r.relinearized = values[o[0]].relinearized;
        break;
      }
      case CircuitOpKind::kRelinearize:
        r.slots = values[o[0]].slots;
        r.noise = values[o[0]].noise + noise.relinearize;
        r.relinearized = true;
        break;
      case CircuitOpKind::kNegate:
        r.slots = values[o[0]].slots;
        for (auto& x : r.slots) x = m.neg(x);
        r.noise = values[o[0]].noise + noise.negate;
        r.relinearized = values[o[0]].relinearized;
        break;
    }
    values[op.id] = std::move(r);
    record(op.id, backend::circuitOpKey(op.kind));
  }

  for (CircuitId out : c.outputs) trace.outputs.push_back(values[out]);
  trace.decrypt_ok = trace.peak_noise <= budget;
  return trace;
}

PlainValue decryptOutputs(const backend::CircuitFunction& c, const ExecutionTrace& trace,
                          int64_t budget) {
  if (trace.peak_noise > budget) throw NoiseBudgetExceeded(trace.peak_noise, budget);
  if (!c.per_element) return decryptSim(trace.outputs.at(0), budget, c.result_shape);
  if (c.result_shape == Shape::kScalar) return decryptSim(trace.outputs.at(0), budget, Shape::kScalar);
  PlainValue out;
  out.shape = Shape::kVector;
  for (const auto& ct : trace.outputs) out.data.push_back(decryptSim(ct, budget, Shape::kScalar).data[0]);
  return out;
}

PlainValue runCircuit(const backend::CircuitFunction& c, const NamedValues& inputs,
                      const backend::NoiseModel& noise, int64_t budget) {
  return decryptOutputs(c, execCircuit(c, inputs, noise, budget), budget);
}

}  // namespace heco::sim
