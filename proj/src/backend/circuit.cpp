#include "heco/backend/circuit.h"

namespace heco::backend {

const char* circuitOpKey(CircuitOpKind kind) {
  switch (kind) {
    case CircuitOpKind::kAddCC: return "add_cc";
    case CircuitOpKind::kSubCC: return "sub_cc";
    case CircuitOpKind::kMulCC: return "mul_cc";
    case CircuitOpKind::kAddCP: return "add_cp";
    case CircuitOpKind::kMulCP: return "mul_cp";
    case CircuitOpKind::kRotate: return "rotate";
    case CircuitOpKind::kRelinearize: return "relinearize";
    case CircuitOpKind::kNegate: return "negate";
    case CircuitOpKind::kPtConst: return "pt_const";
  }
  return "?";
}

std::optional<CircuitOpKind> parseCircuitOpKey(std::string_view key) {
  for (CircuitOpKind k : kAllCircuitOpKinds) {
    if (key == circuitOpKey(k)) return k;
  }
  return std::nullopt;
}

const CircuitOp* CircuitFunction::def(CircuitId id) const {
  if (id < inputs.size() || id >= idBound()) return nullptr;
  return &ops[id - inputs.size()];
}

bool CircuitFunction::isPlaintext(CircuitId id) const {
  const CircuitOp* op = def(id);
  return op != nullptr && op->kind == CircuitOpKind::kPtConst;
}

nlohmann::json circuitToJson(const CircuitFunction& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["slots"] = c.slots;
  j["modulus"] = c.modulus;
  j["result_shape"] = c.result_shape == Shape::kScalar ? "scalar" : "vector";
  j["per_element"] = c.per_element;
  j["inputs"] = nlohmann::json::array();
  for (const auto& in : c.inputs) {
    nlohmann::json e = {{"id", in.id}, {"param", in.param}};
    if (in.element >= 0) e["element"] = in.element;
    j["inputs"].push_back(e);
  }
  j["ops"] = nlohmann::json::array();
  for (const auto& op : c.ops) {
    nlohmann::json e = {{"id", op.id}, {"kind", circuitOpKey(op.kind)}, {"operands", op.operands}};
    if (op.kind == CircuitOpKind::kRotate) e["rotation"] = op.rotation;
    if (op.kind == CircuitOpKind::kPtConst) e["plaintext"] = op.plaintext;
    j["ops"].push_back(e);
  }
  j["outputs"] = c.outputs;
  return j;
}

std::vector<std::string> verifyCircuit(const CircuitFunction& c) {
  std::vector<std::string> out;
  for (size_t i = 0; i < c.inputs.size(); ++i) {
    if (c.inputs[i].id != i) out.push_back("input ids must be dense");
  }
  for (size_t i = 0; i < c.ops.size(); ++i) {
    const CircuitOp& op = c.ops[i];
    std::string where = "op " + std::to_string(op.id) + " (" + circuitOpKey(op.kind) + ")";
    if (op.id != c.inputs.size() + i) out.push_back(where + ": ids must be dense");
    size_t arity = 0;
    switch (op.kind) {
      case CircuitOpKind::kPtConst: arity = 0; break;
      case CircuitOpKind::kRotate:
      case CircuitOpKind::kRelinearize:
      case CircuitOpKind::kNegate: arity = 1; break;
      default: arity = 2; break;
    }
    if (op.operands.size() != arity) {
      out.push_back(where + ": wrong operand count");
      continue;
    }
    for (size_t k = 0; k < op.operands.size(); ++k) {
      CircuitId v = op.operands[k];
      if (v >= op.id) {
        out.push_back(where + ": operand " + std::to_string(v) + " not defined before use");
        continue;
      }
      bool wantPlain = k == 1 && (op.kind == CircuitOpKind::kAddCP || op.kind == CircuitOpKind::kMulCP);
      if (c.isPlaintext(v) != wantPlain) {
        out.push_back(where + (wantPlain ? ": expected a plaintext operand" : ": expected a ciphertext operand"));
      }
    }
    if (op.kind == CircuitOpKind::kRotate && (op.rotation < 1 || op.rotation >= c.slots)) {
      out.push_back(where + ": rotation amount out of [1, n)");
    }
    if (op.kind == CircuitOpKind::kPtConst && op.plaintext.size() != 1 &&
        static_cast<int64_t>(op.plaintext.size()) != c.slots) {
      out.push_back(where + ": plaintext length mismatch");
    }
  }
  for (CircuitId v : c.outputs) {
    if (v >= c.idBound()) out.push_back("output " + std::to_string(v) + " undefined");
  }
  return out;
}

}  // namespace heco::backend
