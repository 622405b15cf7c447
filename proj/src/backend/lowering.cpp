#include "heco/backend/lowering.h"

#include <algorithm>
#include <map>

namespace heco::backend {

using ir::OpKind;
using ir::ValueId;

namespace {

// A lowered value: a ciphertext id or a compile-time plaintext (one value
// broadcast to every slot, or one value per slot).
struct CValue {
  bool plain = false;
  CircuitId ct = 0;
  std::vector<uint64_t> pt;

  static CValue cipher(CircuitId id) { return {false, id, {}}; }
  static CValue plaintext(std::vector<uint64_t> values) { return {true, 0, std::move(values)}; }
  uint64_t at(size_t i) const { return pt.size() == 1 ? pt[0] : pt[i]; }
  bool all(uint64_t v) const {
    return std::all_of(pt.begin(), pt.end(), [v](uint64_t x) { return x == v; });
  }
};

class CircuitBuilder {
 public:
  CircuitBuilder(const ir::IrFunction& f, int64_t slots, bool per_element) : m_{f.modulus} {
    c_.name = f.name;
    c_.slots = slots;
    c_.modulus = f.modulus;
    c_.result_shape = f.result_shape;
    c_.per_element = per_element;
  }

  CircuitId input(const std::string& param, int64_t element) {
    if (!c_.ops.empty()) throw CompileError(ErrorKind::kPipeline, "inputs must precede ops");
    auto id = static_cast<CircuitId>(c_.inputs.size());
    c_.inputs.push_back({id, param, element});
    return id;
  }

  CircuitId op(CircuitOpKind kind, std::vector<CircuitId> operands, int64_t rotation = 0) {
    CircuitOp o;
    o.kind = kind;
    o.id = c_.idBound();
    o.operands = std::move(operands);
    o.rotation = rotation;
    c_.ops.push_back(std::move(o));
    return c_.ops.back().id;
  }

  CircuitId ptConst(const std::vector<uint64_t>& values) {
    std::vector<uint64_t> key = values;
    if (std::all_of(key.begin(), key.end(), [&](uint64_t x) { return x == key[0]; })) key.resize(1);
    auto it = pt_cache_.find(key);
    if (it != pt_cache_.end()) return it->second;
    CircuitOp o;
    o.kind = CircuitOpKind::kPtConst;
    o.id = c_.idBound();
    o.plaintext = key;
    c_.ops.push_back(std::move(o));
    pt_cache_[key] = c_.ops.back().id;
    return c_.ops.back().id;
  }

  size_t width(const CValue& a, const CValue& b) const {
    return a.pt.size() == 1 && b.pt.size() == 1 ? 1 : static_cast<size_t>(c_.slots);
  }

  CValue combinePlain(OpKind kind, const CValue& a, const CValue& b) const {
    size_t n = width(a, b);
    std::vector<uint64_t> out(n);
    for (size_t i = 0; i < n; ++i) {
      out[i] = kind == OpKind::kAdd   ? m_.add(a.at(i), b.at(i))
               : kind == OpKind::kSub ? m_.sub(a.at(i), b.at(i))
                                      : m_.mul(a.at(i), b.at(i));
    }
    return CValue::plaintext(std::move(out));
  }

  CValue negatePlain(const CValue& a) const {
    std::vector<uint64_t> out = a.pt;
    for (auto& v : out) v = m_.neg(v);
    return CValue::plaintext(std::move(out));
  }

  // Balanced reduction; pairs neighbours level by level so k operands take
  // ceil(log2 k) levels.
  CircuitId tree(CircuitOpKind kind, std::vector<CircuitId> cts) {
    while (cts.size() > 1) {
      std::vector<CircuitId> next;
      for (size_t i = 0; i + 1 < cts.size(); i += 2) next.push_back(op(kind, {cts[i], cts[i + 1]}));
      if (cts.size() % 2 == 1) next.push_back(cts.back());
      cts = std::move(next);
    }
    return cts.front();
  }

  CValue nary(OpKind kind, const std::vector<CValue>& operands) {
    std::vector<CircuitId> cts;
    std::optional<CValue> plain;
    for (const auto& v : operands) {
      if (v.plain) {
        plain = plain ? combinePlain(kind, *plain, v) : v;
      } else {
        cts.push_back(v.ct);
      }
    }
    if (cts.empty()) return *plain;
    if (kind == OpKind::kMul && plain && plain->all(0)) return *plain;
    CircuitId acc = tree(kind == OpKind::kAdd ? CircuitOpKind::kAddCC : CircuitOpKind::kMulCC, cts);
    if (plain && !plain->all(kind == OpKind::kAdd ? 0 : 1)) {
      acc = op(kind == OpKind::kAdd ? CircuitOpKind::kAddCP : CircuitOpKind::kMulCP,
               {acc, ptConst(plain->pt)});
    }
    return CValue::cipher(acc);
  }

  CValue sub(const CValue& a, const CValue& b) {
    if (a.plain && b.plain) return combinePlain(OpKind::kSub, a, b);
    if (!a.plain && !b.plain) return CValue::cipher(op(CircuitOpKind::kSubCC, {a.ct, b.ct}));
    if (!a.plain) {
      if (b.all(0)) return a;
      return CValue::cipher(op(CircuitOpKind::kAddCP, {a.ct, ptConst(negatePlain(b).pt)}));
    }
    CircuitId negated = op(CircuitOpKind::kNegate, {b.ct});
    if (a.all(0)) return CValue::cipher(negated);
    return CValue::cipher(op(CircuitOpKind::kAddCP, {negated, ptConst(a.pt)}));
  }

  CValue arith(OpKind kind, const std::vector<CValue>& operands) {
    if (kind == OpKind::kSub) return sub(operands[0], operands[1]);
    return nary(kind, operands);
  }

  CValue rotate(const CValue& v, int64_t amount) {
    if (amount == 0) return v;
    if (!v.plain) return CValue::cipher(op(CircuitOpKind::kRotate, {v.ct}, amount));
    if (v.pt.size() == 1) return v;
    auto n = static_cast<size_t>(c_.slots);
    std::vector<uint64_t> out(n);
    for (size_t j = 0; j < n; ++j) out[j] = v.pt[(j + static_cast<size_t>(amount)) % n];
    return CValue::plaintext(std::move(out));
  }

  CircuitId output(const CValue& v) { return v.plain ? ptConst(v.pt) : v.ct; }

  CircuitFunction finish(std::vector<CircuitId> outputs) {
    c_.outputs = std::move(outputs);
    return std::move(c_);
  }

 private:
  Modulus m_;
  CircuitFunction c_;
  std::map<std::vector<uint64_t>, CircuitId> pt_cache_;
};

CValue constantOf(const ir::Op& op) {
  if (op.kind == OpKind::kConst) return CValue::plaintext({static_cast<uint64_t>(op.attr)});
  return CValue::plaintext(op.values);
}

}  // namespace

CircuitFunction lowerToCircuit(const ir::IrFunction& f) {
  CircuitBuilder b(f, f.slots, /*per_element=*/false);
  std::vector<CValue> values(f.idBound());
  for (const auto& p : f.params) values[p.id] = CValue::cipher(b.input(p.name, -1));
  for (const auto& op : f.ops) {
    if (op.dialect == ir::Dialect::kHl) {
      throw CompileError(ErrorKind::kPipeline,
                         std::string("circuit lowering requires bsf-only IR, found hl.") +
                             ir::opKindName(op.kind));
    }
    switch (op.kind) {
      case OpKind::kConst:
      case OpKind::kVConst:
        values[op.result] = constantOf(op);
        break;
      case OpKind::kRotate:
        values[op.result] = b.rotate(values[op.operands[0]], op.attr);
        break;
      default: {
        std::vector<CValue> operands;
        for (ValueId v : op.operands) operands.push_back(values[v]);
        values[op.result] = b.arith(op.kind, operands);
        break;
      }
    }
  }
  return b.finish({b.output(values[f.ret])});
}

CircuitFunction lowerNaive(const ir::IrFunction& f) {
  CircuitBuilder b(f, /*slots=*/1, /*per_element=*/true);
  const auto n = static_cast<size_t>(f.slots);
  // Scalars use element 0 only; vectors one entry per element.
  std::vector<std::vector<CValue>> values(f.idBound());
  for (const auto& p : f.params) {
    if (p.type == ir::Type::kSecretScalar) {
      values[p.id] = {CValue::cipher(b.input(p.name, -1))};
    } else {
      for (size_t i = 0; i < n; ++i) {
        values[p.id].push_back(CValue::cipher(b.input(p.name, static_cast<int64_t>(i))));
      }
    }
  }
  for (const auto& op : f.ops) {
    switch (op.kind) {
      case OpKind::kConst:
        values[op.result] = {CValue::plaintext({static_cast<uint64_t>(op.attr)})};
        break;
      case OpKind::kVConst:
        for (uint64_t v : op.values) values[op.result].push_back(CValue::plaintext({v}));
        break;
      case OpKind::kExtract:
        values[op.result] = {values[op.operands[0]].at(static_cast<size_t>(op.attr))};
        break;
      case OpKind::kInsert:
        values[op.result] = values[op.operands[1]];
        values[op.result].at(static_cast<size_t>(op.attr)) = values[op.operands[0]][0];
        break;
      case OpKind::kAdd:
      case OpKind::kSub:
      case OpKind::kMul: {
        if (op.dialect != ir::Dialect::kHl) {
          throw CompileError(ErrorKind::kPipeline, "naive lowering requires high-level IR");
        }
        std::vector<CValue> operands;
        for (ValueId v : op.operands) operands.push_back(values[v][0]);
        values[op.result] = {b.arith(op.kind, operands)};
        break;
      }
      case OpKind::kRotate:
        throw CompileError(ErrorKind::kPipeline, "naive lowering requires high-level IR");
    }
  }
  std::vector<CircuitId> outputs;
  if (f.result_shape == Shape::kScalar) {
    outputs.push_back(b.output(values[f.ret][0]));
  } else {
    for (const auto& v : values[f.ret]) outputs.push_back(b.output(v));
  }
  return b.finish(std::move(outputs));
}

CircuitFunction insertRelinearization(const CircuitFunction& c, RelinPolicy policy) {
  if (policy == RelinPolicy::kNone) return c;
  CircuitFunction out = c;
  out.ops.clear();
  std::vector<CircuitId> remap(c.idBound());
  for (CircuitId i = 0; i < c.inputs.size(); ++i) remap[i] = i;
  for (const auto& op : c.ops) {
    CircuitOp copy = op;
    copy.id = out.idBound();
    for (auto& v : copy.operands) v = remap[v];
    out.ops.push_back(copy);
    CircuitId result = copy.id;
    if (op.kind == CircuitOpKind::kMulCC) {
      CircuitOp relin;
      relin.kind = CircuitOpKind::kRelinearize;
      relin.id = out.idBound();
      relin.operands = {result};
      out.ops.push_back(relin);
      result = relin.id;
    }
    remap[op.id] = result;
  }
  for (auto& v : out.outputs) v = remap[v];
  return out;
}

}  // namespace heco::backend
