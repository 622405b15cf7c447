#include "heco/ir/rewrites.h"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace heco::ir {

IrFunction eliminateDeadCode(const IrFunction& f) {
  DefUse du(f);
  std::vector<bool> live(f.idBound(), false);
  if (f.ret < live.size()) live[f.ret] = true;
  for (auto it = f.ops.rbegin(); it != f.ops.rend(); ++it) {
    if (!live[it->result]) continue;
    for (ValueId v : it->operands) live[v] = true;
  }
  Builder b = Builder::like(f);
  ValueMap map(f.idBound());
  for (const auto& p : f.params) map.set(p.id, b.addParam(p.type, p.name));
  for (const auto& op : f.ops) {
    if (live[op.result]) map.set(op.result, b.emitLike(op, map(op.operands)));
  }
  return b.finish(map[f.ret]);
}

namespace {

struct OpKey {
  OpKind kind;
  Dialect dialect;
  int64_t attr;
  std::vector<ValueId> operands;
  const std::vector<uint64_t>* values;

  bool operator==(const OpKey& o) const {
    return kind == o.kind && dialect == o.dialect && attr == o.attr && operands == o.operands &&
           *values == *o.values;
  }
};

struct OpKeyHash {
  size_t operator()(const OpKey& k) const {
    size_t h = std::hash<int>()(static_cast<int>(k.kind) * 2 + static_cast<int>(k.dialect));
    auto mix = [&h](uint64_t v) { h ^= std::hash<uint64_t>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(static_cast<uint64_t>(k.attr));
    for (ValueId v : k.operands) mix(v);
    for (uint64_t v : *k.values) mix(v);
    return h;
  }
};

}  // namespace

IrFunction cse(const IrFunction& f) {
  Builder b = Builder::like(f);
  ValueMap map(f.idBound());
  for (const auto& p : f.params) map.set(p.id, b.addParam(p.type, p.name));
  std::unordered_map<OpKey, ValueId, OpKeyHash> seen;
  for (const auto& op : f.ops) {
    OpKey key{op.kind, op.dialect, op.attr, map(op.operands), &op.values};
    auto it = seen.find(key);
    if (it != seen.end()) {
      map.set(op.result, it->second);
      continue;
    }
    ValueId v = b.emitLike(op, key.operands);
    map.set(op.result, v);
    seen.emplace(std::move(key), v);
  }
  return eliminateDeadCode(b.finish(map[f.ret]));
}

namespace {

// Compile-time value of a constant: a broadcast scalar or a full vector.
struct ConstValue {
  bool vector = false;
  std::vector<uint64_t> data;

  uint64_t at(size_t i) const { return vector ? data[i] : data[0]; }
  bool all(uint64_t v) const {
    return std::all_of(data.begin(), data.end(), [v](uint64_t x) { return x == v; });
  }
};

std::optional<ConstValue> constOf(const Builder& b, ValueId v) {
  const Op* op = b.def(v);
  if (op == nullptr) return std::nullopt;
  if (op->kind == OpKind::kConst) return ConstValue{false, {static_cast<uint64_t>(op->attr)}};
  if (op->kind == OpKind::kVConst) return ConstValue{true, op->values};
  return std::nullopt;
}

ValueId emitConst(Builder& b, const ConstValue& c) {
  if (c.vector) return b.vconst(c.data);
  return b.constant(static_cast<int64_t>(c.data[0]));
}

ConstValue combine(const Modulus& m, OpKind kind, const ConstValue& a, const ConstValue& c,
                   size_t slots) {
  ConstValue out;
  out.vector = a.vector || c.vector;
  size_t len = out.vector ? slots : 1;
  out.data.resize(len);
  for (size_t i = 0; i < len; ++i) {
    uint64_t x = a.at(i), y = c.at(i);
    out.data[i] = kind == OpKind::kAdd ? m.add(x, y) : kind == OpKind::kSub ? m.sub(x, y) : m.mul(x, y);
  }
  return out;
}

// Returns the folded replacement for `op` (already carrying new operand
// ids), or nullopt to emit it unchanged.
std::optional<ValueId> foldOp(Builder& b, const Op& op) {
  const Modulus m = b.mod();
  const auto slots = static_cast<size_t>(b.slots());
  const auto& operands = op.operands;

  switch (op.kind) {
    case OpKind::kExtract: {
      auto c = constOf(b, operands[0]);
      if (c) return b.constant(static_cast<int64_t>(c->at(static_cast<size_t>(op.attr))));
      return std::nullopt;
    }
    case OpKind::kInsert: {
      auto s = constOf(b, operands[0]);
      auto v = constOf(b, operands[1]);
      if (!s || !v || s->vector || !v->vector) return std::nullopt;
      ConstValue out = *v;
      out.data[static_cast<size_t>(op.attr)] = s->data[0];
      return emitConst(b, out);
    }
    case OpKind::kRotate: {
      if (op.attr == 0) return operands[0];
      auto c = constOf(b, operands[0]);
      if (!c) return std::nullopt;
      if (!c->vector) return operands[0];
      ConstValue out{true, std::vector<uint64_t>(slots)};
      for (size_t j = 0; j < slots; ++j) out.data[j] = c->data[(j + static_cast<size_t>(op.attr)) % slots];
      return emitConst(b, out);
    }
    case OpKind::kSub: {
      auto x = constOf(b, operands[0]);
      auto y = constOf(b, operands[1]);
      if (x && y) return emitConst(b, combine(m, OpKind::kSub, *x, *y, slots));
      if (y && y->all(0)) return operands[0];
      if (operands[0] == operands[1]) return b.constant(0);
      return std::nullopt;
    }
    case OpKind::kAdd:
    case OpKind::kMul: {
      const uint64_t identity = op.kind == OpKind::kAdd ? 0 : 1;
      std::vector<ValueId> rest;
      std::optional<ConstValue> folded;
      size_t constCount = 0;
      for (ValueId v : operands) {
        auto c = constOf(b, v);
        if (!c) {
          rest.push_back(v);
          continue;
        }
        if (op.kind == OpKind::kMul && c->all(0)) return v;
        ++constCount;
        folded = folded ? combine(m, op.kind, *folded, *c, slots) : *c;
      }
      if (rest.empty()) return emitConst(b, *folded);
      bool changed = constCount > 1;
      if (folded && folded->all(identity)) {
        folded.reset();
        changed = true;
      }
      if (!changed) return std::nullopt;
      if (folded) {
        if (op.kind == OpKind::kMul && folded->all(0)) return emitConst(b, *folded);
        rest.push_back(emitConst(b, *folded));
      }
      if (rest.size() == 1) return rest.front();
      return b.arith(op.kind, op.dialect, std::move(rest));
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

IrFunction constantFold(const IrFunction& f) {
  Builder b = Builder::like(f);
  ValueMap map(f.idBound());
  for (const auto& p : f.params) map.set(p.id, b.addParam(p.type, p.name));
  for (const auto& op : f.ops) {
    Op mapped = op;
    mapped.operands = map(op.operands);
    if (auto folded = foldOp(b, mapped)) {
      map.set(op.result, *folded);
    } else {
      map.set(op.result, b.emitLike(op, std::move(mapped.operands)));
    }
  }
  return eliminateDeadCode(b.finish(map[f.ret]));
}

void sortOperands(const Builder& b, std::vector<ValueId>& operands) {
  std::stable_sort(operands.begin(), operands.end(), [&b](ValueId x, ValueId y) {
    const Op* dx = b.def(x);
    const Op* dy = b.def(y);
    bool cx = dx != nullptr && (dx->kind == OpKind::kConst || dx->kind == OpKind::kVConst);
    bool cy = dy != nullptr && (dy->kind == OpKind::kConst || dy->kind == OpKind::kVConst);
    if (cx != cy) return cy;
    return x < y;
  });
}

IrFunction canonicalize(const IrFunction& f) {
  Builder b = Builder::like(f);
  ValueMap map(f.idBound());
  const Modulus m = f.mod();
  for (const auto& p : f.params) map.set(p.id, b.addParam(p.type, p.name));
  for (const auto& op : f.ops) {
    std::vector<ValueId> operands = map(op.operands);
    ValueId result;
    if (isCommutative(op.kind)) {
      sortOperands(b, operands);
      result = b.emitLike(op, std::move(operands));
    } else if (op.kind == OpKind::kRotate) {
      int64_t offset = op.attr;
      ValueId source = operands[0];
      if (const Op* inner = b.def(source); inner != nullptr && inner->kind == OpKind::kRotate) {
        offset += inner->attr;
        source = inner->operands[0];
      }
      offset = floorMod(offset, f.slots);
      result = offset == 0 ? source : b.rotate(source, offset);
    } else if (op.kind == OpKind::kSub && b.def(operands[1]) != nullptr &&
               (b.def(operands[1])->kind == OpKind::kConst ||
                b.def(operands[1])->kind == OpKind::kVConst)) {
      const Op* c = b.def(operands[1]);
      ValueId negated;
      if (c->kind == OpKind::kConst) {
        negated = b.constant(static_cast<int64_t>(m.neg(static_cast<uint64_t>(c->attr))));
      } else {
        std::vector<uint64_t> values = c->values;
        for (auto& v : values) v = m.neg(v);
        negated = b.vconst(std::move(values));
      }
      result = b.arith(OpKind::kAdd, op.dialect, {operands[0], negated});
    } else if (op.kind == OpKind::kInsert) {
      // A write hides an earlier write to the same slot directly below it.
      ValueId vector = operands[1];
      while (const Op* inner = b.def(vector)) {
        if (inner->kind != OpKind::kInsert || inner->attr != op.attr) break;
        vector = inner->operands[1];
      }
      result = b.insert(operands[0], vector, op.attr);
    } else {
      result = b.emitLike(op, std::move(operands));
    }
    map.set(op.result, result);
  }
  return eliminateDeadCode(b.finish(map[f.ret]));
}

}  // namespace heco::ir
