#include "heco/passes/batching.h"

#include <algorithm>
#include <map>
#include <set>

#include "heco/ir/rewrites.h"
#include "heco/passes/anchors.h"

namespace heco::passes {

using ir::Builder;
using ir::Dialect;
using ir::Op;
using ir::OpKind;
using ir::Stage;
using ir::Type;
using ir::ValueId;

namespace {

// rotate(v, k), or v itself when k is 0 mod n.
ValueId rotateBy(Builder& b, ValueId v, int64_t k) {
  k = floorMod(k, b.slots());
  return k == 0 ? v : b.rotate(v, k);
}

ir::Type batchedParamType(Type t) { return t == Type::kSecretVector ? Type::kBatchedSecret : t; }

// A value that lives at one slot of a (new) vector.
struct SlotRef {
  ValueId vector = ir::kNoValue;
  int64_t slot = 0;
};

}  // namespace

ir::IrFunction simdify(const ir::IrFunction& f, const SimdifyOptions& options,
                       SimdifyStats* stats) {
  SimdifyStats local;
  SimdifyStats& st = stats != nullptr ? *stats : local;
  auto anchors = computeAnchors(f);
  Builder b(f.name, f.modulus, f.slots, Stage::kBatched, f.result_shape);
  ir::ValueMap map(f.idBound());
  std::vector<std::optional<SlotRef>> slotOf(f.idBound());
  std::vector<ValueId> scalarOf(f.idBound(), ir::kNoValue);
  std::vector<bool> isSimdResult(f.idBound(), false);
  std::vector<bool> vectorUse(f.idBound(), false);
  for (const auto& p : f.params) map.set(p.id, b.addParam(batchedParamType(p.type), p.name));

  auto scalar = [&](ValueId v) {
    if (!slotOf[v]) return map[v];
    if (scalarOf[v] == ir::kNoValue) {
      scalarOf[v] = b.extract(slotOf[v]->vector, slotOf[v]->slot);
      if (isSimdResult[v]) ++st.scalar_extracts;
    }
    return scalarOf[v];
  };
  auto aligned = [&](ValueId v, int64_t target) {
    if (!slotOf[v] && b.type(map[v]) == Type::kPlainScalar) return map[v];
    ValueId source = slotOf[v] ? slotOf[v]->vector : map[v];
    int64_t slot = slotOf[v] ? slotOf[v]->slot : 0;
    int64_t k = options.flip_rotation_sign ? target - slot : slot - target;
    if (floorMod(k, f.slots) != 0) ++st.alignment_rotations;
    if (isSimdResult[v]) vectorUse[v] = true;
    return rotateBy(b, source, k);
  };

  for (size_t k = 0; k < f.ops.size(); ++k) {
    const Op& op = f.ops[k];
    if (op.kind == OpKind::kExtract) {
      slotOf[op.result] = SlotRef{map[op.operands[0]], op.attr};
      continue;
    }
    if (op.kind == OpKind::kInsert) {
      map.set(op.result, b.insert(scalar(op.operands[0]), map[op.operands[1]], op.attr));
      continue;
    }
    if (op.dialect == Dialect::kHl && ir::isArith(op.kind)) {
      int64_t target = 0;
      if (anchors[k]) {
        target = anchors[k]->slot;
      } else {
        for (ValueId v : op.operands) {
          if (slotOf[v]) {
            target = slotOf[v]->slot;
            break;
          }
        }
      }
      std::vector<ValueId> operands;
      for (ValueId v : op.operands) operands.push_back(aligned(v, target));
      slotOf[op.result] = SlotRef{b.arith(op.kind, Dialect::kBsf, std::move(operands)), target};
      isSimdResult[op.result] = true;
      ++st.translated_ops;
      continue;
    }
    std::vector<ValueId> operands;
    for (ValueId v : op.operands) operands.push_back(scalar(v));
    map.set(op.result, b.emitLike(op, std::move(operands)));
  }
  ValueId ret = scalar(f.ret);
  for (ValueId v = 0; v < vectorUse.size(); ++v) {
    if (vectorUse[v] && scalarOf[v] != ir::kNoValue) ++st.dual_use;
  }
  return ir::eliminateDeadCode(b.finish(ret));
}

namespace {

// Follows inserts and rotations below an extract. Returns the replacement
// value, emitting at most one new op.
ValueId forwardSlot(Builder& b, ValueId vector, int64_t slot) {
  const int64_t n = b.slots();
  ValueId v = vector;
  while (const Op* d = b.def(v)) {
    if (d->kind == OpKind::kInsert) {
      if (d->attr == slot) return d->operands[0];
      v = d->operands[1];
    } else if (d->kind == OpKind::kRotate) {
      slot = floorMod(slot + d->attr, n);
      v = d->operands[0];
    } else if (d->kind == OpKind::kVConst) {
      return b.constant(static_cast<int64_t>(d->values[static_cast<size_t>(slot)]));
    } else {
      break;
    }
  }
  if (ir::isScalarType(b.type(v))) return slot == 0 ? v : b.constant(0);
  return b.extract(v, slot);
}

// Per emitted insert: whether every write so far reads extract(w, slot + c)
// for one (w, c), and how many inserts the chain has.
struct ChainInfo {
  bool consistent = false;
  ValueId source = ir::kNoValue;
  int64_t offset = 0;
  int64_t length = 0;
};

std::optional<std::pair<ValueId, int64_t>> extractPattern(const Builder& b, ValueId scalar,
                                                           int64_t slot) {
  const Op* d = b.def(scalar);
  if (d == nullptr || d->kind != OpKind::kExtract) return std::nullopt;
  return std::make_pair(d->operands[0], floorMod(d->attr - slot, b.slots()));
}

}  // namespace

ir::IrFunction batchingRewrites(const ir::IrFunction& f) {
  Builder b = Builder::like(f);
  ir::ValueMap map(f.idBound());
  std::map<ValueId, ChainInfo> chains;
  const int64_t n = f.slots;
  for (const auto& p : f.params) map.set(p.id, b.addParam(p.type, p.name));
  for (const auto& op : f.ops) {
    std::vector<ValueId> operands = map(op.operands);
    if (op.kind == OpKind::kExtract) {
      map.set(op.result, forwardSlot(b, operands[0], op.attr));
      continue;
    }
    if (op.kind != OpKind::kInsert) {
      map.set(op.result, b.emitLike(op, std::move(operands)));
      continue;
    }
    ValueId inserted = b.insert(operands[0], operands[1], op.attr);
    ChainInfo info;
    auto pattern = extractPattern(b, operands[0], op.attr);
    auto below = chains.find(operands[1]);
    if (pattern) {
      info = {true, pattern->first, pattern->second, 1};
      if (below != chains.end()) {
        const ChainInfo& prev = below->second;
        info.consistent = prev.consistent && prev.source == info.source && prev.offset == info.offset;
        info.length = prev.length + 1;
      }
    } else if (below != chains.end()) {
      info.length = below->second.length + 1;
    }
    chains[inserted] = info;
    map.set(op.result, inserted);
    if (!info.consistent || info.length < n) continue;
    // Confirm every slot is written, reading the chain from the top.
    std::vector<bool> seen(static_cast<size_t>(n), false);
    int64_t covered = 0;
    ValueId v = inserted;
    while (covered < n) {
      const Op* d = b.def(v);
      if (d == nullptr || d->kind != OpKind::kInsert) break;
      if (!seen[static_cast<size_t>(d->attr)]) {
        seen[static_cast<size_t>(d->attr)] = true;
        ++covered;
      }
      v = d->operands[1];
    }
    if (covered == n) map.set(op.result, rotateBy(b, info.source, info.offset));
  }
  return ir::eliminateDeadCode(b.finish(map[f.ret]));
}

ir::IrFunction cleanup(const ir::IrFunction& f) {
  ir::IrFunction current = f;
  for (int round = 0; round < 64; ++round) {
    ir::IrFunction next = ir::canonicalize(current);
    next = ir::cse(next);
    next = ir::constantFold(next);
    next = batchingRewrites(next);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::optional<Progression> findProgression(const std::vector<int64_t>& offsets, int64_t n) {
  const auto m = static_cast<int64_t>(offsets.size());
  if (m < 2) return std::nullopt;
  for (int64_t stride = 1; stride * m <= n; stride *= 2) {
    if (n % stride != 0) break;
    int64_t residue = floorMod(offsets[0], stride);
    int64_t length = n / stride;
    std::set<int64_t> ks;
    bool ok = true;
    for (int64_t d : offsets) {
      if (floorMod(d, stride) != residue) ok = false;
      ks.insert(floorMod(d - residue, n) / stride);
    }
    if (!ok || static_cast<int64_t>(ks.size()) != m) continue;
    std::optional<int64_t> first;
    if (m == length) {
      first = 0;
    } else {
      for (int64_t k : ks) {
        if (ks.count(floorMod(k - 1, length)) == 0) {
          first = k;
          break;
        }
      }
    }
    if (!first) continue;
    Progression p{residue + *first * stride, stride, {}};
    for (int64_t i = 0; i < m; ++i) {
      int64_t k = floorMod(*first + i, length);
      if (ks.count(k) == 0) {
        ok = false;
        break;
      }
      p.ordered.push_back(residue + k * stride);
    }
    if (ok) return p;
  }
  return std::nullopt;
}

namespace {

struct FoldOperand {
  ValueId operand;  // the operand as it appears in the op
  ValueId source;
  int64_t offset;
};

}  // namespace

ir::IrFunction lowerFolds(const ir::IrFunction& f) {
  Builder b = Builder::like(f);
  ir::ValueMap map(f.idBound());
  const int64_t n = f.slots;
  for (const auto& p : f.params) map.set(p.id, b.addParam(p.type, p.name));
  for (const auto& op : f.ops) {
    std::vector<ValueId> operands = map(op.operands);
    bool candidate = op.dialect == Dialect::kBsf &&
                     (op.kind == OpKind::kAdd || op.kind == OpKind::kMul) && operands.size() >= 2;
    if (!candidate) {
      map.set(op.result, b.emitLike(op, std::move(operands)));
      continue;
    }
    // Secret operands grouped by source in order of first appearance.
    std::vector<ValueId> order;
    std::map<ValueId, std::vector<FoldOperand>> groups;
    std::vector<ValueId> others;
    for (ValueId v : operands) {
      if (!ir::isSecret(b.type(v))) {
        others.push_back(v);
        continue;
      }
      FoldOperand fo{v, v, 0};
      if (const Op* d = b.def(v); d != nullptr && d->kind == OpKind::kRotate) {
        fo.source = d->operands[0];
        fo.offset = d->attr;
      }
      if (!groups.count(fo.source)) order.push_back(fo.source);
      groups[fo.source].push_back(fo);
    }
    std::vector<ValueId> result;
    bool changed = false;
    for (ValueId source : order) {
      const auto& members = groups[source];
      std::vector<int64_t> offsets;
      for (const auto& m : members) offsets.push_back(m.offset);
      auto progression = findProgression(offsets, n);
      auto keepAll = [&] {
        for (const auto& m : members) result.push_back(m.operand);
      };
      if (!progression) {
        keepAll();
        continue;
      }
      const auto m = static_cast<int64_t>(progression->ordered.size());
      const int64_t p = int64_t{1} << log2Floor(static_cast<uint64_t>(m));
      int64_t before = 0;
      for (int64_t d : offsets) before += d != 0 ? 1 : 0;
      int64_t after = log2Floor(static_cast<uint64_t>(p)) + (progression->start != 0 ? 1 : 0);
      for (int64_t i = p; i < m; ++i) after += progression->ordered[i] != 0 ? 1 : 0;
      if (after >= before) {
        keepAll();
        continue;
      }
      ValueId acc = source;
      for (int64_t d = p / 2; d >= 1; d /= 2) {
        acc = b.arith(op.kind, Dialect::kBsf, {acc, rotateBy(b, acc, d * progression->stride)});
      }
      result.push_back(rotateBy(b, acc, progression->start));
      std::set<int64_t> residual(progression->ordered.begin() + p, progression->ordered.end());
      for (const auto& mem : members) {
        if (residual.count(mem.offset)) result.push_back(mem.operand);
      }
      changed = true;
    }
    if (!changed) {
      map.set(op.result, b.emitLike(op, std::move(operands)));
      continue;
    }
    result.insert(result.end(), others.begin(), others.end());
    map.set(op.result, result.size() == 1 ? result.front()
                                          : b.arith(op.kind, Dialect::kBsf, std::move(result)));
  }
  return ir::eliminateDeadCode(b.finish(map[f.ret]));
}

ir::IrFunction materialize(const ir::IrFunction& f) {
  ir::DefUse du(f);
  std::vector<ValueId> tops = insertChainTops(f, du);
  Builder b = Builder::like(f);
  b.setStage(Stage::kBatched);
  ir::ValueMap map(f.idBound());
  const int64_t n = f.slots;
  std::vector<std::optional<SlotRef>> extracted(f.idBound());
  for (const auto& p : f.params) map.set(p.id, b.addParam(batchedParamType(p.type), p.name));

  auto valueOf = [&](ValueId v) {
    if (!extracted[v]) return map[v];
    if (!map.has(v)) {
      const SlotRef& ref = *extracted[v];
      if (ir::isScalarType(b.type(ref.vector))) {
        map.set(v, ref.slot == 0 ? ref.vector : b.constant(0));
      } else {
        map.set(v, rotateBy(b, ref.vector, ref.slot));
      }
    }
    return map[v];
  };

  for (size_t k = 0; k < f.ops.size(); ++k) {
    const Op& op = f.ops[k];
    if (op.kind == OpKind::kExtract) {
      extracted[op.result] = SlotRef{valueOf(op.operands[0]), op.attr};
      continue;
    }
    if (op.kind == OpKind::kInsert) {
      if (tops[k] != op.result) continue;
      // Last write per slot, walking down from the top.
      std::vector<std::optional<ValueId>> writes(static_cast<size_t>(n));
      ValueId base = op.result;
      int index = static_cast<int>(k);
      while (index >= 0 && f.ops[index].kind == OpKind::kInsert && tops[index] == op.result) {
        const Op& ins = f.ops[index];
        auto& w = writes[static_cast<size_t>(ins.attr)];
        if (!w) w = ins.operands[0];
        base = ins.operands[1];
        index = du.defIndex(base);
      }
      std::vector<uint64_t> keep(static_cast<size_t>(n), 1);
      std::vector<uint64_t> constants(static_cast<size_t>(n), 0);
      bool anyConstant = false;
      std::vector<std::pair<ValueId, int64_t>> groupOrder;
      std::map<std::pair<ValueId, int64_t>, std::vector<uint64_t>> masks;
      auto addToGroup = [&](ValueId source, int64_t offset, size_t slot) {
        std::pair<ValueId, int64_t> key{source, floorMod(offset, n)};
        auto [it, inserted] = masks.try_emplace(key, std::vector<uint64_t>(static_cast<size_t>(n), 0));
        if (inserted) groupOrder.push_back(key);
        it->second[slot] = 1;
      };
      for (size_t i = 0; i < writes.size(); ++i) {
        if (!writes[i]) continue;
        keep[i] = 0;
        ValueId s = *writes[i];
        const auto slot = static_cast<int64_t>(i);
        if (extracted[s]) {
          const SlotRef& ref = *extracted[s];
          if (ir::isScalarType(b.type(ref.vector))) {
            if (ref.slot == 0) {
              addToGroup(ref.vector, -slot, i);
            }
          } else {
            addToGroup(ref.vector, ref.slot - slot, i);
          }
        } else if (auto c = du.constValue(s)) {
          constants[i] = *c;
          anyConstant = anyConstant || *c != 0;
        } else {
          addToGroup(map[s], -slot, i);
        }
      }
      std::vector<ValueId> terms;
      ValueId baseValue = valueOf(base);
      if (std::any_of(keep.begin(), keep.end(), [](uint64_t x) { return x != 0; })) {
        terms.push_back(b.arith(OpKind::kMul, Dialect::kBsf, {baseValue, b.vconst(keep)}));
      }
      for (const auto& key : groupOrder) {
        ValueId rotated = rotateBy(b, key.first, key.second);
        const auto& mask = masks[key];
        bool full = std::all_of(mask.begin(), mask.end(), [](uint64_t x) { return x == 1; });
        terms.push_back(full ? rotated : b.arith(OpKind::kMul, Dialect::kBsf, {rotated, b.vconst(mask)}));
      }
      if (anyConstant || terms.empty()) {
        terms.push_back(b.vconst(constants));
      }
      map.set(op.result,
              terms.size() == 1 ? terms.front() : b.arith(OpKind::kAdd, Dialect::kBsf, terms));
      continue;
    }
    std::vector<ValueId> operands;
    for (ValueId v : op.operands) operands.push_back(valueOf(v));
    if (ir::isArith(op.kind)) {
      map.set(op.result, b.arith(op.kind, Dialect::kBsf, std::move(operands)));
    } else {
      map.set(op.result, b.emitLike(op, std::move(operands)));
    }
  }
  return ir::eliminateDeadCode(b.finish(valueOf(f.ret)));
}

}  // namespace heco::passes
