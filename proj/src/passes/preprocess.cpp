#include "heco/passes/preprocess.h"

#include <map>
#include <tuple>

#include "heco/ir/rewrites.h"
#include "heco/passes/anchors.h"

namespace heco::passes {

using ir::Builder;
using ir::Dialect;
using ir::Op;
using ir::OpKind;
using ir::ValueId;

ir::IrFunction mergeArith(const ir::IrFunction& f) {
  ir::DefUse du(f);
  Builder b = Builder::like(f);
  ir::ValueMap map(f.idBound());
  // Flattened operand lists (new ids) of already emitted hl add/mul ops.
  std::vector<std::vector<ValueId>> flat(f.idBound());
  for (const auto& p : f.params) map.set(p.id, b.addParam(p.type, p.name));
  for (const auto& op : f.ops) {
    bool mergeable = op.dialect == Dialect::kHl && (op.kind == OpKind::kAdd || op.kind == OpKind::kMul);
    if (!mergeable) {
      map.set(op.result, b.emitLike(op, map(op.operands)));
      continue;
    }
    std::vector<ValueId> operands;
    for (ValueId v : op.operands) {
      const Op* d = du.def(v);
      bool inlined = d != nullptr && d->kind == op.kind && d->dialect == Dialect::kHl &&
                     du.useCount(v) == 1 && !du.isReturned(v);
      if (inlined) {
        operands.insert(operands.end(), flat[v].begin(), flat[v].end());
      } else {
        operands.push_back(map[v]);
      }
    }
    ir::sortOperands(b, operands);
    flat[op.result] = operands;
    map.set(op.result, b.arith(op.kind, Dialect::kHl, std::move(operands)));
  }
  return ir::eliminateDeadCode(b.finish(map[f.ret]));
}

namespace {

struct Candidate {
  size_t op_index;
  int64_t source_slot;
  uint64_t constant;
};

// (kind, source vector, destination chain, offset)
using GroupKey = std::tuple<OpKind, ValueId, ValueId, int64_t>;

}  // namespace

ir::IrFunction vectorizePlaintexts(const ir::IrFunction& f) {
  ir::DefUse du(f);
  auto anchors = computeAnchors(f);
  const int64_t n = f.slots;

  std::map<GroupKey, std::vector<Candidate>> groups;
  // Bare extracts added by an anchored hl add, as if multiplied by 1. They
  // join a vectorized mul group with a free slot, so a matrix entry of 1
  // does not break its diagonal.
  struct Implicit {
    size_t op_index;
    size_t pos;
    int64_t slot;
  };
  std::map<GroupKey, std::vector<Implicit>> implicit;
  for (size_t k = 0; k < f.ops.size(); ++k) {
    const Op& op = f.ops[k];
    if (op.dialect == Dialect::kHl && op.kind == OpKind::kAdd && anchors[k]) {
      for (size_t pos = 0; pos < op.operands.size(); ++pos) {
        const Op* e = du.def(op.operands[pos]);
        if (e == nullptr || e->kind != OpKind::kExtract || !ir::isSecret(e->type)) continue;
        int64_t offset = floorMod(e->attr - anchors[k]->slot, n);
        implicit[{OpKind::kMul, e->operands[0], anchors[k]->chain, offset}].push_back({k, pos, e->attr});
      }
    }
    if (op.dialect != Dialect::kHl || op.operands.size() != 2) continue;
    if (op.kind != OpKind::kAdd && op.kind != OpKind::kMul) continue;
    for (size_t pos = 0; pos < 2; ++pos) {
      const Op* e = du.def(op.operands[pos]);
      auto c = du.constValue(op.operands[1 - pos]);
      if (e == nullptr || e->kind != OpKind::kExtract || !ir::isSecret(e->type) || !c) continue;
      ValueId chain = anchors[k] ? anchors[k]->chain : ir::kNoValue;
      int64_t offset = anchors[k] ? floorMod(e->attr - anchors[k]->slot, n) : 0;
      groups[{op.kind, e->operands[0], chain, offset}].push_back({k, e->attr, *c});
      break;
    }
  }

  // Rewritten plaintext operand per op index: (subgroup id, slot).
  struct Assignment {
    size_t subgroup;
    int64_t slot;
  };
  std::map<size_t, Assignment> assigned;
  std::map<std::pair<size_t, size_t>, Assignment> assignedImplicit;
  std::vector<std::vector<uint64_t>> vectors;
  for (const auto& [key, members] : groups) {
    OpKind kind = std::get<0>(key);
    // Greedy split so each subgroup uses every source slot at most once.
    std::vector<std::vector<const Candidate*>> subgroups;
    std::vector<std::vector<bool>> used;
    for (const auto& m : members) {
      size_t g = 0;
      while (g < subgroups.size() && used[g][static_cast<size_t>(m.source_slot)]) ++g;
      if (g == subgroups.size()) {
        subgroups.emplace_back();
        used.emplace_back(static_cast<size_t>(n), false);
      }
      subgroups[g].push_back(&m);
      used[g][static_cast<size_t>(m.source_slot)] = true;
    }
    std::vector<std::pair<size_t, size_t>> vectorized;  // (subgroup, vector index)
    for (size_t g = 0; g < subgroups.size(); ++g) {
      const auto& sub = subgroups[g];
      if (sub.size() < 2) continue;
      bool uniform = true;
      for (const Candidate* m : sub) uniform = uniform && m->constant == sub.front()->constant;
      if (uniform) continue;
      std::vector<uint64_t> values(static_cast<size_t>(n), kind == OpKind::kAdd ? 0 : 1);
      for (const Candidate* m : sub) {
        values[static_cast<size_t>(m->source_slot)] = m->constant;
        assigned[m->op_index] = {vectors.size(), m->source_slot};
      }
      vectorized.emplace_back(g, vectors.size());
      vectors.push_back(std::move(values));
    }
    auto extra = implicit.find(key);
    if (extra == implicit.end()) continue;
    for (const auto& m : extra->second) {
      for (const auto& [g, index] : vectorized) {
        auto slot = static_cast<size_t>(m.slot);
        if (used[g][slot]) continue;
        used[g][slot] = true;
        assignedImplicit[{m.op_index, m.pos}] = {index, m.slot};
        break;
      }
    }
  }
  if (assigned.empty() && assignedImplicit.empty()) return f;

  Builder b = Builder::like(f);
  ir::ValueMap map(f.idBound());
  std::vector<ValueId> emitted(vectors.size(), ir::kNoValue);
  for (const auto& p : f.params) map.set(p.id, b.addParam(p.type, p.name));
  for (size_t k = 0; k < f.ops.size(); ++k) {
    const Op& op = f.ops[k];
    std::vector<ValueId> operands = map(op.operands);
    auto plaintext = [&](const Assignment& a) {
      if (emitted[a.subgroup] == ir::kNoValue) emitted[a.subgroup] = b.vconst(vectors[a.subgroup]);
      return b.extract(emitted[a.subgroup], a.slot);
    };
    auto it = assigned.find(k);
    if (it != assigned.end()) {
      for (auto& v : operands) {
        if (b.constValue(v)) v = plaintext(it->second);
      }
    }
    for (size_t pos = 0; pos < operands.size(); ++pos) {
      auto found = assignedImplicit.find({k, pos});
      if (found == assignedImplicit.end()) continue;
      operands[pos] = b.arith(OpKind::kMul, Dialect::kHl, {operands[pos], plaintext(found->second)});
    }
    map.set(op.result, b.emitLike(op, std::move(operands)));
  }
  return ir::eliminateDeadCode(b.finish(map[f.ret]));
}

}  // namespace heco::passes
