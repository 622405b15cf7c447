#include "heco/passes/anchors.h"

namespace heco::passes {

using ir::Dialect;
using ir::Op;
using ir::OpKind;
using ir::ValueId;

namespace {

bool isHlArith(const Op& op) { return op.dialect == Dialect::kHl && ir::isArith(op.kind); }

}  // namespace

std::vector<ValueId> insertChainTops(const ir::IrFunction& f, const ir::DefUse& du) {
  std::vector<ValueId> top(f.ops.size(), ir::kNoValue);
  for (size_t k = f.ops.size(); k-- > 0;) {
    const Op& op = f.ops[k];
    if (op.kind != OpKind::kInsert) continue;
    top[k] = op.result;
    if (du.useCount(op.result) != 1 || du.isReturned(op.result)) continue;
    int user = du.users(op.result).front();
    const Op& next = f.ops[user];
    if (next.kind == OpKind::kInsert && next.operands[1] == op.result) top[k] = top[user];
  }
  return top;
}

std::vector<std::optional<Anchor>> computeAnchors(const ir::IrFunction& f) {
  ir::DefUse du(f);
  std::vector<ValueId> tops = insertChainTops(f, du);
  std::vector<std::optional<Anchor>> anchors(f.ops.size());
  for (size_t k = f.ops.size(); k-- > 0;) {
    const Op& op = f.ops[k];
    if (!isHlArith(op)) continue;
    // The first insert in program order wins.
    for (int user : du.users(op.result)) {
      const Op& u = f.ops[user];
      if (u.kind == OpKind::kInsert && u.operands[0] == op.result) {
        anchors[k] = Anchor{tops[user], u.attr};
        break;
      }
    }
    if (anchors[k] || du.isReturned(op.result)) continue;
    const auto& users = du.users(op.result);
    if (users.size() == 1 && isHlArith(f.ops[users[0]]) && anchors[users[0]]) {
      anchors[k] = anchors[users[0]];
    }
  }
  return anchors;
}

}  // namespace heco::passes
