#ifndef HECO_PASSES_ANCHORS_H_
#define HECO_PASSES_ANCHORS_H_

#include <optional>
#include <vector>

#include "heco/ir/ir.h"

namespace heco::passes {

/// The insert slot an hl arithmetic op's result ends up in.
struct Anchor {
  /// Result of the top insert of the chain the value is written into.
  ir::ValueId chain = ir::kNoValue;
  int64_t slot = 0;

  bool operator==(const Anchor&) const = default;
};

/// Per op index: an hl add/sub/mul is anchored when its result is the scalar
/// operand of an insert, or when its only user is an anchored hl arithmetic
/// op (the anchor is then inherited).
std::vector<std::optional<Anchor>> computeAnchors(const ir::IrFunction& f);

/// Per op index: for inserts, the result id of the top of the insert chain it
/// belongs to. A chain continues through inserts whose result is used only as
/// the vector operand of the next insert.
std::vector<ir::ValueId> insertChainTops(const ir::IrFunction& f, const ir::DefUse& du);

}  // namespace heco::passes

#endif  // HECO_PASSES_ANCHORS_H_
