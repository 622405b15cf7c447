#ifndef HECO_PASSES_PREPROCESS_H_
#define HECO_PASSES_PREPROCESS_H_

#include "heco/ir/ir.h"

namespace heco::passes {

/// Flattens chains of hl add (or mul) ops into one n-ary op wherever the
/// intermediate result has exactly one use.
ir::IrFunction mergeArith(const ir::IrFunction& f);

/// Groups two-operand hl add/mul ops of the form op(extract(x, j), c) with a
/// plaintext constant c by (kind, x, destination chain, slot offset between
/// source and destination). Each group of two or more members at distinct
/// source slots gets a plaintext vector p with p[j] = c, filled with the
/// identity elsewhere, and its ops become op(extract(x, j), extract(p, j)).
/// Groups whose constants are all equal keep the broadcast constant. A bare
/// extract added into the same destination counts as a product with 1 and
/// joins a mul group with a free slot, so a matrix entry of 1 keeps its
/// diagonal.
ir::IrFunction vectorizePlaintexts(const ir::IrFunction& f);

}  // namespace heco::passes

#endif  // HECO_PASSES_PREPROCESS_H_
