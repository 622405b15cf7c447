#ifndef HECO_IR_REWRITES_H_
#define HECO_IR_REWRITES_H_

#include "heco/ir/ir.h"

namespace heco::ir {

/// Removes ops whose results do not reach the return value and renumbers
/// values densely.
IrFunction eliminateDeadCode(const IrFunction& f);

/// Merges ops with identical (dialect, kind, operand ids, attributes).
/// Operand order matters; run canonicalize first to merge commuted forms.
IrFunction cse(const IrFunction& f);

/// Evaluates ops over constants mod t and applies the identities x*1 -> x,
/// x+0 -> x, x*0 -> 0, x-x -> 0, rotate(v, 0) -> v. Several constant
/// operands of one n-ary op are combined into one.
IrFunction constantFold(const IrFunction& f);

/// Sorts commutative operands (value id order, constants last), composes
/// nested rotations, rewrites sub(x, c) into add(x, -c) for constant c,
/// drops an insert that is directly overwritten by an insert to the same slot
/// and removes dead ops.
IrFunction canonicalize(const IrFunction& f);

/// Sort order used by canonicalize for commutative operands.
void sortOperands(const Builder& b, std::vector<ValueId>& operands);

}  // namespace heco::ir

#endif  // HECO_IR_REWRITES_H_
