#ifndef HECO_BACKEND_LOWERING_H_
#define HECO_BACKEND_LOWERING_H_

#include "heco/backend/circuit.h"
#include "heco/ir/ir.h"

namespace heco::backend {

/// Lowers `bsf`-only IR to a circuit. n-ary adds and muls become balanced
/// binary trees over their ciphertext operands; plaintext operands are
/// combined at compile time and applied once as the second operand of a
/// ct-pt op. ct - pt becomes ct + (-pt); pt - ct becomes -ct + pt.
CircuitFunction lowerToCircuit(const ir::IrFunction& f);

/// Lowers high-level IR without batching: every vector element is its own
/// single-slot ciphertext and extract/insert become plain wiring. This is
/// the non-batched baseline.
CircuitFunction lowerNaive(const ir::IrFunction& f);

enum class RelinPolicy { kAlways, kNone };

/// Adds one relinearization after every ct-ct mul under kAlways.
CircuitFunction insertRelinearization(const CircuitFunction& c, RelinPolicy policy);

}  // namespace heco::backend

#endif  // HECO_BACKEND_LOWERING_H_
