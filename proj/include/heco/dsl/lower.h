#ifndef HECO_DSL_LOWER_H_
#define HECO_DSL_LOWER_H_

#include <string>
#include <vector>

#include "heco/dsl/typecheck.h"
#include "heco/ir/ir.h"

namespace heco::dsl {

/// Upper bound on the number of loop iterations executed while unrolling one
/// function.
inline constexpr int64_t kMaxUnrolledIterations = int64_t{1} << 24;

/// Lowers one function to straight-line high-level IR. Loops are fully
/// unrolled, indices constant-evaluated, element reads become hl.extract and
/// element writes hl.insert. Plaintext arithmetic is evaluated at compile time
/// with exact integers and reduced mod t where it meets secret values.
/// Vector-level expressions (`x + y`, `x << k`) are lowered element-wise.
/// Throws CompileError(kUnroll) for non-constant bounds or indices and for
/// out-of-range indices.
ir::IrFunction lowerFunction(const TypedProgram& program, const TypedFunction& fn);

std::vector<ir::IrFunction> lowerToIr(const TypedProgram& program);

}  // namespace heco::dsl

#endif  // HECO_DSL_LOWER_H_
