#ifndef HECO_SIM_REFERENCE_H_
#define HECO_SIM_REFERENCE_H_

#include <string>

#include "heco/dsl/typecheck.h"
#include "heco/sim/values.h"

namespace heco::sim {

/// Interprets a type-checked function directly on plaintexts: loops run,
/// plaintext arithmetic is exact and secret arithmetic is mod t. Knows
/// nothing about IR, batching or ciphertexts, so it serves as the oracle.
/// Throws CompileError(kInput) for missing, unexpected or mis-shaped inputs.
PlainValue execReference(const dsl::TypedProgram& program, const std::string& function,
                         const NamedValues& inputs);

/// Checks `inputs` against the parameter list of `fn`.
void checkInputs(const dsl::TypedFunction& fn, const NamedValues& inputs);

}  // namespace heco::sim

#endif  // HECO_SIM_REFERENCE_H_
