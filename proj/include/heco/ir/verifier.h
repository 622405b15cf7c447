#ifndef HECO_IR_VERIFIER_H_
#define HECO_IR_VERIFIER_H_

#include <string>
#include <vector>

#include "heco/ir/ir.h"

namespace heco::ir {

struct VerifyOptions {
  /// When set, any `hl` op is a violation (used after materialization).
  bool forbid_hl = false;
};

/// Returns every invariant violation of `f`: SSA (duplicate definitions,
/// "use before def"), typing, attribute ranges ("unnormalized rotation",
/// slot ranges, constants outside [0, t)) and the return value. An empty
/// result means the function is well formed.
std::vector<std::string> verify(const IrFunction& f, const VerifyOptions& options = {});

/// Throws CompileError(kPipeline) listing the violations, prefixed by
/// `context`.
void verifyOrThrow(const IrFunction& f, const std::string& context,
                   const VerifyOptions& options = {});

}  // namespace heco::ir

#endif  // HECO_IR_VERIFIER_H_
