#ifndef HECO_DSL_TYPECHECK_H_
#define HECO_DSL_TYPECHECK_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heco/dsl/ast.h"

namespace heco::dsl {

/// Largest supported slot count.
inline constexpr int64_t kMaxSlots = int64_t{1} << 16;
/// Slot count used for functions that have no secret vectors.
inline constexpr int64_t kScalarOnlySlots = 2;

struct TypedFunction {
  Function fn;
  /// Common length of every secret vector in the function.
  int64_t slots = kScalarOnlySlots;
};

/// A program whose expressions carry resolved DslTypes.
struct TypedProgram {
  std::map<std::string, int64_t> constants;
  std::vector<TypedFunction> functions;
  uint64_t modulus = kDefaultModulus;

  const TypedFunction& function(const std::string& name) const;
};

struct CheckOptions {
  /// Replaces the initializer of top-level `const` declarations by name.
  std::map<std::string, int64_t> overrides;
  uint64_t modulus = kDefaultModulus;
};

/// Resolves constants and types. Secrecy joins (secret op plain is secret);
/// `<<` requires a vector left operand and a plaintext amount; secret values
/// cannot be assigned into plaintext variables. Parameters and results must
/// be secret, and every secret vector in a function must have the same
/// power-of-two length. Loop bounds and indices are only checked for shape
/// here; non-constant values are rejected by lowering.
TypedProgram checkTypes(const Program& program, const CheckOptions& options = {});

/// Evaluates a constant expression over integer literals, named constants and
/// isqrt. Throws CompileError(kType) otherwise.
int64_t evalConstExpr(const Expr& expr, const std::map<std::string, int64_t>& constants);

}  // namespace heco::dsl

#endif  // HECO_DSL_TYPECHECK_H_
