#ifndef HECO_IR_IR_H_
#define HECO_IR_IR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heco/support.h"

namespace heco::ir {

using ValueId = uint32_t;
inline constexpr ValueId kNoValue = ~ValueId{0};

/// Value types. The slot count n and modulus t are properties of the
/// enclosing function, so types only record the kind.
///  - SecretScalar: one encrypted element (slot 0 once batched).
///  - SecretVector: tensor of secret elements, only before simdify.
///  - BatchedSecret: a whole n-slot ciphertext, only after simdify.
///  - PlainScalar: a constant; broadcast to every slot in `bsf` ops.
///  - PlainVector: n plaintext slots.
enum class Type { kSecretScalar, kSecretVector, kBatchedSecret, kPlainScalar, kPlainVector };

inline bool isSecret(Type t) {
  return t == Type::kSecretScalar || t == Type::kSecretVector || t == Type::kBatchedSecret;
}
inline bool isScalarType(Type t) { return t == Type::kSecretScalar || t == Type::kPlainScalar; }
inline bool isVectorType(Type t) { return !isScalarType(t); }

enum class Dialect { kHl, kBsf };

enum class OpKind { kExtract, kInsert, kAdd, kSub, kMul, kRotate, kConst, kVConst };

const char* dialectName(Dialect d);
const char* opKindName(OpKind k);
std::optional<OpKind> parseOpKind(std::string_view name);

inline bool isArith(OpKind k) { return k == OpKind::kAdd || k == OpKind::kSub || k == OpKind::kMul; }
inline bool isCommutative(OpKind k) { return k == OpKind::kAdd || k == OpKind::kMul; }

/// Stage of a function. Secret vectors are SecretVector in kHighLevel and
/// BatchedSecret in kBatched.
enum class Stage { kHighLevel, kBatched };

struct Op {
  OpKind kind = OpKind::kConst;
  Dialect dialect = Dialect::kBsf;
  ValueId result = kNoValue;
  Type type = Type::kPlainScalar;
  /// extract: (vector); insert: (scalar, vector); arith: n-ary (sub is
  /// binary); rotate: (vector).
  std::vector<ValueId> operands;
  /// extract/insert: slot; rotate: offset; const: value.
  int64_t attr = 0;
  /// vconst slot values.
  std::vector<uint64_t> values;

  bool operator==(const Op&) const = default;
};

struct Param {
  ValueId id = kNoValue;
  Type type = Type::kSecretScalar;
  std::string name;

  bool operator==(const Param&) const = default;
};

/// Straight-line SSA function. Definitions precede uses in `ops`.
struct IrFunction {
  std::string name;
  uint64_t modulus = kDefaultModulus;
  int64_t slots = 2;
  Stage stage = Stage::kHighLevel;
  Shape result_shape = Shape::kScalar;
  std::vector<Param> params;
  std::vector<Op> ops;
  ValueId ret = kNoValue;

  bool operator==(const IrFunction&) const = default;

  Modulus mod() const { return Modulus{modulus}; }
  /// One past the largest value id.
  ValueId idBound() const;
};

/// Result type of an op with the given operand types, or nullopt when the
/// combination is ill-typed.
std::optional<Type> inferType(Stage stage, OpKind kind, Dialect dialect,
                              const std::vector<Type>& operand_types);

/// Def/use information for a function, indexed by value id.
class DefUse {
 public:
  explicit DefUse(const IrFunction& f);

  /// Index into f.ops of the defining op, or -1 for params and unknown ids.
  int defIndex(ValueId v) const { return v < def_.size() ? def_[v] : -1; }
  const Op* def(ValueId v) const;
  Type type(ValueId v) const { return types_[v]; }
  /// Number of operand slots (plus the return) referring to v.
  int useCount(ValueId v) const { return v < uses_.size() ? uses_[v] : 0; }
  /// Indices of distinct ops using v, in program order.
  const std::vector<int>& users(ValueId v) const { return users_[v]; }
  bool isReturned(ValueId v) const { return v == ret_; }

  /// Scalar value of a `const` definition.
  std::optional<uint64_t> constValue(ValueId v) const;
  bool isConstant(ValueId v) const;

 private:
  const IrFunction& f_;
  std::vector<int> def_;
  std::vector<Type> types_;
  std::vector<int> uses_;
  std::vector<std::vector<int>> users_;
  ValueId ret_;
};

/// Builds a function with dense value ids: params first, then ops in order.
class Builder {
 public:
  Builder(std::string name, uint64_t modulus, int64_t slots, Stage stage, Shape result_shape);
  /// Starts from the header (name, modulus, slots, stage, shape) of `f`.
  static Builder like(const IrFunction& f);

  ValueId addParam(Type type, std::string name);

  ValueId constant(int64_t value);
  ValueId vconst(std::vector<uint64_t> values);
  ValueId extract(ValueId vector, int64_t slot);
  ValueId insert(ValueId scalar, ValueId vector, int64_t slot);
  ValueId arith(OpKind kind, Dialect dialect, std::vector<ValueId> operands);
  ValueId rotate(ValueId vector, int64_t offset);
  /// Emits a copy of `op` with new operands; the type is re-inferred.
  ValueId emitLike(const Op& op, std::vector<ValueId> operands);

  Type type(ValueId v) const { return types_.at(v); }
  const Op* def(ValueId v) const;
  std::optional<uint64_t> constValue(ValueId v) const;
  int64_t slots() const { return f_.slots; }
  const Modulus mod() const { return f_.mod(); }
  Stage stage() const { return f_.stage; }
  void setStage(Stage stage) { f_.stage = stage; }

  IrFunction finish(ValueId ret);

 private:
  ValueId emit(Op op);

  IrFunction f_;
  std::vector<Type> types_;
  std::vector<int> def_;
};

/// Extracts slot `slot` from `vector`, forwarding through insert chains and
/// folding constant vectors when the value is statically known.
ValueId forwardExtract(Builder& b, ValueId vector, int64_t slot);

/// Maps old value ids to new ones while a pass rebuilds a function.
class ValueMap {
 public:
  explicit ValueMap(ValueId bound) : map_(bound, kNoValue) {}
  void set(ValueId from, ValueId to) { map_.at(from) = to; }
  ValueId operator[](ValueId from) const { return map_.at(from); }
  bool has(ValueId from) const { return map_.at(from) != kNoValue; }
  std::vector<ValueId> operator()(const std::vector<ValueId>& from) const;

 private:
  std::vector<ValueId> map_;
};

std::string typeName(Type t, int64_t slots);

}  // namespace heco::ir

#endif  // HECO_IR_IR_H_
