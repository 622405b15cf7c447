#include "heco/ir/ir.h"

#include <algorithm>
#include <utility>

namespace heco::ir {

const char* dialectName(Dialect d) { return d == Dialect::kHl ? "hl" : "bsf"; }

const char* opKindName(OpKind k) {
  switch (k) {
    case OpKind::kExtract: return "extract";
    case OpKind::kInsert: return "insert";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kRotate: return "rotate";
    case OpKind::kConst: return "const";
    case OpKind::kVConst: return "vconst";
  }
  return "?";
}

std::optional<OpKind> parseOpKind(std::string_view name) {
  for (OpKind k : {OpKind::kExtract, OpKind::kInsert, OpKind::kAdd, OpKind::kSub, OpKind::kMul,
                   OpKind::kRotate, OpKind::kConst, OpKind::kVConst}) {
    if (name == opKindName(k)) return k;
  }
  return std::nullopt;
}

std::string typeName(Type t, int64_t slots) {
  switch (t) {
    case Type::kSecretScalar: return "secret";
    case Type::kSecretVector: return "tensor<" + std::to_string(slots) + "xsecret>";
    case Type::kBatchedSecret: return "batched<" + std::to_string(slots) + ">";
    case Type::kPlainScalar: return "plain";
    case Type::kPlainVector: return "plainvec<" + std::to_string(slots) + ">";
  }
  return "?";
}

ValueId IrFunction::idBound() const {
  ValueId bound = 0;
  for (const auto& p : params) bound = std::max(bound, p.id + 1);
  for (const auto& op : ops) bound = std::max(bound, op.result + 1);
  return bound;
}

namespace {

Type secretVectorFor(Stage stage) {
  return stage == Stage::kBatched ? Type::kBatchedSecret : Type::kSecretVector;
}

// Vector-like operands accepted by extract/insert/rotate. Once batched, a
// secret scalar is a ciphertext with its value in slot 0.
bool acceptsAsVector(Stage stage, Type t) {
  if (t == Type::kPlainVector) return true;
  if (stage == Stage::kBatched) return t == Type::kBatchedSecret || t == Type::kSecretScalar;
  return t == Type::kSecretVector;
}

}  // namespace

std::optional<Type> inferType(Stage stage, OpKind kind, Dialect dialect,
                              const std::vector<Type>& types) {
  bool anySecret = std::any_of(types.begin(), types.end(), isSecret);
  switch (kind) {
    case OpKind::kConst:
      if (dialect != Dialect::kBsf || !types.empty()) return std::nullopt;
      return Type::kPlainScalar;
    case OpKind::kVConst:
      if (dialect != Dialect::kBsf || !types.empty()) return std::nullopt;
      return Type::kPlainVector;
    case OpKind::kExtract:
      if (dialect != Dialect::kHl || types.size() != 1 || !acceptsAsVector(stage, types[0])) {
        return std::nullopt;
      }
      return anySecret ? Type::kSecretScalar : Type::kPlainScalar;
    case OpKind::kInsert:
      if (dialect != Dialect::kHl || types.size() != 2 || !isScalarType(types[0]) ||
          !acceptsAsVector(stage, types[1])) {
        return std::nullopt;
      }
      return anySecret ? secretVectorFor(stage) : Type::kPlainVector;
    case OpKind::kRotate:
      if (dialect != Dialect::kBsf || types.size() != 1 || types[0] == Type::kPlainScalar ||
          !acceptsAsVector(stage, types[0])) {
        return std::nullopt;
      }
      return anySecret ? Type::kBatchedSecret : Type::kPlainVector;
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul: {
      if (kind == OpKind::kSub ? types.size() != 2 : types.size() < 2) return std::nullopt;
      if (dialect == Dialect::kHl) {
        if (!std::all_of(types.begin(), types.end(), isScalarType)) return std::nullopt;
        return anySecret ? Type::kSecretScalar : Type::kPlainScalar;
      }
      if (std::any_of(types.begin(), types.end(),
                      [](Type t) { return t == Type::kSecretVector; })) {
        return std::nullopt;
      }
      if (anySecret) return Type::kBatchedSecret;
      if (std::any_of(types.begin(), types.end(),
                      [](Type t) { return t == Type::kPlainVector; })) {
        return Type::kPlainVector;
      }
      return Type::kPlainScalar;
    }
  }
  return std::nullopt;
}

DefUse::DefUse(const IrFunction& f) : f_(f), ret_(f.ret) {
  ValueId bound = f.idBound();
  def_.assign(bound, -1);
  types_.assign(bound, Type::kPlainScalar);
  uses_.assign(bound, 0);
  users_.assign(bound, {});
  for (const auto& p : f.params) types_[p.id] = p.type;
  for (size_t i = 0; i < f.ops.size(); ++i) {
    const Op& op = f.ops[i];
    def_[op.result] = static_cast<int>(i);
    types_[op.result] = op.type;
    for (ValueId v : op.operands) {
      if (v >= bound) continue;
      ++uses_[v];
      if (users_[v].empty() || users_[v].back() != static_cast<int>(i)) {
        users_[v].push_back(static_cast<int>(i));
      }
    }
  }
  if (f.ret < bound) ++uses_[f.ret];
}

const Op* DefUse::def(ValueId v) const {
  int i = defIndex(v);
  return i < 0 ? nullptr : &f_.ops[i];
}

std::optional<uint64_t> DefUse::constValue(ValueId v) const {
  const Op* op = def(v);
  if (op == nullptr || op->kind != OpKind::kConst) return std::nullopt;
  return static_cast<uint64_t>(op->attr);
}

bool DefUse::isConstant(ValueId v) const {
  const Op* op = def(v);
  return op != nullptr && (op->kind == OpKind::kConst || op->kind == OpKind::kVConst);
}

Builder::Builder(std::string name, uint64_t modulus, int64_t slots, Stage stage,
                 Shape result_shape) {
  f_.name = std::move(name);
  f_.modulus = modulus;
  f_.slots = slots;
  f_.stage = stage;
  f_.result_shape = result_shape;
}

Builder Builder::like(const IrFunction& f) {
  return Builder(f.name, f.modulus, f.slots, f.stage, f.result_shape);
}

ValueId Builder::addParam(Type type, std::string name) {
  if (!f_.ops.empty()) {
    throw CompileError(ErrorKind::kPipeline, "parameters must be added before ops");
  }
  auto id = static_cast<ValueId>(types_.size());
  f_.params.push_back({id, type, std::move(name)});
  types_.push_back(type);
  def_.push_back(-1);
  return id;
}

ValueId Builder::emit(Op op) {
  std::vector<Type> operandTypes;
  operandTypes.reserve(op.operands.size());
  for (ValueId v : op.operands) {
    if (v >= types_.size()) {
      throw CompileError(ErrorKind::kPipeline, "builder: operand %" + std::to_string(v) +
                                                   " is not defined");
    }
    operandTypes.push_back(types_[v]);
  }
  auto type = inferType(f_.stage, op.kind, op.dialect, operandTypes);
  if (!type) {
    std::string message = std::string("builder: ill-typed ") + dialectName(op.dialect) + "." +
                          opKindName(op.kind) + "(";
    for (size_t i = 0; i < operandTypes.size(); ++i) {
      if (i != 0) message += ", ";
      message += typeName(operandTypes[i], f_.slots);
    }
    throw CompileError(ErrorKind::kPipeline, message + ")");
  }
  op.type = *type;
  op.result = static_cast<ValueId>(types_.size());
  types_.push_back(op.type);
  def_.push_back(static_cast<int>(f_.ops.size()));
  f_.ops.push_back(std::move(op));
  return f_.ops.back().result;
}

ValueId Builder::constant(int64_t value) {
  Op op;
  op.kind = OpKind::kConst;
  op.dialect = Dialect::kBsf;
  op.attr = static_cast<int64_t>(mod().reduce(value));
  return emit(std::move(op));
}

ValueId Builder::vconst(std::vector<uint64_t> values) {
  if (static_cast<int64_t>(values.size()) != f_.slots) {
    throw CompileError(ErrorKind::kPipeline, "builder: vconst has " +
                                                 std::to_string(values.size()) + " values, expected " +
                                                 std::to_string(f_.slots));
  }
  Op op;
  op.kind = OpKind::kVConst;
  op.dialect = Dialect::kBsf;
  op.values = std::move(values);
  return emit(std::move(op));
}

ValueId Builder::extract(ValueId vector, int64_t slot) {
  Op op;
  op.kind = OpKind::kExtract;
  op.dialect = Dialect::kHl;
  op.operands = {vector};
  op.attr = slot;
  return emit(std::move(op));
}

ValueId Builder::insert(ValueId scalar, ValueId vector, int64_t slot) {
  Op op;
  op.kind = OpKind::kInsert;
  op.dialect = Dialect::kHl;
  op.operands = {scalar, vector};
  op.attr = slot;
  return emit(std::move(op));
}

ValueId Builder::arith(OpKind kind, Dialect dialect, std::vector<ValueId> operands) {
  Op op;
  op.kind = kind;
  op.dialect = dialect;
  op.operands = std::move(operands);
  return emit(std::move(op));
}

ValueId Builder::rotate(ValueId vector, int64_t offset) {
  Op op;
  op.kind = OpKind::kRotate;
  op.dialect = Dialect::kBsf;
  op.operands = {vector};
  op.attr = floorMod(offset, f_.slots);
  return emit(std::move(op));
}

ValueId Builder::emitLike(const Op& op, std::vector<ValueId> operands) {
  Op copy = op;
  copy.operands = std::move(operands);
  return emit(std::move(copy));
}

const Op* Builder::def(ValueId v) const {
  if (v >= def_.size() || def_[v] < 0) return nullptr;
  return &f_.ops[def_[v]];
}

std::optional<uint64_t> Builder::constValue(ValueId v) const {
  const Op* op = def(v);
  if (op == nullptr || op->kind != OpKind::kConst) return std::nullopt;
  return static_cast<uint64_t>(op->attr);
}

IrFunction Builder::finish(ValueId ret) {
  f_.ret = ret;
  IrFunction out = std::move(f_);
  f_ = IrFunction{};
  types_.clear();
  def_.clear();
  return out;
}

ValueId forwardExtract(Builder& b, ValueId vector, int64_t slot) {
  ValueId v = vector;
  while (const Op* op = b.def(v)) {
    if (op->kind == OpKind::kInsert) {
      if (op->attr == slot) return op->operands[0];
      v = op->operands[1];
      continue;
    }
    if (op->kind == OpKind::kVConst) {
      return b.constant(static_cast<int64_t>(op->values[slot]));
    }
    break;
  }
  return b.extract(v, slot);
}

std::vector<ValueId> ValueMap::operator()(const std::vector<ValueId>& from) const {
  std::vector<ValueId> out;
  out.reserve(from.size());
  for (ValueId v : from) out.push_back((*this)[v]);
  return out;
}

}  // namespace heco::ir
