#include "heco/dsl/lower.h"

#include <cmath>
#include <map>

namespace heco::dsl {

using ir::Builder;
using ir::Dialect;
using ir::OpKind;
using ir::ValueId;

namespace {

// A scalar during lowering: either a compile-time integer (exact, not yet
// reduced) or an IR value.
struct Scalar {
  bool is_const = true;
  int64_t value = 0;
  ValueId id = ir::kNoValue;

  static Scalar constant(int64_t v) { return {true, v, ir::kNoValue}; }
  static Scalar dynamic(ValueId id) { return {false, 0, id}; }
};

// Plain vectors and tables are compile-time arrays (row-major); secret
// vectors are IR values.
struct Variable {
  DslType type;
  Scalar scalar;
  std::vector<int64_t> array;
  ValueId vector = ir::kNoValue;
};

class Lowerer {
 public:
  Lowerer(const TypedProgram& program, const TypedFunction& fn)
      : program_(program),
        fn_(fn.fn),
        slots_(fn.slots),
        b_(fn.fn.name, program.modulus, fn.slots, ir::Stage::kHighLevel,
           fn.fn.ret.resolved.isVector() ? Shape::kVector : Shape::kScalar) {}

  ir::IrFunction run() {
    scopes_.emplace_back();
    for (const auto& p : fn_.params) {
      Variable var;
      var.type = p.type.resolved;
      if (var.type.isVector()) {
        var.vector = b_.addParam(ir::Type::kSecretVector, p.name);
      } else {
        var.scalar = Scalar::dynamic(b_.addParam(ir::Type::kSecretScalar, p.name));
      }
      scopes_.back()[p.name] = std::move(var);
    }
    for (const auto& stmt : fn_.body) {
      if (stmt.kind == StmtKind::kReturn) {
        const Expr& value = stmt.values[0];
        ValueId ret = value.type.isVector() ? materialize(evalVector(value), value.type)
                                            : materialize(evalScalar(value));
        return b_.finish(ret);
      }
      lowerStmt(stmt);
    }
    throw CompileError(ErrorKind::kUnroll, "function '" + fn_.name + "' has no return", fn_.loc);
  }

 private:
  // --- variables -----------------------------------------------------------

  Variable* find(const std::string& name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }

  Variable& lookup(const std::string& name, SourceLoc loc) {
    if (Variable* v = find(name)) return *v;
    auto c = program_.constants.find(name);
    if (c != program_.constants.end()) {
      constant_.type = DslType::scalar(false);
      constant_.scalar = Scalar::constant(c->second);
      return constant_;
    }
    throw CompileError(ErrorKind::kUnroll, "unknown variable '" + name + "'", loc);
  }

  // --- scalars -------------------------------------------------------------

  ValueId materialize(const Scalar& s) { return s.is_const ? b_.constant(s.value) : s.id; }

  Scalar fromIr(ValueId id) {
    if (auto c = b_.constValue(id)) return Scalar::constant(static_cast<int64_t>(*c));
    return Scalar::dynamic(id);
  }

  Scalar binary(BinOp op, const Scalar& x, const Scalar& y, SourceLoc loc) {
    if (x.is_const && y.is_const) {
      switch (op) {
        case BinOp::kAdd: return Scalar::constant(x.value + y.value);
        case BinOp::kSub: return Scalar::constant(x.value - y.value);
        case BinOp::kMul: return Scalar::constant(x.value * y.value);
        case BinOp::kMod:
          if (y.value <= 0) throw CompileError(ErrorKind::kUnroll, "modulus must be positive", loc);
          return Scalar::constant(floorMod(x.value, y.value));
        case BinOp::kRotate: break;
      }
      throw CompileError(ErrorKind::kUnroll, "invalid scalar operator", loc);
    }
    OpKind kind = op == BinOp::kAdd ? OpKind::kAdd : op == BinOp::kSub ? OpKind::kSub : OpKind::kMul;
    return Scalar::dynamic(b_.arith(kind, Dialect::kHl, {materialize(x), materialize(y)}));
  }

  Scalar negate(const Scalar& x) {
    if (x.is_const) return Scalar::constant(-x.value);
    return Scalar::dynamic(b_.arith(OpKind::kSub, Dialect::kHl, {b_.constant(0), x.id}));
  }

  int64_t constIndex(const Expr& e, const std::string& what) {
    if (e.type.secret) {
      throw CompileError(ErrorKind::kUnroll,
                         what + " depends on a secret value and is not a compile-time constant",
                         e.loc);
    }
    Scalar s = evalScalar(e);
    if (!s.is_const) {
      throw CompileError(ErrorKind::kUnroll, what + " is not a compile-time constant", e.loc);
    }
    return s.value;
  }

  int64_t flatIndex(const Variable& var, const std::vector<Expr>& indices, const std::string& name) {
    int64_t flat = 0;
    for (size_t k = 0; k < indices.size(); ++k) {
      int64_t i = constIndex(indices[k], "index of '" + name + "'");
      if (i < 0 || i >= var.type.dims[k]) {
        throw CompileError(ErrorKind::kUnroll,
                           "index " + std::to_string(i) + " out of range for '" + name +
                               "' (dimension " + std::to_string(var.type.dims[k]) + ")",
                           indices[k].loc);
      }
      flat = flat * var.type.dims[k] + i;
    }
    return flat;
  }

  Scalar evalScalar(const Expr& e) {
    switch (e.kind) {
      case ExprKind::kIntLit:
        return Scalar::constant(e.value);
      case ExprKind::kVar:
        return lookup(e.name, e.loc).scalar;
      case ExprKind::kIndex: {
        Variable& var = lookup(e.name, e.loc);
        int64_t i = flatIndex(var, e.args, e.name);
        if (var.type.secret) return fromIr(ir::forwardExtract(b_, var.vector, i));
        return Scalar::constant(var.array[static_cast<size_t>(i)]);
      }
      case ExprKind::kNeg:
        return negate(evalScalar(e.args[0]));
      case ExprKind::kIsqrt: {
        Expr call = e;
        call.args[0] = Expr{};
        call.args[0].value = constIndex(e.args[0], "isqrt argument");
        return Scalar::constant(evalConstExpr(call, {}));
      }
      case ExprKind::kBinary: {
        // Left operand first so value ids follow source order.
        Scalar lhs = evalScalar(e.args[0]);
        Scalar rhs = evalScalar(e.args[1]);
        return binary(e.op, lhs, rhs, e.loc);
      }
      case ExprKind::kInitList:
        break;
    }
    throw CompileError(ErrorKind::kUnroll, "expression is not a scalar", e.loc);
  }

  // --- vectors -------------------------------------------------------------

  // Either compile-time elements or an IR vector value.
  struct VecValue {
    bool is_const = true;
    std::vector<int64_t> values;
    ValueId id = ir::kNoValue;
  };

  Scalar element(const VecValue& v, int64_t i) {
    if (v.is_const) return Scalar::constant(v.values[static_cast<size_t>(i)]);
    return fromIr(ir::forwardExtract(b_, v.id, i));
  }

  ValueId materialize(const VecValue& v, const DslType& type) {
    if (!v.is_const) return v.id;
    if (type.length() != slots_) {
      throw CompileError(ErrorKind::kUnroll, "plaintext vector length does not match slot count");
    }
    std::vector<uint64_t> values;
    values.reserve(v.values.size());
    for (int64_t x : v.values) values.push_back(b_.mod().reduce(x));
    return b_.vconst(std::move(values));
  }

  VecValue fromElements(const std::vector<Scalar>& elements) {
    VecValue out;
    bool allConst = true;
    for (const auto& s : elements) allConst = allConst && s.is_const;
    if (allConst) {
      for (const auto& s : elements) out.values.push_back(s.value);
      return out;
    }
    out.is_const = false;
    out.id = b_.vconst(std::vector<uint64_t>(static_cast<size_t>(slots_), 0));
    for (size_t i = 0; i < elements.size(); ++i) {
      out.id = b_.insert(materialize(elements[i]), out.id, static_cast<int64_t>(i));
    }
    return out;
  }

  VecValue evalVector(const Expr& e) {
    switch (e.kind) {
      case ExprKind::kVar: {
        Variable& var = lookup(e.name, e.loc);
        if (var.type.secret) return VecValue{false, {}, var.vector};
        return VecValue{true, var.array, ir::kNoValue};
      }
      case ExprKind::kNeg: {
        VecValue x = evalVector(e.args[0]);
        std::vector<Scalar> out;
        for (int64_t i = 0; i < e.type.length(); ++i) out.push_back(negate(element(x, i)));
        return fromElements(out);
      }
      case ExprKind::kBinary: {
        const Expr& lhs = e.args[0];
        const Expr& rhs = e.args[1];
        int64_t length = e.type.length();
        std::vector<Scalar> out;
        out.reserve(static_cast<size_t>(length));
        if (e.op == BinOp::kRotate) {
          VecValue x = evalVector(lhs);
          int64_t k = constIndex(rhs, "rotation amount");
          for (int64_t i = 0; i < length; ++i) out.push_back(element(x, floorMod(i + k, length)));
          return fromElements(out);
        }
        auto side = [&](const Expr& operand) {
          std::pair<VecValue, Scalar> v;
          if (operand.type.isVector()) {
            v.first = evalVector(operand);
          } else {
            v.second = evalScalar(operand);
          }
          return v;
        };
        auto a = side(lhs);
        auto c = side(rhs);
        for (int64_t i = 0; i < length; ++i) {
          Scalar x = lhs.type.isVector() ? element(a.first, i) : a.second;
          Scalar y = rhs.type.isVector() ? element(c.first, i) : c.second;
          out.push_back(binary(e.op, x, y, e.loc));
        }
        return fromElements(out);
      }
      default:
        break;
    }
    throw CompileError(ErrorKind::kUnroll, "expression is not a vector", e.loc);
  }

  // --- statements ----------------------------------------------------------

  void flattenInit(const Expr& list, std::vector<int64_t>& out) {
    for (const auto& element : list.args) {
      if (element.kind == ExprKind::kInitList) {
        flattenInit(element, out);
      } else {
        Scalar s = evalScalar(element);
        if (!s.is_const) {
          throw CompileError(ErrorKind::kUnroll, "initializer is not a compile-time constant",
                             element.loc);
        }
        out.push_back(s.value);
      }
    }
  }

  void assignWhole(Variable& var, const Expr& value, AssignOp assign, SourceLoc loc) {
    BinOp op = assign == AssignOp::kAdd ? BinOp::kAdd
               : assign == AssignOp::kSub ? BinOp::kSub
                                          : BinOp::kMul;
    if (var.type.isScalar()) {
      Scalar v = evalScalar(value);
      var.scalar = assign == AssignOp::kSet ? v : binary(op, var.scalar, v, loc);
      return;
    }
    VecValue v = evalVector(value);
    if (assign != AssignOp::kSet) {
      VecValue current = var.type.secret ? VecValue{false, {}, var.vector}
                                         : VecValue{true, var.array, ir::kNoValue};
      std::vector<Scalar> out;
      for (int64_t i = 0; i < var.type.length(); ++i) {
        out.push_back(binary(op, element(current, i), element(v, i), loc));
      }
      v = fromElements(out);
    }
    if (var.type.secret) {
      var.vector = materialize(v, var.type);
    } else {
      var.array = v.values;
    }
  }

  void lowerStmt(const Stmt& stmt) {
    switch (stmt.kind) {
      case StmtKind::kDecl: {
        Variable var;
        var.type = stmt.type.resolved;
        const Expr* init = stmt.values.empty() ? nullptr : &stmt.values[0];
        if (var.type.isScalar()) {
          var.scalar = init ? evalScalar(*init) : Scalar::constant(0);
        } else {
          VecValue v;
          if (init == nullptr) {
            v.values.assign(static_cast<size_t>(var.type.elementCount()), 0);
          } else if (init->kind == ExprKind::kInitList) {
            flattenInit(*init, v.values);
          } else {
            v = evalVector(*init);
          }
          if (var.type.secret) {
            var.vector = materialize(v, var.type);
          } else {
            var.array = std::move(v.values);
          }
        }
        scopes_.back()[stmt.name] = std::move(var);
        return;
      }
      case StmtKind::kAssign: {
        Variable& var = lookup(stmt.name, stmt.loc);
        if (stmt.assign != AssignOp::kSet && var.type.isVector() && !stmt.values[0].type.isVector()) {
          // Compound assignment with a scalar right-hand side broadcasts it.
          Scalar y = evalScalar(stmt.values[0]);
          BinOp op = stmt.assign == AssignOp::kAdd ? BinOp::kAdd
                     : stmt.assign == AssignOp::kSub ? BinOp::kSub
                                                     : BinOp::kMul;
          VecValue current = var.type.secret ? VecValue{false, {}, var.vector}
                                             : VecValue{true, var.array, ir::kNoValue};
          std::vector<Scalar> out;
          for (int64_t i = 0; i < var.type.length(); ++i) {
            out.push_back(binary(op, element(current, i), y, stmt.loc));
          }
          VecValue v = fromElements(out);
          if (var.type.secret) {
            var.vector = materialize(v, var.type);
          } else {
            var.array = v.values;
          }
          return;
        }
        assignWhole(var, stmt.values[0], stmt.assign, stmt.loc);
        return;
      }
      case StmtKind::kIndexAssign: {
        Variable& var = lookup(stmt.name, stmt.loc);
        int64_t i = flatIndex(var, stmt.indices, stmt.name);
        Scalar v = evalScalar(stmt.values[0]);
        if (stmt.assign != AssignOp::kSet) {
          BinOp op = stmt.assign == AssignOp::kAdd ? BinOp::kAdd
                     : stmt.assign == AssignOp::kSub ? BinOp::kSub
                                                     : BinOp::kMul;
          Scalar current = var.type.secret ? fromIr(ir::forwardExtract(b_, var.vector, i))
                                           : Scalar::constant(var.array[static_cast<size_t>(i)]);
          v = binary(op, current, v, stmt.loc);
        }
        if (var.type.secret) {
          var.vector = b_.insert(materialize(v), var.vector, i);
        } else {
          var.array[static_cast<size_t>(i)] = v.value;
        }
        return;
      }
      case StmtKind::kFor: {
        int64_t lo = constIndex(stmt.values[0], "loop bound");
        int64_t hi = constIndex(stmt.values[1], "loop bound");
        for (int64_t i = lo; i < hi; ++i) {
          if (++iterations_ > kMaxUnrolledIterations) {
            throw CompileError(ErrorKind::kUnroll,
                               "unrolling exceeds " + std::to_string(kMaxUnrolledIterations) +
                                   " loop iterations",
                               stmt.loc);
          }
          scopes_.emplace_back();
          Variable loopVar;
          loopVar.type = DslType::scalar(false);
          loopVar.scalar = Scalar::constant(i);
          scopes_.back()[stmt.name] = std::move(loopVar);
          for (const auto& s : stmt.body) lowerStmt(s);
          scopes_.pop_back();
        }
        return;
      }
      case StmtKind::kBlock: {
        scopes_.emplace_back();
        for (const auto& s : stmt.body) lowerStmt(s);
        scopes_.pop_back();
        return;
      }
      case StmtKind::kReturn:
        throw CompileError(ErrorKind::kUnroll, "unexpected return", stmt.loc);
    }
  }

  const TypedProgram& program_;
  const Function& fn_;
  int64_t slots_;
  Builder b_;
  std::vector<std::map<std::string, Variable>> scopes_;
  Variable constant_;
  int64_t iterations_ = 0;
};

}  // namespace

ir::IrFunction lowerFunction(const TypedProgram& program, const TypedFunction& fn) {
  return Lowerer(program, fn).run();
}

std::vector<ir::IrFunction> lowerToIr(const TypedProgram& program) {
  std::vector<ir::IrFunction> out;
  for (const auto& fn : program.functions) out.push_back(lowerFunction(program, fn));
  return out;
}

}  // namespace heco::dsl
