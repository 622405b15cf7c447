#include "heco/dsl/typecheck.h"

#include <cmath>
#include <set>

namespace heco::dsl {

const TypedFunction& TypedProgram::function(const std::string& name) const {
  for (const auto& f : functions) {
    if (f.fn.name == name) return f;
  }
  throw CompileError(ErrorKind::kInput, "no function named '" + name + "'");
}

int64_t evalConstExpr(const Expr& expr, const std::map<std::string, int64_t>& constants) {
  switch (expr.kind) {
    case ExprKind::kIntLit:
      return expr.value;
    case ExprKind::kVar: {
      auto it = constants.find(expr.name);
      if (it == constants.end()) {
        throw CompileError(ErrorKind::kType, "'" + expr.name + "' is not a constant", expr.loc);
      }
      return it->second;
    }
    case ExprKind::kNeg:
      return -evalConstExpr(expr.args[0], constants);
    case ExprKind::kIsqrt: {
      int64_t v = evalConstExpr(expr.args[0], constants);
      if (v < 0) throw CompileError(ErrorKind::kType, "isqrt of a negative value", expr.loc);
      auto r = static_cast<int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
      while (r * r > v) --r;
      while ((r + 1) * (r + 1) <= v) ++r;
      if (r * r != v) {
        throw CompileError(ErrorKind::kType,
                           "isqrt requires a perfect square, got " + std::to_string(v), expr.loc);
      }
      return r;
    }
    case ExprKind::kBinary: {
      int64_t a = evalConstExpr(expr.args[0], constants);
      int64_t b = evalConstExpr(expr.args[1], constants);
      switch (expr.op) {
        case BinOp::kAdd: return a + b;
        case BinOp::kSub: return a - b;
        case BinOp::kMul: return a * b;
        case BinOp::kMod:
          if (b <= 0) throw CompileError(ErrorKind::kType, "modulus must be positive", expr.loc);
          return floorMod(a, b);
        case BinOp::kRotate:
          break;
      }
      break;
    }
    default:
      break;
  }
  throw CompileError(ErrorKind::kType, "expression is not a compile-time constant", expr.loc);
}

namespace {

class Checker {
 public:
  Checker(const std::map<std::string, int64_t>& constants) : constants_(constants) {}

  TypedFunction check(const Function& source) {
    TypedFunction out;
    out.fn = source;
    slots_ = 0;
    scopes_.clear();
    immutable_.clear();
    scopes_.emplace_back();
    Function& fn = out.fn;

    for (auto& param : fn.params) {
      param.type.resolved = resolve(param.type);
      if (!param.type.resolved.secret) {
        throw CompileError(ErrorKind::kType,
                           "parameter '" + param.name +
                               "' must be secret; plaintext values are compile-time constants",
                           param.loc);
      }
      declare(param.name, param.type.resolved, param.loc);
    }
    fn.ret.resolved = resolve(fn.ret);
    if (!fn.ret.resolved.secret) {
      throw CompileError(ErrorKind::kType, "function '" + fn.name + "' must return a secret value",
                         fn.ret.loc);
    }

    if (fn.body.empty() || fn.body.back().kind != StmtKind::kReturn) {
      throw CompileError(ErrorKind::kType,
                         "function '" + fn.name + "' must end with a return statement", fn.loc);
    }
    for (size_t i = 0; i < fn.body.size(); ++i) {
      checkStmt(fn.body[i], /*allowReturn=*/i + 1 == fn.body.size(), fn.ret.resolved);
    }
    out.slots = slots_ == 0 ? kScalarOnlySlots : slots_;
    return out;
  }

 private:
  DslType resolve(TypeSpec& spec) {
    DslType type;
    type.secret = spec.secret;
    for (auto& d : spec.dims) {
      int64_t v = evalConstExpr(d, constants_);
      if (v < 1) {
        throw CompileError(ErrorKind::kType, "array dimension must be positive", d.loc);
      }
      type.dims.push_back(v);
    }
    if (type.dims.empty()) {
      type.shape = TypeShape::kScalar;
    } else if (type.dims.size() == 1) {
      type.shape = TypeShape::kVector;
    } else {
      type.shape = TypeShape::kTable;
      if (type.secret) {
        throw CompileError(ErrorKind::kType, "secret values cannot have more than one dimension",
                           spec.loc);
      }
    }
    if (type.secret && type.isVector()) noteSecretVector(type.length(), spec.loc);
    spec.resolved = type;
    return type;
  }

  void noteSecretVector(int64_t length, SourceLoc loc) {
    if (!isPowerOfTwo(static_cast<uint64_t>(length)) || length < 2 || length > kMaxSlots) {
      throw CompileError(ErrorKind::kType,
                         "secret vector length must be a power of two in [2, 65536], got " +
                             std::to_string(length),
                         loc);
    }
    if (slots_ == 0) {
      slots_ = length;
    } else if (slots_ != length) {
      throw CompileError(ErrorKind::kType,
                         "secret vectors of different lengths (" + std::to_string(slots_) +
                             " and " + std::to_string(length) + ") in one function",
                         loc);
    }
  }

  void declare(const std::string& name, const DslType& type, SourceLoc loc) {
    if (lookupOrNull(name) || constants_.count(name)) {
      throw CompileError(ErrorKind::kType, "redeclaration of '" + name + "'", loc);
    }
    scopes_.back()[name] = type;
  }

  const DslType* lookupOrNull(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }

  DslType lookup(const std::string& name, SourceLoc loc) const {
    if (const DslType* t = lookupOrNull(name)) return *t;
    if (constants_.count(name)) return DslType::scalar(false);
    throw CompileError(ErrorKind::kType, "use of undeclared variable '" + name + "'", loc);
  }

  DslType assignable(const std::string& name, SourceLoc loc) const {
    if (constants_.count(name) && !lookupOrNull(name)) {
      throw CompileError(ErrorKind::kType, "cannot assign to constant '" + name + "'", loc);
    }
    if (immutable_.count(name)) {
      throw CompileError(ErrorKind::kType, "cannot assign to loop variable '" + name + "'", loc);
    }
    return lookup(name, loc);
  }

  static void requireCompatible(const DslType& target, const DslType& value,
                                const std::string& name, SourceLoc loc) {
    if (target.shape == TypeShape::kTable || value.shape == TypeShape::kTable) {
      throw CompileError(ErrorKind::kType, "tables can only be read and written element-wise", loc);
    }
    if (target.shape != value.shape || target.dims != value.dims) {
      throw CompileError(ErrorKind::kType,
                         "cannot assign " + toString(value) + " to '" + name + "' of type " +
                             toString(target),
                         loc);
    }
    if (value.secret && !target.secret) {
      throw CompileError(ErrorKind::kType,
                         "cannot assign a secret value to plaintext variable '" + name + "'", loc);
    }
  }

  void checkInitList(Expr& list, const DslType& type, size_t dim) {
    if (list.kind != ExprKind::kInitList) {
      throw CompileError(ErrorKind::kType, "expected an initializer list", list.loc);
    }
    if (static_cast<int64_t>(list.args.size()) != type.dims[dim]) {
      throw CompileError(ErrorKind::kType,
                         "initializer has " + std::to_string(list.args.size()) +
                             " elements, expected " + std::to_string(type.dims[dim]),
                         list.loc);
    }
    for (auto& element : list.args) {
      if (dim + 1 < type.dims.size()) {
        checkInitList(element, type, dim + 1);
      } else {
        DslType t = typeOf(element);
        if (!t.isScalar() || t.secret) {
          throw CompileError(ErrorKind::kType, "initializer elements must be plaintext scalars",
                             element.loc);
        }
      }
    }
    list.type = type;
    list.type.secret = false;
  }

  void checkStmt(Stmt& stmt, bool allowReturn, const DslType& retType) {
    switch (stmt.kind) {
      case StmtKind::kDecl: {
        DslType type = resolve(stmt.type);
        if (!stmt.values.empty()) {
          Expr& init = stmt.values[0];
          if (init.kind == ExprKind::kInitList) {
            if (type.isScalar()) {
              throw CompileError(ErrorKind::kType, "scalar initialized with a list", init.loc);
            }
            checkInitList(init, type, 0);
          } else {
            requireCompatible(type, typeOf(init), stmt.name, init.loc);
          }
        }
        declare(stmt.name, type, stmt.loc);
        return;
      }
      case StmtKind::kAssign: {
        DslType target = assignable(stmt.name, stmt.loc);
        DslType value = typeOf(stmt.values[0]);
        if (stmt.assign != AssignOp::kSet) value = arithmeticResult(target, value, stmt.loc);
        requireCompatible(target, value, stmt.name, stmt.loc);
        return;
      }
      case StmtKind::kIndexAssign: {
        DslType target = assignable(stmt.name, stmt.loc);
        if (target.isScalar()) {
          throw CompileError(ErrorKind::kType, "'" + stmt.name + "' is not indexable", stmt.loc);
        }
        if (stmt.indices.size() != target.dims.size()) {
          throw CompileError(ErrorKind::kType,
                             "'" + stmt.name + "' needs " + std::to_string(target.dims.size()) +
                                 " indices",
                             stmt.loc);
        }
        for (auto& index : stmt.indices) requireScalarIndex(index);
        DslType element = DslType::scalar(target.secret);
        DslType value = typeOf(stmt.values[0]);
        if (stmt.assign != AssignOp::kSet) value = arithmeticResult(element, value, stmt.loc);
        if (!value.isScalar()) {
          throw CompileError(ErrorKind::kType, "element assignment needs a scalar value", stmt.loc);
        }
        if (value.secret && !target.secret) {
          throw CompileError(ErrorKind::kType,
                             "cannot assign a secret value into plaintext array '" + stmt.name + "'",
                             stmt.loc);
        }
        return;
      }
      case StmtKind::kFor: {
        for (auto& bound : stmt.values) {
          if (!typeOf(bound).isScalar()) {
            throw CompileError(ErrorKind::kType, "loop bound must be a scalar", bound.loc);
          }
        }
        scopes_.emplace_back();
        declare(stmt.name, DslType::scalar(false), stmt.loc);
        immutable_.insert(stmt.name);
        for (auto& s : stmt.body) checkStmt(s, false, retType);
        immutable_.erase(stmt.name);
        scopes_.pop_back();
        return;
      }
      case StmtKind::kBlock: {
        scopes_.emplace_back();
        for (auto& s : stmt.body) checkStmt(s, false, retType);
        scopes_.pop_back();
        return;
      }
      case StmtKind::kReturn: {
        if (!allowReturn) {
          throw CompileError(ErrorKind::kType,
                             "return must be the last statement of the function body", stmt.loc);
        }
        DslType value = typeOf(stmt.values[0]);
        DslType expected = retType;
        if (value.shape != expected.shape || value.dims != expected.dims) {
          throw CompileError(ErrorKind::kType,
                             "returning " + toString(value) + " from a function declared " +
                                 toString(expected),
                             stmt.loc);
        }
        return;
      }
    }
  }

  void requireScalarIndex(Expr& index) {
    if (!typeOf(index).isScalar()) {
      throw CompileError(ErrorKind::kType, "index must be a scalar", index.loc);
    }
  }

  DslType arithmeticResult(const DslType& a, const DslType& b, SourceLoc loc) {
    if (a.shape == TypeShape::kTable || b.shape == TypeShape::kTable) {
      throw CompileError(ErrorKind::kType, "tables can only be indexed", loc);
    }
    DslType result;
    result.secret = a.secret || b.secret;
    if (a.isScalar() && b.isScalar()) {
      result.shape = TypeShape::kScalar;
    } else if (a.isVector() && b.isVector()) {
      if (a.length() != b.length()) {
        throw CompileError(ErrorKind::kType,
                           "vector length mismatch: " + std::to_string(a.length()) + " vs " +
                               std::to_string(b.length()),
                           loc);
      }
      result = DslType::vector(result.secret, a.length());
    } else {
      result = DslType::vector(result.secret, a.isVector() ? a.length() : b.length());
    }
    if (result.secret && result.isVector()) noteSecretVector(result.length(), loc);
    return result;
  }

  DslType typeOf(Expr& expr) {
    DslType type;
    switch (expr.kind) {
      case ExprKind::kIntLit:
        type = DslType::scalar(false);
        break;
      case ExprKind::kVar:
        type = lookup(expr.name, expr.loc);
        break;
      case ExprKind::kIndex: {
        DslType base = lookup(expr.name, expr.loc);
        if (base.isScalar()) {
          throw CompileError(ErrorKind::kType, "'" + expr.name + "' is not indexable", expr.loc);
        }
        if (expr.args.size() != base.dims.size()) {
          throw CompileError(ErrorKind::kType,
                             "'" + expr.name + "' needs " + std::to_string(base.dims.size()) +
                                 " indices",
                             expr.loc);
        }
        for (auto& index : expr.args) requireScalarIndex(index);
        type = DslType::scalar(base.secret);
        break;
      }
      case ExprKind::kNeg: {
        type = typeOf(expr.args[0]);
        if (type.shape == TypeShape::kTable) {
          throw CompileError(ErrorKind::kType, "tables can only be indexed", expr.loc);
        }
        break;
      }
      case ExprKind::kIsqrt: {
        DslType arg = typeOf(expr.args[0]);
        if (!arg.isScalar() || arg.secret) {
          throw CompileError(ErrorKind::kType, "isqrt requires a plaintext scalar", expr.loc);
        }
        type = DslType::scalar(false);
        break;
      }
      case ExprKind::kInitList:
        throw CompileError(ErrorKind::kType,
                           "initializer lists are only allowed in declarations", expr.loc);
      case ExprKind::kBinary: {
        DslType lhs = typeOf(expr.args[0]);
        DslType rhs = typeOf(expr.args[1]);
        if (expr.op == BinOp::kRotate) {
          if (!lhs.isVector()) {
            throw CompileError(ErrorKind::kType,
                               "rotation '<<' requires a vector operand, got " + toString(lhs),
                               expr.loc);
          }
          if (!rhs.isScalar() || rhs.secret) {
            throw CompileError(ErrorKind::kType, "rotation amount must be a plaintext scalar",
                               expr.loc);
          }
          type = lhs;
        } else if (expr.op == BinOp::kMod) {
          if (!lhs.isScalar() || !rhs.isScalar() || lhs.secret || rhs.secret) {
            throw CompileError(ErrorKind::kType, "'%' requires plaintext scalar operands",
                               expr.loc);
          }
          type = DslType::scalar(false);
        } else {
          type = arithmeticResult(lhs, rhs, expr.loc);
        }
        break;
      }
    }
    expr.type = type;
    return type;
  }

  const std::map<std::string, int64_t>& constants_;
  std::vector<std::map<std::string, DslType>> scopes_;
  std::set<std::string> immutable_;
  int64_t slots_ = 0;
};

}  // namespace

TypedProgram checkTypes(const Program& program, const CheckOptions& options) {
  TypedProgram typed;
  typed.modulus = options.modulus;
  if (!isValidPlainModulus(options.modulus)) {
    throw CompileError(ErrorKind::kType,
                       "plaintext modulus must be an odd prime below 2^31, got " +
                           std::to_string(options.modulus));
  }
  for (const auto& [name, value] : options.overrides) {
    bool found = false;
    for (const auto& c : program.consts) found = found || c.name == name;
    if (!found) {
      throw CompileError(ErrorKind::kType, "cannot override undeclared constant '" + name + "'");
    }
  }
  for (const auto& c : program.consts) {
    if (typed.constants.count(c.name)) {
      throw CompileError(ErrorKind::kType, "redeclaration of constant '" + c.name + "'", c.loc);
    }
    auto override = options.overrides.find(c.name);
    typed.constants[c.name] =
        override != options.overrides.end() ? override->second : evalConstExpr(c.value, typed.constants);
  }
  std::set<std::string> names;
  Checker checker(typed.constants);
  for (const auto& fn : program.functions) {
    if (!names.insert(fn.name).second) {
      throw CompileError(ErrorKind::kType, "duplicate function '" + fn.name + "'", fn.loc);
    }
    typed.functions.push_back(checker.check(fn));
  }
  return typed;
}

}  // namespace heco::dsl
