#include "heco/sim/reference.h"

#include <map>

namespace heco::sim {

using dsl::AssignOp;
using dsl::BinOp;
using dsl::Expr;
using dsl::ExprKind;
using dsl::Stmt;
using dsl::StmtKind;

void checkInputs(const dsl::TypedFunction& fn, const NamedValues& inputs) {
  for (const auto& p : fn.fn.params) {
    auto it = inputs.find(p.name);
    if (it == inputs.end()) throw CompileError(ErrorKind::kInput, "missing input '" + p.name + "'");
    const dsl::DslType& type = p.type.resolved;
    const PlainValue& v = it->second;
    if (type.isScalar() != (v.shape == Shape::kScalar)) {
      throw CompileError(ErrorKind::kInput, "input '" + p.name + "' must be a " +
                                                (type.isScalar() ? "scalar" : "vector"));
    }
    if (type.isVector() && static_cast<int64_t>(v.data.size()) != type.length()) {
      throw CompileError(ErrorKind::kInput, "input '" + p.name + "' must have " +
                                                std::to_string(type.length()) + " elements, got " +
                                                std::to_string(v.data.size()));
    }
  }
  for (const auto& [name, value] : inputs) {
    bool known = false;
    for (const auto& p : fn.fn.params) known = known || p.name == name;
    if (!known) throw CompileError(ErrorKind::kInput, "unexpected input '" + name + "'");
  }
}

namespace {

// Secret entries are kept reduced mod t; plaintext entries are exact.
struct Value {
  bool secret = false;
  std::vector<int64_t> data;
};

class Interpreter {
 public:
  Interpreter(const dsl::TypedProgram& program, const dsl::TypedFunction& fn)
      : program_(program), fn_(fn.fn), m_{program.modulus} {}

  PlainValue run(const NamedValues& inputs) {
    scopes_.emplace_back();
    for (const auto& p : fn_.params) {
      Value v{true, {}};
      for (uint64_t x : inputs.at(p.name).data) v.data.push_back(static_cast<int64_t>(m_.reduce(static_cast<int64_t>(x))));
      declare(p.name, std::move(v));
    }
    for (const auto& stmt : fn_.body) {
      if (stmt.kind == StmtKind::kReturn) {
        const Expr& e = stmt.values[0];
        Value v = eval(e);
        PlainValue out;
        out.shape = e.type.isVector() ? Shape::kVector : Shape::kScalar;
        for (int64_t x : v.data) out.data.push_back(m_.reduce(x));
        return out;
      }
      exec(stmt);
    }
    throw CompileError(ErrorKind::kInput, "function '" + fn_.name + "' has no return");
  }

 private:
  void declare(const std::string& name, Value v) { scopes_.back()[name] = std::move(v); }

  Value& lookup(const std::string& name, SourceLoc loc) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return found->second;
    }
    auto c = program_.constants.find(name);
    if (c != program_.constants.end()) {
      constant_ = Value{false, {c->second}};
      return constant_;
    }
    throw CompileError(ErrorKind::kInput, "unknown variable '" + name + "'", loc);
  }

  int64_t apply(BinOp op, int64_t a, int64_t b, bool secret, SourceLoc loc) const {
    if (op == BinOp::kMod) {
      if (b <= 0) throw CompileError(ErrorKind::kUnroll, "modulus must be positive", loc);
      return floorMod(a, b);
    }
    if (!secret) {
      switch (op) {
        case BinOp::kAdd: return a + b;
        case BinOp::kSub: return a - b;
        case BinOp::kMul: return a * b;
        default: break;
      }
    }
    uint64_t x = m_.reduce(a), y = m_.reduce(b);
    switch (op) {
      case BinOp::kAdd: return static_cast<int64_t>(m_.add(x, y));
      case BinOp::kSub: return static_cast<int64_t>(m_.sub(x, y));
      case BinOp::kMul: return static_cast<int64_t>(m_.mul(x, y));
      default: break;
    }
    throw CompileError(ErrorKind::kInput, "invalid operator", loc);
  }

  int64_t plainInt(const Expr& e, const char* what) {
    if (e.type.secret) {
      throw CompileError(ErrorKind::kUnroll, std::string(what) + " depends on a secret value",
                         e.loc);
    }
    return eval(e).data.at(0);
  }

  size_t flatIndex(const Value& v, const dsl::DslType& type, const std::vector<Expr>& indices,
                   const std::string& name) {
    int64_t flat = 0;
    for (size_t k = 0; k < indices.size(); ++k) {
      int64_t i = plainInt(indices[k], "index");
      if (i < 0 || i >= type.dims[k]) {
        throw CompileError(ErrorKind::kUnroll,
                           "index " + std::to_string(i) + " out of range for '" + name + "'",
                           indices[k].loc);
      }
      flat = flat * type.dims[k] + i;
    }
    (void)v;
    return static_cast<size_t>(flat);
  }

  const dsl::DslType& typeOfVar(const std::string& name) {
    for (auto it = types_.rbegin(); it != types_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return found->second;
    }
    for (const auto& p : fn_.params) {
      if (p.name == name) return p.type.resolved;
    }
    static const dsl::DslType kScalar = dsl::DslType::scalar(false);
    return kScalar;
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::kIntLit:
        return Value{false, {e.value}};
      case ExprKind::kVar:
        return lookup(e.name, e.loc);
      case ExprKind::kIndex: {
        Value& v = lookup(e.name, e.loc);
        size_t i = flatIndex(v, typeOfVar(e.name), e.args, e.name);
        return Value{v.secret, {v.data.at(i)}};
      }
      case ExprKind::kNeg: {
        Value v = eval(e.args[0]);
        for (auto& x : v.data) x = v.secret ? static_cast<int64_t>(m_.neg(m_.reduce(x))) : -x;
        return v;
      }
      case ExprKind::kIsqrt: {
        Expr call = e;
        call.args[0] = Expr{};
        call.args[0].value = plainInt(e.args[0], "isqrt argument");
        return Value{false, {dsl::evalConstExpr(call, {})}};
      }
      case ExprKind::kBinary: {
        Value a = eval(e.args[0]);
        Value b = eval(e.args[1]);
        if (e.op == BinOp::kRotate) {
          int64_t k = b.data.at(0);
          auto n = static_cast<int64_t>(a.data.size());
          Value out{a.secret, std::vector<int64_t>(a.data.size())};
          for (int64_t j = 0; j < n; ++j) out.data[j] = a.data[floorMod(j + k, n)];
          return out;
        }
        bool secret = a.secret || b.secret;
        size_t n = std::max(a.data.size(), b.data.size());
        Value out{secret, std::vector<int64_t>(n)};
        for (size_t j = 0; j < n; ++j) {
          int64_t x = a.data.size() == 1 ? a.data[0] : a.data[j];
          int64_t y = b.data.size() == 1 ? b.data[0] : b.data[j];
          out.data[j] = apply(e.op, x, y, secret, e.loc);
        }
        return out;
      }
      case ExprKind::kInitList: {
        Value out{false, {}};
        for (const auto& element : e.args) {
          Value v = eval(element);
          out.data.insert(out.data.end(), v.data.begin(), v.data.end());
        }
        return out;
      }
    }
    throw CompileError(ErrorKind::kInput, "unsupported expression", e.loc);
  }

  static BinOp compoundOp(AssignOp op) {
    return op == AssignOp::kAdd ? BinOp::kAdd : op == AssignOp::kSub ? BinOp::kSub : BinOp::kMul;
  }

  Value coerce(Value v, bool secret) {
    if (secret && !v.secret) {
      for (auto& x : v.data) x = static_cast<int64_t>(m_.reduce(x));
      v.secret = true;
    }
    return v;
  }

  void exec(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::kDecl: {
        const dsl::DslType& type = s.type.resolved;
        Value v{type.secret, std::vector<int64_t>(static_cast<size_t>(type.elementCount()), 0)};
        if (!s.values.empty()) {
          Value init = eval(s.values[0]);
          if (init.data.size() == 1 && v.data.size() > 1) init.data.assign(v.data.size(), init.data[0]);
          v.data = coerce(init, type.secret).data;
        }
        declare(s.name, std::move(v));
        types_.back()[s.name] = type;
        return;
      }
      case StmtKind::kAssign: {
        Value& target = lookup(s.name, s.loc);
        Value v = eval(s.values[0]);
        if (s.assign != AssignOp::kSet) {
          bool secret = target.secret || v.secret;
          Value out{secret, target.data};
          for (size_t j = 0; j < out.data.size(); ++j) {
            int64_t y = v.data.size() == 1 ? v.data[0] : v.data[j];
            out.data[j] = apply(compoundOp(s.assign), target.data[j], y, secret, s.loc);
          }
          v = out;
        }
        target.data = coerce(v, target.secret).data;
        return;
      }
      case StmtKind::kIndexAssign: {
        Value& target = lookup(s.name, s.loc);
        size_t i = flatIndex(target, typeOfVar(s.name), s.indices, s.name);
        Value v = eval(s.values[0]);
        int64_t x = v.data.at(0);
        if (s.assign != AssignOp::kSet) {
          x = apply(compoundOp(s.assign), target.data[i], x, target.secret || v.secret, s.loc);
        }
        target.data[i] = target.secret ? static_cast<int64_t>(m_.reduce(x)) : x;
        return;
      }
      case StmtKind::kFor: {
        int64_t lo = plainInt(s.values[0], "loop bound");
        int64_t hi = plainInt(s.values[1], "loop bound");
        for (int64_t i = lo; i < hi; ++i) {
          scopes_.emplace_back();
          types_.emplace_back();
          declare(s.name, Value{false, {i}});
          for (const auto& inner : s.body) exec(inner);
          types_.pop_back();
          scopes_.pop_back();
        }
        return;
      }
      case StmtKind::kBlock: {
        scopes_.emplace_back();
        types_.emplace_back();
        for (const auto& inner : s.body) exec(inner);
        types_.pop_back();
        scopes_.pop_back();
        return;
      }
      case StmtKind::kReturn:
        throw CompileError(ErrorKind::kInput, "unexpected return", s.loc);
    }
  }

  const dsl::TypedProgram& program_;
  const dsl::Function& fn_;
  Modulus m_;
  std::vector<std::map<std::string, Value>> scopes_;
  std::vector<std::map<std::string, dsl::DslType>> types_{1};
  Value constant_;
};

}  // namespace

PlainValue execReference(const dsl::TypedProgram& program, const std::string& function,
                         const NamedValues& inputs) {
  const dsl::TypedFunction& fn = program.function(function);
  checkInputs(fn, inputs);
  return Interpreter(program, fn).run(inputs);
}

}  // namespace heco::sim
