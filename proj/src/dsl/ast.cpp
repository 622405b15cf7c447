#include "heco/dsl/ast.h"

namespace heco::dsl {

int64_t DslType::elementCount() const {
  int64_t count = 1;
  for (auto d : dims) count *= d;
  return count;
}

std::string toString(const DslType& type) {
  std::string out = type.secret ? "secret int" : "int";
  for (auto d : type.dims) out += "[" + std::to_string(d) + "]";
  return out;
}

const char* binOpSpelling(BinOp op) {
  switch (op) {
    case BinOp::kAdd: return "+";
    case BinOp::kSub: return "-";
    case BinOp::kMul: return "*";
    case BinOp::kMod: return "%";
    case BinOp::kRotate: return "<<";
  }
  return "?";
}

const char* assignOpSpelling(AssignOp op) {
  switch (op) {
    case AssignOp::kSet: return "=";
    case AssignOp::kAdd: return "+=";
    case AssignOp::kSub: return "-=";
    case AssignOp::kMul: return "*=";
  }
  return "?";
}

namespace {

template <typename T>
bool allEqual(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!structurallyEqual(a[i], b[i])) return false;
  }
  return true;
}

bool typeSpecEqual(const TypeSpec& a, const TypeSpec& b) {
  return a.secret == b.secret && allEqual(a.dims, b.dims);
}

}  // namespace

bool structurallyEqual(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::kIntLit:
      return a.value == b.value;
    case ExprKind::kVar:
      return a.name == b.name;
    case ExprKind::kIndex:
      return a.name == b.name && allEqual(a.args, b.args);
    case ExprKind::kBinary:
      return a.op == b.op && allEqual(a.args, b.args);
    case ExprKind::kNeg:
    case ExprKind::kIsqrt:
    case ExprKind::kInitList:
      return allEqual(a.args, b.args);
  }
  return false;
}

bool structurallyEqual(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && a.name == b.name && a.assign == b.assign &&
         typeSpecEqual(a.type, b.type) && allEqual(a.indices, b.indices) &&
         allEqual(a.values, b.values) && allEqual(a.body, b.body);
}

bool structurallyEqual(const Program& a, const Program& b) {
  if (a.consts.size() != b.consts.size() || a.functions.size() != b.functions.size()) return false;
  for (size_t i = 0; i < a.consts.size(); ++i) {
    if (a.consts[i].name != b.consts[i].name ||
        !structurallyEqual(a.consts[i].value, b.consts[i].value)) {
      return false;
    }
  }
  for (size_t i = 0; i < a.functions.size(); ++i) {
    const auto& fa = a.functions[i];
    const auto& fb = b.functions[i];
    if (fa.name != fb.name || !typeSpecEqual(fa.ret, fb.ret) ||
        fa.params.size() != fb.params.size() || !allEqual(fa.body, fb.body)) {
      return false;
    }
    for (size_t p = 0; p < fa.params.size(); ++p) {
      if (fa.params[p].name != fb.params[p].name ||
          !typeSpecEqual(fa.params[p].type, fb.params[p].type)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace heco::dsl
