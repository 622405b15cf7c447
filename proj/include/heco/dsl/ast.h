#ifndef HECO_DSL_AST_H_
#define HECO_DSL_AST_H_

#include <cstdint>
#include <string>
#include <vector>

#include "heco/support.h"

namespace heco::dsl {

enum class TypeShape { kScalar, kVector, kTable };

/// Resolved type of a DSL value. Vectors are one-dimensional; tables are
/// plaintext arrays with two or more dimensions and only ever hold
/// compile-time constants.
struct DslType {
  bool secret = false;
  TypeShape shape = TypeShape::kScalar;
  std::vector<int64_t> dims;

  static DslType scalar(bool secret) { return {secret, TypeShape::kScalar, {}}; }
  static DslType vector(bool secret, int64_t length) { return {secret, TypeShape::kVector, {length}}; }

  bool isScalar() const { return shape == TypeShape::kScalar; }
  bool isVector() const { return shape == TypeShape::kVector; }
  int64_t length() const { return dims.empty() ? 1 : dims.front(); }
  int64_t elementCount() const;

  bool operator==(const DslType&) const = default;
};

std::string toString(const DslType& type);

enum class ExprKind { kIntLit, kVar, kIndex, kBinary, kNeg, kIsqrt, kInitList };
enum class BinOp { kAdd, kSub, kMul, kMod, kRotate };

const char* binOpSpelling(BinOp op);

struct Expr {
  ExprKind kind = ExprKind::kIntLit;
  SourceLoc loc;
  int64_t value = 0;       // kIntLit
  std::string name;        // kVar, kIndex
  BinOp op = BinOp::kAdd;  // kBinary
  /// Operands (kBinary: lhs, rhs; kNeg/kIsqrt: one), indices (kIndex) or
  /// elements (kInitList).
  std::vector<Expr> args;
  /// Filled in by checkTypes.
  DslType type;
};

struct TypeSpec {
  bool secret = false;
  std::vector<Expr> dims;
  SourceLoc loc;
  DslType resolved;  // filled in by checkTypes
};

enum class StmtKind { kDecl, kAssign, kIndexAssign, kFor, kReturn, kBlock };
enum class AssignOp { kSet, kAdd, kSub, kMul };

const char* assignOpSpelling(AssignOp op);

struct Stmt {
  StmtKind kind = StmtKind::kBlock;
  SourceLoc loc;
  TypeSpec type;                   // kDecl
  std::string name;                // kDecl, kAssign, kIndexAssign, kFor (loop variable)
  AssignOp assign = AssignOp::kSet;
  std::vector<Expr> indices;       // kIndexAssign
  std::vector<Expr> values;        // kDecl init (0 or 1), kAssign/kIndexAssign/kReturn value, kFor bounds
  std::vector<Stmt> body;          // kFor, kBlock
};

struct Param {
  TypeSpec type;
  std::string name;
  SourceLoc loc;
};

struct Function {
  TypeSpec ret;
  std::string name;
  std::vector<Param> params;
  std::vector<Stmt> body;
  SourceLoc loc;
};

struct ConstDecl {
  std::string name;
  Expr value;
  SourceLoc loc;
};

struct Program {
  std::vector<ConstDecl> consts;
  std::vector<Function> functions;
};

/// Structural equality ignoring source locations and type annotations.
bool structurallyEqual(const Expr& a, const Expr& b);
bool structurallyEqual(const Stmt& a, const Stmt& b);
bool structurallyEqual(const Program& a, const Program& b);

}  // namespace heco::dsl

#endif  // HECO_DSL_AST_H_
