#include "heco/dsl/parser.h"

#include <charconv>
#include <initializer_list>
#include <optional>
#include <sstream>

namespace heco::dsl {

namespace {

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

  Program parseProgram() {
    Program program;
    while (!atEnd()) {
      if (peek().is(TokenKind::kKeyword, "const")) {
        program.consts.push_back(parseConst());
      } else if (startsType()) {
        program.functions.push_back(parseFunction());
      } else {
        fail({"'const'", "'secret'", "'int'"});
      }
    }
    if (program.functions.empty()) {
      throw CompileError(ErrorKind::kParse, "program must contain at least one function",
                         peek().loc);
    }
    return program;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool atEnd() const { return peek().kind == TokenKind::kEnd; }
  const Token& take() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  bool check(std::string_view text) const {
    const Token& t = peek();
    return t.kind != TokenKind::kEnd && t.kind != TokenKind::kIdentifier &&
           t.kind != TokenKind::kInteger && t.text == text;
  }
  bool accept(std::string_view text) {
    if (!check(text)) return false;
    take();
    return true;
  }

  [[noreturn]] void fail(std::initializer_list<std::string_view> expected) const {
    std::string message = "expected ";
    if (expected.size() > 1) message += "one of ";
    bool first = true;
    for (auto e : expected) {
      if (!first) message += ", ";
      message += e;
      first = false;
    }
    const Token& t = peek();
    message += ", found ";
    message += t.kind == TokenKind::kEnd ? std::string("end of input") : "'" + t.text + "'";
    throw CompileError(ErrorKind::kParse, message, t.loc);
  }

  const Token& expect(std::string_view text) {
    if (!check(text)) {
      std::string quoted = "'" + std::string(text) + "'";
      fail({quoted});
    }
    return take();
  }

  const Token& expectIdentifier() {
    if (peek().kind != TokenKind::kIdentifier) fail({"identifier"});
    return take();
  }

  bool startsType() const {
    return peek().is(TokenKind::kKeyword, "secret") || peek().is(TokenKind::kKeyword, "int");
  }

  TypeSpec parseType() {
    TypeSpec type;
    type.loc = peek().loc;
    if (accept("secret")) type.secret = true;
    expect("int");
    while (accept("[")) {
      type.dims.push_back(parseExpr());
      expect("]");
    }
    return type;
  }

  ConstDecl parseConst() {
    ConstDecl decl;
    decl.loc = expect("const").loc;
    expect("int");
    decl.name = expectIdentifier().text;
    expect("=");
    decl.value = parseExpr();
    expect(";");
    return decl;
  }

  Function parseFunction() {
    Function fn;
    fn.loc = peek().loc;
    fn.ret = parseType();
    fn.name = expectIdentifier().text;
    expect("(");
    if (!check(")")) {
      do {
        Param param;
        param.loc = peek().loc;
        param.type = parseType();
        param.name = expectIdentifier().text;
        fn.params.push_back(std::move(param));
      } while (accept(","));
    }
    expect(")");
    fn.body = parseBlock();
    return fn;
  }

  std::vector<Stmt> parseBlock() {
    expect("{");
    std::vector<Stmt> body;
    while (!check("}")) {
      if (atEnd()) fail({"'}'"});
      body.push_back(parseStmt());
    }
    expect("}");
    return body;
  }

  static std::optional<AssignOp> assignOpFor(const Token& t) {
    if (t.kind != TokenKind::kOperator) return std::nullopt;
    if (t.text == "=") return AssignOp::kSet;
    if (t.text == "+=") return AssignOp::kAdd;
    if (t.text == "-=") return AssignOp::kSub;
    if (t.text == "*=") return AssignOp::kMul;
    return std::nullopt;
  }

  Stmt parseStmt() {
    Stmt stmt;
    stmt.loc = peek().loc;
    if (startsType()) {
      stmt.kind = StmtKind::kDecl;
      stmt.type = parseType();
      stmt.name = expectIdentifier().text;
      if (accept("=")) stmt.values.push_back(parseExpr());
      expect(";");
      return stmt;
    }
    if (accept("for")) {
      stmt.kind = StmtKind::kFor;
      stmt.name = expectIdentifier().text;
      expect("in");
      stmt.values.push_back(parseExpr());
      expect("..");
      stmt.values.push_back(parseExpr());
      if (accept(":")) {
        if (check("{")) {
          stmt.body = parseBlock();
        } else {
          if (atEnd() || check("}")) fail({"statement"});
          stmt.body.push_back(parseStmt());
        }
      } else if (check("{")) {
        stmt.body = parseBlock();
      } else {
        fail({"':'", "'{'"});
      }
      return stmt;
    }
    if (accept("return")) {
      stmt.kind = StmtKind::kReturn;
      stmt.values.push_back(parseExpr());
      expect(";");
      return stmt;
    }
    if (check("{")) {
      stmt.kind = StmtKind::kBlock;
      stmt.body = parseBlock();
      return stmt;
    }
    if (peek().kind == TokenKind::kIdentifier) {
      stmt.name = take().text;
      stmt.kind = StmtKind::kAssign;
      while (accept("[")) {
        stmt.kind = StmtKind::kIndexAssign;
        stmt.indices.push_back(parseExpr());
        expect("]");
      }
      auto op = assignOpFor(peek());
      if (!op) fail({"'='", "'+='", "'-='", "'*='"});
      take();
      stmt.assign = *op;
      stmt.values.push_back(parseExpr());
      expect(";");
      return stmt;
    }
    fail({"statement"});
  }

  Expr makeBinary(BinOp op, Expr lhs, Expr rhs, SourceLoc loc) {
    Expr e;
    e.kind = ExprKind::kBinary;
    e.op = op;
    e.loc = loc;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  Expr parseExpr() { return parseShift(); }

  Expr parseShift() {
    Expr lhs = parseSum();
    while (check("<<")) {
      auto loc = take().loc;
      lhs = makeBinary(BinOp::kRotate, std::move(lhs), parseSum(), loc);
    }
    return lhs;
  }

  Expr parseSum() {
    Expr lhs = parseTerm();
    while (check("+") || check("-")) {
      const Token& op = take();
      BinOp kind = op.text == "+" ? BinOp::kAdd : BinOp::kSub;
      lhs = makeBinary(kind, std::move(lhs), parseTerm(), op.loc);
    }
    return lhs;
  }

  Expr parseTerm() {
    Expr lhs = parseUnary();
    while (check("*") || check("%")) {
      const Token& op = take();
      BinOp kind = op.text == "*" ? BinOp::kMul : BinOp::kMod;
      lhs = makeBinary(kind, std::move(lhs), parseUnary(), op.loc);
    }
    return lhs;
  }

  Expr parseUnary() {
    if (check("-")) {
      Expr e;
      e.kind = ExprKind::kNeg;
      e.loc = take().loc;
      e.args.push_back(parseUnary());
      return e;
    }
    return parsePrimary();
  }

  Expr parsePrimary() {
    const Token& t = peek();
    Expr e;
    e.loc = t.loc;
    if (t.kind == TokenKind::kInteger) {
      take();
      e.kind = ExprKind::kIntLit;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), e.value);
      if (ec != std::errc()) {
        throw CompileError(ErrorKind::kParse, "integer literal out of range", t.loc);
      }
      return e;
    }
    if (t.kind == TokenKind::kIdentifier) {
      take();
      e.kind = ExprKind::kVar;
      e.name = t.text;
      while (accept("[")) {
        e.kind = ExprKind::kIndex;
        e.args.push_back(parseExpr());
        expect("]");
      }
      return e;
    }
    if (accept("(")) {
      Expr inner = parseExpr();
      expect(")");
      return inner;
    }
    if (accept("isqrt")) {
      e.kind = ExprKind::kIsqrt;
      expect("(");
      e.args.push_back(parseExpr());
      expect(")");
      return e;
    }
    if (accept("{")) {
      e.kind = ExprKind::kInitList;
      if (!check("}")) {
        do {
          e.args.push_back(parseExpr());
        } while (accept(","));
      }
      expect("}");
      return e;
    }
    fail({"integer", "identifier", "'('", "'-'", "'{'"});
  }

  const std::vector<Token>& tokens_;
  size_t pos_ = 0;
};

void printTypeSpec(std::ostringstream& out, const TypeSpec& type) {
  if (type.secret) out << "secret ";
  out << "int";
  for (const auto& d : type.dims) out << "[" << printExpr(d) << "]";
}

void printStmt(std::ostringstream& out, const Stmt& stmt, int indent);

void printBody(std::ostringstream& out, const std::vector<Stmt>& body, int indent) {
  out << "{\n";
  for (const auto& s : body) printStmt(out, s, indent + 1);
  out << std::string(static_cast<size_t>(indent) * 2, ' ') << "}\n";
}

void printStmt(std::ostringstream& out, const Stmt& stmt, int indent) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  out << pad;
  switch (stmt.kind) {
    case StmtKind::kDecl:
      printTypeSpec(out, stmt.type);
      out << " " << stmt.name;
      if (!stmt.values.empty()) out << " = " << printExpr(stmt.values[0]);
      out << ";\n";
      break;
    case StmtKind::kAssign:
      out << stmt.name << " " << assignOpSpelling(stmt.assign) << " " << printExpr(stmt.values[0])
          << ";\n";
      break;
    case StmtKind::kIndexAssign:
      out << stmt.name;
      for (const auto& i : stmt.indices) out << "[" << printExpr(i) << "]";
      out << " " << assignOpSpelling(stmt.assign) << " " << printExpr(stmt.values[0]) << ";\n";
      break;
    case StmtKind::kFor:
      out << "for " << stmt.name << " in " << printExpr(stmt.values[0]) << ".."
          << printExpr(stmt.values[1]) << " ";
      printBody(out, stmt.body, indent);
      break;
    case StmtKind::kReturn:
      out << "return " << printExpr(stmt.values[0]) << ";\n";
      break;
    case StmtKind::kBlock:
      printBody(out, stmt.body, indent);
      break;
  }
}

}  // namespace

Program parse(const std::vector<Token>& tokens) {
  if (tokens.empty() || tokens.back().kind != TokenKind::kEnd) {
    throw CompileError(ErrorKind::kParse, "token stream is not terminated");
  }
  return Parser(tokens).parseProgram();
}

Program parseSource(std::string_view source) { return parse(tokenize(source)); }

std::string printExpr(const Expr& expr) {
  auto operand = [](const Expr& e) {
    std::string s = printExpr(e);
    if (e.kind == ExprKind::kBinary) return "(" + s + ")";
    return s;
  };
  switch (expr.kind) {
    case ExprKind::kIntLit:
      return std::to_string(expr.value);
    case ExprKind::kVar:
      return expr.name;
    case ExprKind::kIndex: {
      std::string s = expr.name;
      for (const auto& i : expr.args) s += "[" + printExpr(i) + "]";
      return s;
    }
    case ExprKind::kBinary:
      return operand(expr.args[0]) + " " + binOpSpelling(expr.op) + " " + operand(expr.args[1]);
    case ExprKind::kNeg:
      return "-" + operand(expr.args[0]);
    case ExprKind::kIsqrt:
      return "isqrt(" + printExpr(expr.args[0]) + ")";
    case ExprKind::kInitList: {
      std::string s = "{";
      for (size_t i = 0; i < expr.args.size(); ++i) {
        if (i) s += ", ";
        s += printExpr(expr.args[i]);
      }
      return s + "}";
    }
  }
  return "";
}

std::string printProgram(const Program& program) {
  std::ostringstream out;
  for (const auto& c : program.consts) {
    out << "const int " << c.name << " = " << printExpr(c.value) << ";\n";
  }
  for (const auto& fn : program.functions) {
    if (out.tellp() > 0) out << "\n";
    printTypeSpec(out, fn.ret);
    out << " " << fn.name << "(";
    for (size_t i = 0; i < fn.params.size(); ++i) {
      if (i) out << ", ";
      printTypeSpec(out, fn.params[i].type);
      out << " " << fn.params[i].name;
    }
    out << ") ";
    printBody(out, fn.body, 0);
  }
  return out.str();
}

}  // namespace heco::dsl
