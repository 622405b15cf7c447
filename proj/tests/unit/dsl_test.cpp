#include <gtest/gtest.h>

#include <algorithm>

#include "heco/dsl/lexer.h"
#include "heco/dsl/lower.h"
#include "heco/dsl/parser.h"
#include "heco/dsl/typecheck.h"
#include "heco/ir/verifier.h"
#include "test_support.h"

namespace heco::dsl {
namespace {

std::vector<std::pair<TokenKind, std::string>> kindsAndTexts(std::string_view source) {
  std::vector<std::pair<TokenKind, std::string>> out;
  for (const auto& t : tokenize(source)) out.emplace_back(t.kind, t.text);
  return out;
}

ErrorKind errorKindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const CompileError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no CompileError thrown";
  return ErrorKind::kInput;
}

size_t countOps(const ir::IrFunction& f, ir::OpKind kind) {
  return static_cast<size_t>(
      std::count_if(f.ops.begin(), f.ops.end(), [kind](const ir::Op& op) { return op.kind == kind; }));
}

const char* kSharpening = R"(
const int N = 16;
const int n = isqrt(N);
secret int[N] sharpening(secret int[N] img) {
  secret int[N] img2 = img;
  int[3][3] w = {{1, 1, 1}, {1, -8, 1}, {1, 1, 1}};
  for x in 0..n {
    for y in 0..n {
      secret int t = 0;
      for j in -1..2 {
        for i in -1..2 {
          t += w[i + 1][j + 1] * img[((x + i) * n + (y + j)) % N];
        }
      }
      img2[(x * n + y) % N] = 2 * img[(x * n + y) % N] - t;
    }
  }
  return img2;
}
)";

TEST(Lexer, SimpleExpression) {
  auto tokens = kindsAndTexts("x + 1");
  std::vector<std::pair<TokenKind, std::string>> expected = {
      {TokenKind::kIdentifier, "x"},
      {TokenKind::kOperator, "+"},
      {TokenKind::kInteger, "1"},
      {TokenKind::kEnd, ""}};
  EXPECT_EQ(tokens, expected);
}

TEST(Lexer, NegativeRotation) {
  auto tokens = kindsAndTexts("img << -n-1");
  std::vector<std::pair<TokenKind, std::string>> expected = {
      {TokenKind::kIdentifier, "img"}, {TokenKind::kOperator, "<<"},
      {TokenKind::kOperator, "-"},     {TokenKind::kIdentifier, "n"},
      {TokenKind::kOperator, "-"},     {TokenKind::kInteger, "1"},
      {TokenKind::kEnd, ""}};
  EXPECT_EQ(tokens, expected);
}

TEST(Lexer, MalformedLiteralReportsColumn) {
  try {
    tokenize("3a");
    FAIL() << "expected a lexical error";
  } catch (const CompileError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLex);
    EXPECT_EQ(e.loc().line, 1);
    EXPECT_EQ(e.loc().column, 1);
  }
}

TEST(Lexer, IllegalCharacter) {
  try {
    tokenize("x\n  $");
    FAIL() << "expected a lexical error";
  } catch (const CompileError& e) {
    EXPECT_EQ(e.loc().line, 2);
    EXPECT_EQ(e.loc().column, 3);
  }
}

TEST(Lexer, SpansAreNonOverlappingAndReproduceSource) {
  std::string source = "secret int f(secret int[4] x) {\n  return x[1] << 2; // c\n}\n";
  auto tokens = tokenize(source);
  size_t end = 0;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::kEnd) break;
    ASSERT_FALSE(t.text.empty());
    ASSERT_GE(t.offset, end);
    EXPECT_EQ(source.substr(t.offset, t.text.size()), t.text);
    end = t.offset + t.text.size();
  }
}

TEST(Parser, MultiplicationBindsTighter) {
  Program p = parseSource("secret int f(secret int a, secret int b, secret int c) { return a+b*c; }");
  const Expr& e = p.functions.at(0).body.at(0).values.at(0);
  ASSERT_EQ(e.kind, ExprKind::kBinary);
  EXPECT_EQ(e.op, BinOp::kAdd);
  EXPECT_EQ(e.args[0].name, "a");
  ASSERT_EQ(e.args[1].kind, ExprKind::kBinary);
  EXPECT_EQ(e.args[1].op, BinOp::kMul);
}

TEST(Parser, RotationBindsLoosest) {
  Program p = parseSource("secret int[4] f(secret int[4] v) { return v << 1 + 2; }");
  const Expr& e = p.functions.at(0).body.at(0).values.at(0);
  EXPECT_EQ(e.op, BinOp::kRotate);
  EXPECT_EQ(e.args[1].op, BinOp::kAdd);
}

TEST(Parser, SharpeningNestsLoopsAndIndexes) {
  Program p = parseSource(kSharpening);
  const Function& f = p.functions.at(0);
  const Stmt* loop = nullptr;
  for (const auto& s : f.body) {
    if (s.kind == StmtKind::kFor) loop = &s;
  }
  ASSERT_NE(loop, nullptr);
  EXPECT_EQ(loop->name, "x");
  const Stmt& inner = loop->body.at(0);
  EXPECT_EQ(inner.kind, StmtKind::kFor);
  EXPECT_EQ(inner.name, "y");
  Program probe = parseSource(
      "secret int g(secret int[16] img) { return img[((x + i) * n + (y + j)) % N]; }");
  const Expr& access = probe.functions[0].body[0].values[0];
  EXPECT_NE(printProgram(p).find(printExpr(access)), std::string::npos);
}

TEST(Parser, MissingLoopBodyIsSyntaxError) {
  try {
    parseSource("secret int f(secret int x) { for x in 0..n for }");
    FAIL() << "expected a syntax error";
  } catch (const CompileError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(e.message().find("expected"), std::string::npos);
    EXPECT_GT(e.loc().column, 0);
  }
}

TEST(Parser, CorpusRoundTrip) {
  for (const auto& entry : driver::corpus()) {
    SCOPED_TRACE(entry.name);
    Program p = parseSource(driver::readFile(driver::corpusPath(entry.name)));
    Program again = parseSource(printProgram(p));
    EXPECT_TRUE(structurallyEqual(p, again));
  }
}

const Expr& returnedExpr(const TypedProgram& t) { return t.functions.at(0).fn.body.back().values.at(0); }

TEST(TypeCheck, SecrecyJoin) {
  auto t = checkTypes(parseSource("secret int f(secret int[16] x) { return x[3] + 1; }"));
  EXPECT_EQ(returnedExpr(t).type, DslType::scalar(true));
}

TEST(TypeCheck, RotationOfVector) {
  auto t = checkTypes(parseSource("secret int[16] f(secret int[16] x) { return x << 2; }"));
  EXPECT_EQ(returnedExpr(t).type, DslType::vector(true, 16));
}

TEST(TypeCheck, RotationOfScalarRejected) {
  EXPECT_EQ(errorKindOf([] {
              checkTypes(parseSource("secret int f(secret int y) { return y << 1; }"));
            }),
            ErrorKind::kType);
}

TEST(TypeCheck, SecretIntoPlainRejected) {
  EXPECT_EQ(errorKindOf([] {
              checkTypes(parseSource(
                  "secret int f(secret int y) { int p = 0; p = y; return y; }"));
            }),
            ErrorKind::kType);
}

TEST(TypeCheck, MismatchedLengthsRejected) {
  EXPECT_EQ(errorKindOf([] {
              checkTypes(parseSource(
                  "secret int f(secret int[4] x, secret int[8] y) { return x[0] + y[0]; }"));
            }),
            ErrorKind::kType);
}

TEST(TypeCheck, NonPowerOfTwoRejected) {
  EXPECT_EQ(errorKindOf([] {
              checkTypes(parseSource("secret int f(secret int[6] x) { return x[0]; }"));
            }),
            ErrorKind::kType);
}

TEST(TypeCheck, ConstantOverride) {
  CheckOptions options;
  options.overrides["N"] = 64;
  auto t = checkTypes(parseSource(kSharpening), options);
  EXPECT_EQ(t.functions.at(0).slots, 64);
  EXPECT_EQ(t.constants.at("n"), 8);
}

TEST(Lowering, UnrolledElementwiseAdd) {
  auto front = testing::frontend(R"(
secret int[2] f(secret int[2] x, secret int[2] y) {
  secret int[2] z;
  for i in 0..2 { z[i] = x[i] + y[i]; }
  return z;
})");
  EXPECT_EQ(countOps(front.ir, ir::OpKind::kExtract), 4u);
  EXPECT_EQ(countOps(front.ir, ir::OpKind::kAdd), 2u);
  EXPECT_EQ(countOps(front.ir, ir::OpKind::kInsert), 2u);
  EXPECT_TRUE(ir::verify(front.ir).empty());
}

TEST(Lowering, SharpeningGroupCount) {
  // Independent count: every pixel (16) reads 9 neighbours and multiplies
  // each by a kernel weight, plus one 2*img[p] product per pixel.
  auto front = testing::frontend(kSharpening);
  size_t expected_muls = 0;
  for (int p = 0; p < 16; ++p) expected_muls += 9 + 1;
  EXPECT_EQ(countOps(front.ir, ir::OpKind::kMul), expected_muls);
  EXPECT_EQ(countOps(front.ir, ir::OpKind::kInsert), 16u);
}

TEST(Lowering, SecretLoopBoundRejected) {
  EXPECT_EQ(errorKindOf([] { testing::frontend(testing::dataFile("secret-bound.heco")); }),
            ErrorKind::kUnroll);
}

TEST(Lowering, NegativeIndicesWrap) {
  auto front = testing::frontend(R"(
secret int f(secret int[8] x) { return x[(0 - 1) % 8]; })");
  ASSERT_EQ(front.ir.ops.size(), 1u);
  EXPECT_EQ(front.ir.ops[0].kind, ir::OpKind::kExtract);
  EXPECT_EQ(front.ir.ops[0].attr, 7);
}

TEST(Lowering, CorpusIsStraightLineAndInRange) {
  for (const auto& entry : driver::corpus()) {
    SCOPED_TRACE(entry.name);
    auto front = testing::corpusFrontend(entry.name, 16);
    EXPECT_TRUE(ir::verify(front.ir).empty());
    for (const auto& op : front.ir.ops) {
      if (op.kind == ir::OpKind::kExtract || op.kind == ir::OpKind::kInsert) {
        EXPECT_GE(op.attr, 0);
        EXPECT_LT(op.attr, front.ir.slots);
      }
    }
  }
}

}  // namespace
}  // namespace heco::dsl
