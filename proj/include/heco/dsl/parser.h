#ifndef HECO_DSL_PARSER_H_
#define HECO_DSL_PARSER_H_

#include <string>
#include <string_view>
#include <vector>

#include "heco/dsl/ast.h"
#include "heco/dsl/lexer.h"

namespace heco::dsl {

/// Recursive-descent parser for `.heco` sources.
///
///   program  := (const-decl | function)+
///   const    := "const" "int" ident "=" expr ";"
///   function := type ident "(" [param ("," param)*] ")" block
///   type     := ["secret"] "int" ("[" expr "]")*
///   stmt     := type ident ["=" expr] ";"
///             | ident ("=" | "+=" | "-=" | "*=") expr ";"
///             | ident ("[" expr "]")+ ("=" | "+=" | "-=" | "*=") expr ";"
///             | "for" ident "in" expr ".." expr (":" stmt | block)
///             | "return" expr ";"
///             | block
///   expr     := shift;  shift := sum ("<<" sum)*;  sum := term (("+"|"-") term)*
///   term     := unary (("*"|"%") unary)*;  unary := "-" unary | primary
///   primary  := int | ident ("[" expr "]")* | "(" expr ")" | "isqrt" "(" expr ")"
///             | "{" [expr ("," expr)*] "}"
///
/// Loop ranges are half-open. Throws CompileError(kParse) naming the
/// expected tokens and the location of the offending one.
Program parse(const std::vector<Token>& tokens);

/// tokenize + parse.
Program parseSource(std::string_view source);

/// Prints a program in canonical DSL syntax; parse(print(p)) is structurally
/// identical to p.
std::string printProgram(const Program& program);
std::string printExpr(const Expr& expr);

}  // namespace heco::dsl

#endif  // HECO_DSL_PARSER_H_
