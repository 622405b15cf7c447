#ifndef HECO_DSL_LEXER_H_
#define HECO_DSL_LEXER_H_

#include <string>
#include <string_view>
#include <vector>

#include "heco/support.h"

namespace heco::dsl {

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kInteger,
  kPunctuation,
  kOperator,
  kEnd,
};

struct Token {
  TokenKind kind;
  std::string text;
  SourceLoc loc;
  /// Byte offset of the first character in the source.
  size_t offset = 0;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
};

/// Splits DSL source into tokens. The returned sequence always ends with a
/// kEnd token. Throws CompileError(kLex) on illegal characters and malformed
/// integer literals such as `3a`.
std::vector<Token> tokenize(std::string_view source);

const char* tokenKindName(TokenKind kind);

}  // namespace heco::dsl

#endif  // HECO_DSL_LEXER_H_
