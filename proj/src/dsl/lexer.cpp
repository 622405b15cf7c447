#include "heco/dsl/lexer.h"

#include <array>
#include <cctype>

namespace heco::dsl {

namespace {

constexpr std::array<std::string_view, 7> kKeywords = {"secret", "int", "for", "in",
                                                       "return", "const", "isqrt"};

bool isKeyword(std::string_view s) {
  for (auto k : kKeywords) {
    if (k == s) return true;
  }
  return false;
}

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

const char* tokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kIdentifier: return "identifier";
    case TokenKind::kKeyword: return "keyword";
    case TokenKind::kInteger: return "integer";
    case TokenKind::kPunctuation: return "punctuation";
    case TokenKind::kOperator: return "operator";
    case TokenKind::kEnd: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  size_t pos = 0;
  int line = 1;
  int column = 1;

  auto advance = [&](size_t count) {
    for (size_t k = 0; k < count; ++k) {
      if (source[pos] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++pos;
    }
  };
  auto emit = [&](TokenKind kind, size_t length) {
    tokens.push_back(Token{kind, std::string(source.substr(pos, length)), {line, column}, pos});
    advance(length);
  };

  while (pos < source.size()) {
    char c = source[pos];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && pos + 1 < source.size() && source[pos + 1] == '/') {
      while (pos < source.size() && source[pos] != '\n') advance(1);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t end = pos;
      while (end < source.size() && std::isdigit(static_cast<unsigned char>(source[end]))) ++end;
      if (end < source.size() && isIdentChar(source[end])) {
        throw CompileError(ErrorKind::kLex,
                           "malformed integer literal '" +
                               std::string(source.substr(pos, end + 1 - pos)) + "'",
                           {line, column});
      }
      emit(TokenKind::kInteger, end - pos);
      continue;
    }
    if (isIdentStart(c)) {
      size_t end = pos;
      while (end < source.size() && isIdentChar(source[end])) ++end;
      auto word = source.substr(pos, end - pos);
      emit(isKeyword(word) ? TokenKind::kKeyword : TokenKind::kIdentifier, end - pos);
      continue;
    }
    auto next = pos + 1 < source.size() ? source[pos + 1] : '\0';
    if (c == '<' && next == '<') {
      emit(TokenKind::kOperator, 2);
      continue;
    }
    if (c == '.' && next == '.') {
      emit(TokenKind::kPunctuation, 2);
      continue;
    }
    if ((c == '+' || c == '-' || c == '*') && next == '=') {
      emit(TokenKind::kOperator, 2);
      continue;
    }
    switch (c) {
      case '+':
      case '-':
      case '*':
      case '%':
      case '=':
        emit(TokenKind::kOperator, 1);
        continue;
      case '(':
      case ')':
      case '[':
      case ']':
      case '{':
      case '}':
      case ',':
      case ';':
      case ':':
        emit(TokenKind::kPunctuation, 1);
        continue;
      default:
        break;
    }
    std::string shown(1, c);
    if (static_cast<unsigned char>(c) >= 0x80) shown = "non-ASCII byte";
    throw CompileError(ErrorKind::kLex, "illegal character '" + shown + "'", {line, column});
  }
  tokens.push_back(Token{TokenKind::kEnd, "", {line, column}, pos});
  return tokens;
}

}  // namespace heco::dsl
