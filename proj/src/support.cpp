#include "heco/support.h"

#include <utility>

namespace heco {

const char* errorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kLex: return "lexical error";
    case ErrorKind::kParse: return "syntax error";
    case ErrorKind::kType: return "type error";
    case ErrorKind::kUnroll: return "unroll error";
    case ErrorKind::kIrParse: return "IR parse error";
    case ErrorKind::kPipeline: return "pipeline error";
    case ErrorKind::kParams: return "parameter error";
    case ErrorKind::kInput: return "input error";
  }
  return "error";
}

namespace {
std::string formatError(ErrorKind kind, const std::string& message, SourceLoc loc) {
  std::string out = errorKindName(kind);
  if (loc.line > 0) {
    out += " at " + std::to_string(loc.line) + ":" + std::to_string(loc.column);
  }
  out += ": " + message;
  return out;
}
}  // namespace

CompileError::CompileError(ErrorKind kind, std::string message, SourceLoc loc)
    : std::runtime_error(formatError(kind, message, loc)),
      kind_(kind),
      loc_(loc),
      message_(std::move(message)) {}

int log2Floor(uint64_t v) {
  int r = -1;
  while (v != 0) {
    v >>= 1;
    ++r;
  }
  return r;
}

bool isValidPlainModulus(uint64_t t) {
  if (t < 3 || t >= (uint64_t{1} << 31) || t % 2 == 0) return false;
  for (uint64_t d = 3; d * d <= t; d += 2) {
    if (t % d == 0) return false;
  }
  return true;
}

}  // namespace heco
