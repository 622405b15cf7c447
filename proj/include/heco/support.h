#ifndef HECO_SUPPORT_H_
#define HECO_SUPPORT_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace heco {

/// Default BFV-style plaintext modulus (a prime, 2^16 + 1).
inline constexpr uint64_t kDefaultModulus = 65537;

/// Source location for diagnostics. Lines and columns are 1-based; 0 means
/// "no location".
struct SourceLoc {
  int line = 0;
  int column = 0;
};

enum class ErrorKind { kLex, kParse, kType, kUnroll, kIrParse, kPipeline, kParams, kInput };

const char* errorKindName(ErrorKind kind);

/// Every user-facing failure in the toolchain is reported through this type.
class CompileError : public std::runtime_error {
 public:
  CompileError(ErrorKind kind, std::string message, SourceLoc loc = {});

  ErrorKind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }
  const std::string& message() const { return message_; }

 private:
  ErrorKind kind_;
  SourceLoc loc_;
  std::string message_;
};

/// Whether a value is a single scalar or a full slot vector.
enum class Shape { kScalar, kVector };

inline bool isPowerOfTwo(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

/// floor(log2(v)) for v > 0.
int log2Floor(uint64_t v);

/// Mathematical modulo: result always in [0, m).
inline int64_t floorMod(int64_t a, int64_t m) {
  int64_t r = a % m;
  return r < 0 ? r + m : r;
}

/// Arithmetic in Z_t. Operands must already be reduced.
struct Modulus {
  uint64_t t = kDefaultModulus;

  uint64_t reduce(int64_t v) const { return static_cast<uint64_t>(floorMod(v, static_cast<int64_t>(t))); }
  uint64_t add(uint64_t a, uint64_t b) const { return (a + b) % t; }
  uint64_t sub(uint64_t a, uint64_t b) const { return (a + t - b) % t; }
  uint64_t mul(uint64_t a, uint64_t b) const { return (a * b) % t; }
  uint64_t neg(uint64_t a) const { return a == 0 ? 0 : t - a; }
};

/// Plaintext moduli must be odd primes below 2^31 so products fit in 64 bits.
bool isValidPlainModulus(uint64_t t);

}  // namespace heco

#endif  // HECO_SUPPORT_H_
