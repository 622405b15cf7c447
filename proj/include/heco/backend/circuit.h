#ifndef HECO_BACKEND_CIRCUIT_H_
#define HECO_BACKEND_CIRCUIT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heco/support.h"
#include "json.hpp"

namespace heco::backend {

using CircuitId = uint32_t;

enum class CircuitOpKind {
  kAddCC,
  kSubCC,
  kMulCC,
  kAddCP,
  kMulCP,
  kRotate,
  kRelinearize,
  kNegate,
  kPtConst,
};

inline constexpr CircuitOpKind kAllCircuitOpKinds[] = {
    CircuitOpKind::kAddCC,  CircuitOpKind::kSubCC,       CircuitOpKind::kMulCC,
    CircuitOpKind::kAddCP,  CircuitOpKind::kMulCP,       CircuitOpKind::kRotate,
    CircuitOpKind::kRelinearize, CircuitOpKind::kNegate, CircuitOpKind::kPtConst,
};

/// Stable key used in JSON reports and config files, e.g. "mul_cc".
const char* circuitOpKey(CircuitOpKind kind);
std::optional<CircuitOpKind> parseCircuitOpKey(std::string_view key);

/// A ciphertext input. `element` < 0 encrypts the whole parameter (a vector
/// fills all slots, a scalar goes to slot 0); otherwise only that element of
/// a vector parameter is encrypted on its own.
struct CircuitInput {
  CircuitId id = 0;
  std::string param;
  int64_t element = -1;
};

/// Ops consume ciphertexts except for the second operand of kAddCP/kMulCP,
/// which refers to a kPtConst.
struct CircuitOp {
  CircuitOpKind kind = CircuitOpKind::kAddCC;
  CircuitId id = 0;
  std::vector<CircuitId> operands;
  /// kRotate: amount in [1, n).
  int64_t rotation = 0;
  /// kPtConst: one value (broadcast to every slot) or n values.
  std::vector<uint64_t> plaintext;
};

/// Flat DAG in topological order. Input ids come first, then op ids in order.
struct CircuitFunction {
  std::string name;
  int64_t slots = 1;
  uint64_t modulus = kDefaultModulus;
  Shape result_shape = Shape::kScalar;
  /// Naive circuits keep one element per ciphertext; a vector result is then
  /// spread across one output per element (slot 0 of each).
  bool per_element = false;
  std::vector<CircuitInput> inputs;
  std::vector<CircuitOp> ops;
  std::vector<CircuitId> outputs;

  CircuitId idBound() const { return static_cast<CircuitId>(inputs.size() + ops.size()); }
  /// The op defining `id`, or nullptr for inputs.
  const CircuitOp* def(CircuitId id) const;
  bool isPlaintext(CircuitId id) const;
};

nlohmann::json circuitToJson(const CircuitFunction& c);

/// Checks topological order, operand kinds and rotation ranges. Returns the
/// violations.
std::vector<std::string> verifyCircuit(const CircuitFunction& c);

}  // namespace heco::backend

#endif  // HECO_BACKEND_CIRCUIT_H_
