#ifndef HECO_BACKEND_CONFIG_H_
#define HECO_BACKEND_CONFIG_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "heco/backend/circuit.h"
#include "json.hpp"

namespace heco::backend {

/// Abstract noise growth per operation. A fresh ciphertext starts at `fresh`;
/// plaintext constants carry no noise.
struct NoiseModel {
  int64_t fresh = 1;
  int64_t add_cc = 1;  // also ct-ct sub: max(a, b) + add_cc
  int64_t add_cp = 1;
  int64_t mul_cc = 10;  // a + b + mul_cc
  int64_t mul_cp = 5;
  int64_t rotate = 1;
  int64_t relinearize = 2;
  int64_t negate = 0;
};

struct ParamRow {
  std::string name;
  int64_t budget = 0;
};

/// Weight table, parameter table and noise model. Loaded from JSON:
///
///   {"weights": {"mul_cc": 30, "rotate": 25, ...},
///    "parameters": [{"name": "SMALL", "budget": 40}, ...],
///    "noise": {"fresh": 1, "add_cc": 1, "add_cp": 1, "mul_cc": 10,
///              "mul_cp": 5, "rotate": 1, "relinearize": 2, "negate": 0}}
///
/// Missing keys keep their defaults. Parameter rows must be listed by
/// increasing budget.
struct BackendConfig {
  std::array<int64_t, std::size(kAllCircuitOpKinds)> weights{1, 1, 30, 1, 8, 25, 10, 1, 0};
  std::vector<ParamRow> parameters{{"SMALL", 40}, {"MEDIUM", 100}, {"LARGE", 220}, {"XLARGE", 460}};
  NoiseModel noise;

  int64_t weight(CircuitOpKind k) const { return weights[static_cast<size_t>(k)]; }
  const ParamRow& row(const std::string& name) const;

  static BackendConfig fromJson(const nlohmann::json& j);
  static BackendConfig loadFile(const std::string& path);
  /// Reads the file named by HECO_CONFIG when set, else the defaults.
  static BackendConfig fromEnvironment();
  nlohmann::json toJson() const;
};

}  // namespace heco::backend

#endif  // HECO_BACKEND_CONFIG_H_
