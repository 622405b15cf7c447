#ifndef HECO_SIM_VALUES_H_
#define HECO_SIM_VALUES_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heco/support.h"
#include "json.hpp"

namespace heco::sim {

/// A plaintext scalar or vector with entries in [0, t).
struct PlainValue {
  Shape shape = Shape::kScalar;
  std::vector<uint64_t> data;

  static PlainValue scalar(uint64_t v) { return {Shape::kScalar, {v}}; }
  static PlainValue vector(std::vector<uint64_t> v) { return {Shape::kVector, std::move(v)}; }

  bool operator==(const PlainValue&) const = default;
};

using NamedValues = std::map<std::string, PlainValue>;

/// Reads {name: int | [int, ...]}; integers may be negative and are reduced
/// mod t. Throws CompileError(kInput) on anything else.
NamedValues valuesFromJson(const nlohmann::json& j, uint64_t modulus);
nlohmann::json valueToJson(const PlainValue& v);
nlohmann::json valuesToJson(const NamedValues& values);

std::string formatValue(const PlainValue& v, size_t max_elements = 16);

}  // namespace heco::sim

#endif  // HECO_SIM_VALUES_H_
