#include "heco/sim/values.h"

namespace heco::sim {

NamedValues valuesFromJson(const nlohmann::json& j, uint64_t modulus) {
  if (!j.is_object()) throw CompileError(ErrorKind::kInput, "inputs must be a JSON object");
  Modulus m{modulus};
  auto element = [&m](const nlohmann::json& e, const std::string& name) {
    if (!e.is_number_integer()) {
      throw CompileError(ErrorKind::kInput, "input '" + name + "' must contain integers");
    }
    return m.reduce(e.get<int64_t>());
  };
  NamedValues out;
  for (const auto& [name, value] : j.items()) {
    if (value.is_array()) {
      std::vector<uint64_t> data;
      for (const auto& e : value) data.push_back(element(e, name));
      out[name] = PlainValue::vector(std::move(data));
    } else {
      out[name] = PlainValue::scalar(element(value, name));
    }
  }
  return out;
}

nlohmann::json valueToJson(const PlainValue& v) {
  if (v.shape == Shape::kScalar) return v.data.at(0);
  return v.data;
}

nlohmann::json valuesToJson(const NamedValues& values) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, v] : values) j[name] = valueToJson(v);
  return j;
}

std::string formatValue(const PlainValue& v, size_t max_elements) {
  if (v.shape == Shape::kScalar) return std::to_string(v.data.at(0));
  std::string out = "[";
  for (size_t i = 0; i < v.data.size(); ++i) {
    if (i == max_elements) {
      out += ", ... (" + std::to_string(v.data.size()) + " slots)";
      break;
    }
    if (i != 0) out += ", ";
    out += std::to_string(v.data[i]);
  }
  return out + "]";
}

}  // namespace heco::sim
