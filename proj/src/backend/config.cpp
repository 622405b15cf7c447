#include "heco/backend/config.h"

#include <cstdlib>
#include <fstream>

namespace heco::backend {

const ParamRow& BackendConfig::row(const std::string& name) const {
  for (const auto& r : parameters) {
    if (r.name == name) return r;
  }
  throw CompileError(ErrorKind::kParams, "unknown parameter set '" + name + "'");
}

BackendConfig BackendConfig::fromJson(const nlohmann::json& j) {
  BackendConfig c;
  try {
    if (j.contains("weights")) {
      for (const auto& [key, value] : j.at("weights").items()) {
        auto kind = parseCircuitOpKey(key);
        if (!kind) throw CompileError(ErrorKind::kInput, "unknown weight key '" + key + "'");
        c.weights[static_cast<size_t>(*kind)] = value.get<int64_t>();
      }
    }
    if (j.contains("parameters")) {
      c.parameters.clear();
      for (const auto& row : j.at("parameters")) {
        c.parameters.push_back({row.at("name").get<std::string>(), row.at("budget").get<int64_t>()});
      }
      if (c.parameters.empty()) throw CompileError(ErrorKind::kInput, "parameter table is empty");
      for (size_t i = 0; i < c.parameters.size(); ++i) {
        if (c.parameters[i].budget <= 0 ||
            (i > 0 && c.parameters[i].budget <= c.parameters[i - 1].budget)) {
          throw CompileError(ErrorKind::kInput,
                             "parameter budgets must be positive and strictly increasing");
        }
      }
    }
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      auto read = [&n](const char* key, int64_t& field) {
        if (n.contains(key)) field = n.at(key).get<int64_t>();
      };
      read("fresh", c.noise.fresh);
      read("add_cc", c.noise.add_cc);
      read("add_cp", c.noise.add_cp);
      read("mul_cc", c.noise.mul_cc);
      read("mul_cp", c.noise.mul_cp);
      read("rotate", c.noise.rotate);
      read("relinearize", c.noise.relinearize);
      read("negate", c.noise.negate);
    }
  } catch (const nlohmann::json::exception& e) {
    throw CompileError(ErrorKind::kInput, std::string("malformed config: ") + e.what());
  }
  return c;
}

BackendConfig BackendConfig::loadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CompileError(ErrorKind::kInput, "cannot read config file '" + path + "'");
  try {
    return fromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw CompileError(ErrorKind::kInput, "config file '" + path + "': " + e.what());
  }
}

BackendConfig BackendConfig::fromEnvironment() {
  const char* path = std::getenv("HECO_CONFIG");
  if (path == nullptr || *path == '\0') return BackendConfig{};
  return loadFile(path);
}

nlohmann::json BackendConfig::toJson() const {
  nlohmann::json j;
  for (CircuitOpKind k : kAllCircuitOpKinds) j["weights"][circuitOpKey(k)] = weight(k);
  j["parameters"] = nlohmann::json::array();
  for (const auto& r : parameters) j["parameters"].push_back({{"name", r.name}, {"budget", r.budget}});
  j["noise"] = {{"fresh", noise.fresh},   {"add_cc", noise.add_cc}, {"add_cp", noise.add_cp},
                {"mul_cc", noise.mul_cc}, {"mul_cp", noise.mul_cp}, {"rotate", noise.rotate},
                {"relinearize", noise.relinearize}, {"negate", noise.negate}};
  return j;
}

}  // namespace heco::backend
