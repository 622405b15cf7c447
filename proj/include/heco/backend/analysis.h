#ifndef HECO_BACKEND_ANALYSIS_H_
#define HECO_BACKEND_ANALYSIS_H_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heco/backend/circuit.h"
#include "heco/backend/config.h"
#include "json.hpp"

namespace heco::backend {

/// Multiplicative depth of each output: the longest input-to-output path
/// where a ct-ct mul counts 1, a ct-pt mul 0.5 and everything else 0.
std::vector<double> analyzeDepth(const CircuitFunction& c);
double circuitDepth(const CircuitFunction& c);

/// Worst-case noise of every value under the noise model (plaintexts 0).
std::vector<int64_t> staticNoise(const CircuitFunction& c, const NoiseModel& model);
int64_t peakNoise(const CircuitFunction& c, const NoiseModel& model);

struct SchemeParams {
  std::string name;
  int64_t slots = 0;
  uint64_t modulus = 0;
  int64_t budget = 0;
};

nlohmann::json toJson(const SchemeParams& p);

/// Worst-case noise of a depth-d chain in which every level multiplies by a
/// fresh ciphertext and relinearizes; a trailing half level is a ct-pt mul.
int64_t chainNoise(double depth, const NoiseModel& model);

/// Smallest row whose budget covers `noise` (decryption succeeds while the
/// noise does not exceed the budget). Throws CompileError(kParams).
ParamRow selectRowForNoise(int64_t noise, const BackendConfig& config);

/// Depth-only selection using chainNoise.
SchemeParams selectParameters(double depth, const BackendConfig& config, int64_t slots = 0,
                              uint64_t modulus = 0);

/// Selection from the circuit's exact static noise.
SchemeParams selectParameters(const CircuitFunction& c, const BackendConfig& config);

struct CostReport {
  std::map<CircuitOpKind, int64_t> counts;
  /// All ops except plaintext constants.
  int64_t total_ops = 0;
  /// ct-ct muls whose operands are the same value.
  int64_t square_count = 0;
  double depth = 0;
  int64_t weighted_cost = 0;
  int64_t peak_noise = 0;
  std::optional<SchemeParams> params;
  /// Set when no parameter row fits.
  std::string params_error;
  std::vector<std::pair<std::string, double>> compile_ms;

  int64_t count(CircuitOpKind k) const {
    auto it = counts.find(k);
    return it == counts.end() ? 0 : it->second;
  }
  /// ct-ct add/sub, ct-pt add and negate.
  int64_t additiveOps() const;
  int64_t rotations() const { return count(CircuitOpKind::kRotate); }
  int64_t multiplications() const {
    return count(CircuitOpKind::kMulCC) + count(CircuitOpKind::kMulCP);
  }
};

/// Counts, depth, weighted cost and noise. Parameters are selected from the
/// table unless `override_params` names a row; selection failures are
/// recorded in params_error rather than thrown.
CostReport estimateCost(const CircuitFunction& c, const BackendConfig& config,
                        const std::string& override_params = "");

nlohmann::json toJson(const CostReport& r);

}  // namespace heco::backend

#endif  // HECO_BACKEND_ANALYSIS_H_
