#ifndef HECO_SIM_SIMULATOR_H_
#define HECO_SIM_SIMULATOR_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "heco/backend/circuit.h"
#include "heco/backend/config.h"
#include "heco/sim/values.h"

namespace heco::sim {

/// A simulated ciphertext: the plaintext slots plus an abstract noise
/// counter. No cryptography is involved.
struct SimCiphertext {
  std::vector<uint64_t> slots;
  int64_t noise = 0;
  bool relinearized = true;
};

/// Raised when decrypting a ciphertext whose noise exceeds the budget.
class NoiseBudgetExceeded : public std::runtime_error {
 public:
  NoiseBudgetExceeded(int64_t noise, int64_t budget);

  int64_t noise() const { return noise_; }
  int64_t budget() const { return budget_; }

 private:
  int64_t noise_;
  int64_t budget_;
};

/// Places a vector in slots [0, len) and a scalar in slot 0; the rest are 0.
/// Throws CompileError(kInput) if the value does not fit in `slots`.
SimCiphertext encryptSim(const PlainValue& v, int64_t slots, const backend::NoiseModel& noise);

/// Scalar shape returns slot 0, vector shape every slot. Throws
/// NoiseBudgetExceeded if the noise is above `budget`.
PlainValue decryptSim(const SimCiphertext& ct, int64_t budget, Shape shape);

struct TraceOptions {
  bool record = false;
  /// Prints every slot; otherwise vectors longer than 16 are elided.
  bool full = false;
};

struct ExecutionTrace {
  /// One line per input and op: `%id kind noise=<u> slots=[...]`.
  std::vector<std::string> lines;
  std::vector<SimCiphertext> outputs;
  int64_t peak_noise = 0;
  bool decrypt_ok = true;
};

/// Runs a circuit slot-wise. Plaintext constants are carried with noise 0.
/// `budget` only determines `decrypt_ok`.
ExecutionTrace execCircuit(const backend::CircuitFunction& c, const NamedValues& inputs,
                           const backend::NoiseModel& noise, int64_t budget,
                           const TraceOptions& options = {});

/// Decrypts the outputs of a finished trace into the function result.
/// Throws NoiseBudgetExceeded if the peak noise exceeds `budget`.
PlainValue decryptOutputs(const backend::CircuitFunction& c, const ExecutionTrace& trace,
                          int64_t budget);

/// execCircuit followed by decryptOutputs.
PlainValue runCircuit(const backend::CircuitFunction& c, const NamedValues& inputs,
                      const backend::NoiseModel& noise, int64_t budget);

}  // namespace heco::sim

#endif  // HECO_SIM_SIMULATOR_H_
