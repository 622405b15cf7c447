#ifndef HECO_SIM_IR_INTERPRETER_H_
#define HECO_SIM_IR_INTERPRETER_H_

#include "heco/ir/ir.h"
#include "heco/sim/values.h"

namespace heco::sim {

/// Executes IR of either stage on plaintexts. Scalars live in slot 0: a
/// secret scalar used as a vector is [s, 0, ..., 0] and a plaintext scalar in
/// a bsf op is broadcast to every slot. A scalar result is read from slot 0.
PlainValue interpret(const ir::IrFunction& f, const NamedValues& inputs);

/// Checks `inputs` against the parameters of `f`; throws CompileError(kInput).
void checkIrInputs(const ir::IrFunction& f, const NamedValues& inputs);

}  // namespace heco::sim

#endif  // HECO_SIM_IR_INTERPRETER_H_
