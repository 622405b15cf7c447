#ifndef HECO_PASSES_BATCHING_H_
#define HECO_PASSES_BATCHING_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "heco/ir/ir.h"

namespace heco::passes {

struct SimdifyOptions {
  /// Test hook: rotates operands the wrong way, (t - j) instead of (j - t).
  bool flip_rotation_sign = false;
};

struct SimdifyStats {
  int64_t translated_ops = 0;
  int64_t alignment_rotations = 0;
  /// Scalar reads of a SIMD result (extract(R, t) for inserts and returns).
  int64_t scalar_extracts = 0;
  /// SIMD results read both as a scalar and as a whole-vector operand.
  int64_t dual_use = 0;
};

/// Rewrites every hl add/sub/mul into a bsf op on whole vectors. The target
/// slot t is the anchor slot, else the slot of the first operand that has
/// one, else 0. An operand held at slot j is aligned with rotate(v, j - t);
/// secret scalars live at slot 0 and plaintext scalars are broadcast.
/// Scalar uses read the result through extract(R, t). Sets the stage to
/// batched.
ir::IrFunction simdify(const ir::IrFunction& f, const SimdifyOptions& options = {},
                       SimdifyStats* stats = nullptr);

/// One round of the batching rewrites on top of the generic ones:
/// forwards extracts through inserts and rotations, and replaces an insert
/// chain that covers every slot i with extract(w, i + c) by rotate(w, c).
ir::IrFunction batchingRewrites(const ir::IrFunction& f);

/// canonicalize, cse, constantFold and batchingRewrites until nothing
/// changes.
ir::IrFunction cleanup(const ir::IrFunction& f);

/// An offset set that forms {s + k*stride mod n : 0 <= k < m}.
struct Progression {
  int64_t start = 0;
  int64_t stride = 1;
  /// The offsets in order of k.
  std::vector<int64_t> ordered;
};

/// Finds the smallest power-of-two stride dividing n with m * stride <= n
/// for which `offsets` (distinct, in [0, n)) form a progression. A full
/// residue class starts at its smallest member.
std::optional<Progression> findProgression(const std::vector<int64_t>& offsets, int64_t n);

/// Replaces bsf add/mul operands rotate(w, s + k*stride), k < m, by a
/// rotate-and-reduce tree over w. Non-power-of-two m uses the largest
/// power-of-two prefix. Applied only when it strictly reduces rotations.
ir::IrFunction lowerFolds(const ir::IrFunction& f);

/// Lowers the remaining hl ops. extract(v, i) becomes rotate(v, i); an
/// insert chain over slot set S becomes base * (1 - chi_S) plus one masked
/// rotation per common source and offset, plus a plaintext vector for
/// constant slots.
ir::IrFunction materialize(const ir::IrFunction& f);

}  // namespace heco::passes

#endif  // HECO_PASSES_BATCHING_H_
