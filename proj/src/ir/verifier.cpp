#include "heco/ir/verifier.h"

#include <unordered_map>

namespace heco::ir {

std::vector<std::string> verify(const IrFunction& f, const VerifyOptions& options) {
  std::vector<std::string> out;
  auto value = [](ValueId v) { return "%" + std::to_string(v); };

  if (!isPowerOfTwo(static_cast<uint64_t>(f.slots)) || f.slots < 2) {
    out.push_back("slot count " + std::to_string(f.slots) + " is not a power of two >= 2");
  }
  if (!isValidPlainModulus(f.modulus)) {
    out.push_back("modulus " + std::to_string(f.modulus) + " is not an odd prime below 2^31");
  }

  std::unordered_map<ValueId, Type> defined;
  for (const auto& p : f.params) {
    if (!defined.emplace(p.id, p.type).second) {
      out.push_back("duplicate definition of " + value(p.id));
    }
    bool ok = p.type == Type::kSecretScalar ||
              p.type == (f.stage == Stage::kBatched ? Type::kBatchedSecret : Type::kSecretVector);
    if (!ok) out.push_back("parameter " + value(p.id) + " has invalid type");
  }

  for (const auto& op : f.ops) {
    std::string where = value(op.result) + " (" + dialectName(op.dialect) + "." +
                        opKindName(op.kind) + ")";
    std::vector<Type> operandTypes;
    bool operandsOk = true;
    for (ValueId v : op.operands) {
      auto it = defined.find(v);
      if (it == defined.end()) {
        out.push_back("use before def: " + value(v) + " in " + where);
        operandsOk = false;
      } else {
        operandTypes.push_back(it->second);
      }
    }
    if (options.forbid_hl && op.dialect == Dialect::kHl) {
      out.push_back("hl op survives lowering: " + where);
    }
    if (operandsOk) {
      auto inferred = inferType(f.stage, op.kind, op.dialect, operandTypes);
      if (!inferred) {
        out.push_back("ill-typed operands in " + where);
      } else if (*inferred != op.type) {
        out.push_back("type mismatch in " + where + ": declared " + typeName(op.type, f.slots) +
                      ", expected " + typeName(*inferred, f.slots));
      }
    }
    switch (op.kind) {
      case OpKind::kExtract:
      case OpKind::kInsert:
        if (op.attr < 0 || op.attr >= f.slots) {
          out.push_back("slot " + std::to_string(op.attr) + " out of range in " + where);
        }
        break;
      case OpKind::kRotate:
        if (op.attr < 0 || op.attr >= f.slots) {
          out.push_back("unnormalized rotation by " + std::to_string(op.attr) + " in " + where);
        }
        break;
      case OpKind::kConst:
        if (op.attr < 0 || static_cast<uint64_t>(op.attr) >= f.modulus) {
          out.push_back("constant not reduced mod t in " + where);
        }
        break;
      case OpKind::kVConst: {
        if (static_cast<int64_t>(op.values.size()) != f.slots) {
          out.push_back("vconst length mismatch in " + where);
        }
        for (uint64_t v : op.values) {
          if (v >= f.modulus) {
            out.push_back("constant not reduced mod t in " + where);
            break;
          }
        }
        break;
      }
      default:
        break;
    }
    if (!defined.emplace(op.result, op.type).second) {
      out.push_back("duplicate definition of " + value(op.result));
    }
  }

  auto ret = defined.find(f.ret);
  if (ret == defined.end()) {
    out.push_back("return value " + value(f.ret) + " is not defined");
  } else if (f.result_shape == Shape::kVector && ret->second == Type::kSecretScalar &&
             f.stage == Stage::kHighLevel) {
    out.push_back("vector function returns a scalar");
  } else if (f.result_shape == Shape::kScalar && f.stage == Stage::kHighLevel &&
             isVectorType(ret->second)) {
    out.push_back("scalar function returns a vector");
  }
  return out;
}

void verifyOrThrow(const IrFunction& f, const std::string& context, const VerifyOptions& options) {
  auto violations = verify(f, options);
  if (violations.empty()) return;
  std::string message = context + ": IR verification failed";
  for (const auto& v : violations) message += "\n  " + v;
  throw CompileError(ErrorKind::kPipeline, message);
}

}  // namespace heco::ir
