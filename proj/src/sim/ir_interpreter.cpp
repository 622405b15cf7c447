#include "heco/sim/ir_interpreter.h"

namespace heco::sim {

using ir::OpKind;
using ir::Type;
using ir::ValueId;

void checkIrInputs(const ir::IrFunction& f, const NamedValues& inputs) {
  for (const auto& p : f.params) {
    auto it = inputs.find(p.name);
    if (it == inputs.end()) throw CompileError(ErrorKind::kInput, "missing input '" + p.name + "'");
    bool scalar = ir::isScalarType(p.type);
    if (scalar != (it->second.shape == Shape::kScalar)) {
      throw CompileError(ErrorKind::kInput,
                         "input '" + p.name + "' must be a " + (scalar ? "scalar" : "vector"));
    }
    if (!scalar && static_cast<int64_t>(it->second.data.size()) != f.slots) {
      throw CompileError(ErrorKind::kInput, "input '" + p.name + "' must have " +
                                                std::to_string(f.slots) + " elements, got " +
                                                std::to_string(it->second.data.size()));
    }
  }
  for (const auto& [name, value] : inputs) {
    bool known = false;
    for (const auto& p : f.params) known = known || p.name == name;
    if (!known) throw CompileError(ErrorKind::kInput, "unexpected input '" + name + "'");
  }
}

namespace {

class IrInterpreter {
 public:
  explicit IrInterpreter(const ir::IrFunction& f)
      : f_(f), m_(f.mod()), n_(static_cast<size_t>(f.slots)), du_(f), values_(f.idBound()),
        remaining_(f.idBound()) {
    for (ValueId v = 0; v < remaining_.size(); ++v) remaining_[v] = du_.useCount(v);
  }

  PlainValue run(const NamedValues& inputs) {
    for (const auto& p : f_.params) {
      std::vector<uint64_t> data;
      for (uint64_t x : inputs.at(p.name).data) data.push_back(m_.reduce(static_cast<int64_t>(x)));
      values_[p.id] = std::move(data);
    }
    for (const auto& op : f_.ops) values_[op.result] = exec(op);
    PlainValue out;
    out.shape = f_.result_shape;
    if (f_.result_shape == Shape::kScalar) {
      out.data = {values_[f_.ret][0]};
    } else {
      out.data = asVector(f_.ret, /*broadcast=*/false);
    }
    return out;
  }

 private:
  // Consumes one use of `v`; the storage is moved out on the last use.
  std::vector<uint64_t> take(ValueId v) {
    if (--remaining_[v] == 0 && v != f_.ret) return std::move(values_[v]);
    return values_[v];
  }

  std::vector<uint64_t> asVector(ValueId v, bool broadcast) {
    std::vector<uint64_t> data = take(v);
    if (ir::isScalarType(du_.type(v))) {
      uint64_t s = data[0];
      bool fill = broadcast && du_.type(v) == Type::kPlainScalar;
      data.assign(n_, fill ? s : 0);
      data[0] = s;
    }
    return data;
  }

  uint64_t apply(OpKind kind, uint64_t a, uint64_t b) const {
    switch (kind) {
      case OpKind::kAdd: return m_.add(a, b);
      case OpKind::kSub: return m_.sub(a, b);
      default: return m_.mul(a, b);
    }
  }

  std::vector<uint64_t> exec(const ir::Op& op) {
    switch (op.kind) {
      case OpKind::kConst:
        return {static_cast<uint64_t>(op.attr)};
      case OpKind::kVConst:
        return op.values;
      case OpKind::kExtract: {
        std::vector<uint64_t> v = asVector(op.operands[0], false);
        return {v[static_cast<size_t>(op.attr)]};
      }
      case OpKind::kInsert: {
        uint64_t s = take(op.operands[0])[0];
        std::vector<uint64_t> v = asVector(op.operands[1], false);
        v[static_cast<size_t>(op.attr)] = s;
        return v;
      }
      case OpKind::kRotate: {
        std::vector<uint64_t> v = asVector(op.operands[0], false);
        std::vector<uint64_t> out(n_);
        auto k = static_cast<size_t>(op.attr);
        for (size_t j = 0; j < n_; ++j) out[j] = v[(j + k) % n_];
        return out;
      }
      case OpKind::kAdd:
      case OpKind::kSub:
      case OpKind::kMul: {
        if (ir::isScalarType(op.type)) {
          uint64_t acc = take(op.operands[0])[0];
          for (size_t i = 1; i < op.operands.size(); ++i) {
            acc = apply(op.kind, acc, take(op.operands[i])[0]);
          }
          return {acc};
        }
        std::vector<uint64_t> acc = asVector(op.operands[0], true);
        for (size_t i = 1; i < op.operands.size(); ++i) {
          std::vector<uint64_t> rhs = asVector(op.operands[i], true);
          for (size_t j = 0; j < n_; ++j) acc[j] = apply(op.kind, acc[j], rhs[j]);
        }
        return acc;
      }
    }
    throw CompileError(ErrorKind::kPipeline, "interpreter: unknown op");
  }

  const ir::IrFunction& f_;
  Modulus m_;
  size_t n_;
  ir::DefUse du_;
  std::vector<std::vector<uint64_t>> values_;
  std::vector<int> remaining_;
};

}  // namespace

PlainValue interpret(const ir::IrFunction& f, const NamedValues& inputs) {
  checkIrInputs(f, inputs);
  return IrInterpreter(f).run(inputs);
}

}  // namespace heco::sim
