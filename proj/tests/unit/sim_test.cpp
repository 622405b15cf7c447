#include <gtest/gtest.h>

#include <random>

#include "heco/backend/lowering.h"
#include "heco/sim/ir_interpreter.h"
#include "heco/sim/reference.h"
#include "heco/sim/simulator.h"
#include "heco/sim/values.h"
#include "test_support.h"

namespace heco::sim {
namespace {

using backend::CircuitFunction;
using backend::CircuitId;
using backend::CircuitOp;
using backend::CircuitOpKind;

PlainValue vec(std::vector<uint64_t> v) { return PlainValue::vector(std::move(v)); }

PlainValue reference(const std::string& corpus_name, std::optional<int64_t> n, const NamedValues& in) {
  auto front = testing::corpusFrontend(corpus_name, n);
  return execReference(front.typed, front.function, in);
}

// A circuit over one input `x` built op by op.
struct CircuitBuilder {
  CircuitFunction c;
  explicit CircuitBuilder(int64_t slots) {
    c.slots = slots;
    c.result_shape = Shape::kVector;
    c.inputs.push_back({0, "x", -1});
  }
  CircuitId op(CircuitOpKind kind, std::vector<CircuitId> operands, int64_t rotation = 0,
               std::vector<uint64_t> plaintext = {}) {
    CircuitOp o;
    o.kind = kind;
    o.id = c.idBound();
    o.operands = std::move(operands);
    o.rotation = rotation;
    o.plaintext = std::move(plaintext);
    c.ops.push_back(o);
    return o.id;
  }
  CircuitFunction finish(CircuitId out) {
    c.outputs = {out};
    return c;
  }
};

TEST(Reference, HammingDistance) {
  NamedValues in{{"x", vec({1, 0, 1, 1})}, {"y", vec({1, 1, 0, 1})}};
  EXPECT_EQ(reference("hamming-distance", std::nullopt, in), PlainValue::scalar(2));
}

TEST(Reference, LinearPolynomial) {
  NamedValues in{{"a", vec({2, 2})}, {"x", vec({0, 1})}, {"b", vec({3, 3})}};
  EXPECT_EQ(reference("linear-polynomial", 2, in), vec({3, 5}));
}

TEST(Reference, DotProduct) {
  NamedValues in{{"x", vec({1, 2, 3, 4, 5, 6, 7, 8})}, {"y", vec({1, 2, 3, 4, 5, 6, 7, 8})}};
  EXPECT_EQ(reference("dot-product", std::nullopt, in), PlainValue::scalar(204));
}

TEST(Reference, SharpeningConstantImage) {
  for (uint64_t c : {0u, 1u, 7u, 40000u}) {
    NamedValues in{{"img", vec(std::vector<uint64_t>(64, c))}};
    EXPECT_EQ(reference("sharpening", 64, in), vec(std::vector<uint64_t>(64, (2 * c) % kDefaultModulus)));
  }
}

TEST(Reference, NegativeResultsWrapModT) {
  auto front = testing::frontend("secret int f(secret int x) { return x - 5; }");
  EXPECT_EQ(execReference(front.typed, front.function, {{"x", PlainValue::scalar(2)}}),
            PlainValue::scalar(kDefaultModulus - 3));
}

TEST(Reference, InputErrors) {
  auto front = testing::corpusFrontend("hamming-distance");
  auto kindOf = [&](const NamedValues& in) {
    try {
      execReference(front.typed, front.function, in);
    } catch (const CompileError& e) {
      return e.kind();
    }
    return ErrorKind::kLex;
  };
  EXPECT_EQ(kindOf({{"x", vec({1, 0, 1, 1})}}), ErrorKind::kInput);
  EXPECT_EQ(kindOf({{"x", vec({1, 0, 1})}, {"y", vec({1, 1, 0, 1})}}), ErrorKind::kInput);
  EXPECT_EQ(kindOf({{"x", PlainValue::scalar(1)}, {"y", vec({1, 1, 0, 1})}}), ErrorKind::kInput);
  EXPECT_EQ(kindOf({{"x", vec({1, 0, 1, 1})}, {"y", vec({1, 1, 0, 1})}, {"z", PlainValue::scalar(1)}}),
            ErrorKind::kInput);
}

TEST(Values, JsonRoundTripReducesModT) {
  auto values = valuesFromJson(nlohmann::json::parse(R"({"x": [-1, 2], "s": 65538})"), kDefaultModulus);
  EXPECT_EQ(values.at("x"), vec({65536, 2}));
  EXPECT_EQ(values.at("s"), PlainValue::scalar(1));
  EXPECT_EQ(valuesFromJson(valuesToJson(values), kDefaultModulus), values);
  EXPECT_THROW(valuesFromJson(nlohmann::json::parse(R"({"x": "one"})"), kDefaultModulus), CompileError);
  EXPECT_THROW(valuesFromJson(nlohmann::json::parse("[1]"), kDefaultModulus), CompileError);
}

TEST(Encrypt, ScalarGoesToSlotZero) {
  SimCiphertext ct = encryptSim(PlainValue::scalar(7), 4, {});
  EXPECT_EQ(ct.slots, (std::vector<uint64_t>{7, 0, 0, 0}));
  EXPECT_EQ(ct.noise, 1);
  EXPECT_TRUE(ct.relinearized);
}

TEST(Encrypt, VectorFillsSlots) {
  EXPECT_EQ(encryptSim(vec({1, 2, 3, 4}), 4, {}).slots, (std::vector<uint64_t>{1, 2, 3, 4}));
  EXPECT_THROW(encryptSim(vec({1, 2, 3, 4, 5}), 4, {}), CompileError);
}

TEST(Decrypt, ShapesAndBudget) {
  SimCiphertext ct{{9, 3, 3, 3}, 41, true};
  EXPECT_EQ(decryptSim(ct, 41, Shape::kScalar), PlainValue::scalar(9));
  EXPECT_EQ(decryptSim(ct, 41, Shape::kVector), vec({9, 3, 3, 3}));
  try {
    decryptSim(ct, 40, Shape::kScalar);
    FAIL() << "expected NoiseBudgetExceeded";
  } catch (const NoiseBudgetExceeded& e) {
    EXPECT_EQ(e.noise(), 41);
    EXPECT_EQ(e.budget(), 40);
  }
}

TEST(ExecCircuit, RotationConvention) {
  CircuitBuilder b(4);
  auto c = b.finish(b.op(CircuitOpKind::kRotate, {0}, 1));
  EXPECT_EQ(runCircuit(c, {{"x", vec({1, 2, 3, 4})}}, {}, 40), vec({2, 3, 4, 1}));
}

TEST(ExecCircuit, NoiseRules) {
  backend::NoiseModel m;
  CircuitBuilder b(4);
  auto p = b.op(CircuitOpKind::kPtConst, {}, 0, {2});
  auto rot = b.op(CircuitOpKind::kRotate, {0}, 1);            // 1 + 1 = 2
  auto add = b.op(CircuitOpKind::kAddCC, {0, rot});           // max(1, 2) + 1 = 3
  auto sub = b.op(CircuitOpKind::kSubCC, {add, 0});           // 3 + 1 = 4
  auto addp = b.op(CircuitOpKind::kAddCP, {sub, p});          // 4 + 1 = 5
  auto mulp = b.op(CircuitOpKind::kMulCP, {addp, p});         // 5 + 5 = 10
  auto mul = b.op(CircuitOpKind::kMulCC, {mulp, rot});        // 10 + 2 + 10 = 22
  auto relin = b.op(CircuitOpKind::kRelinearize, {mul});      // 22 + 2 = 24
  auto neg = b.op(CircuitOpKind::kNegate, {relin});           // 24
  auto c = b.finish(neg);
  auto trace = execCircuit(c, {{"x", vec({1, 2, 3, 4})}}, m, 40, {.record = true});
  std::vector<int64_t> expected = {1, 0, 2, 3, 4, 5, 10, 22, 24, 24};
  ASSERT_EQ(trace.lines.size(), expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NE(trace.lines[i].find(" noise=" + std::to_string(expected[i]) + " "), std::string::npos)
        << trace.lines[i];
  }
  EXPECT_EQ(trace.peak_noise, 24);
  EXPECT_TRUE(trace.decrypt_ok);
  EXPECT_TRUE(trace.outputs[0].relinearized);
}

TEST(ExecCircuit, MulChainThreshold) {
  auto chain = [](int depth) {
    CircuitBuilder b(4);
    CircuitId v = 0;
    for (int i = 0; i < depth; ++i) v = b.op(CircuitOpKind::kRelinearize, {b.op(CircuitOpKind::kMulCC, {v, 0})});
    return b.finish(v);
  };
  NamedValues in{{"x", vec({1, 2, 3, 4})}};
  EXPECT_TRUE(execCircuit(chain(1), in, {}, 40).decrypt_ok);
  EXPECT_FALSE(execCircuit(chain(8), in, {}, 40).decrypt_ok);
  EXPECT_THROW(runCircuit(chain(8), in, {}, 40), NoiseBudgetExceeded);
  EXPECT_NO_THROW(runCircuit(chain(8), in, {}, 220));
}

TEST(ExecCircuit, TraceFormatElidesLongVectors) {
  CircuitBuilder b(32);
  auto c = b.finish(b.op(CircuitOpKind::kRotate, {0}, 1));
  std::vector<uint64_t> data(32);
  for (size_t i = 0; i < data.size(); ++i) data[i] = i;
  auto trace = execCircuit(c, {{"x", vec(data)}}, {}, 40, {.record = true});
  ASSERT_EQ(trace.lines.size(), 2u);
  EXPECT_EQ(trace.lines[0].rfind("%0 input noise=1 slots=[0, 1, 2", 0), 0u);
  EXPECT_NE(trace.lines[1].find("%1 rotate noise=2 slots=[1, 2,"), std::string::npos);
  EXPECT_NE(trace.lines[1].find("... (32 slots)]"), std::string::npos);
  auto full = execCircuit(c, {{"x", vec(data)}}, {}, 40, {.record = true, .full = true});
  EXPECT_NE(full.lines[1].find(", 31, 0]"), std::string::npos);
}

TEST(ExecCircuit, MissingInput) {
  CircuitBuilder b(4);
  auto c = b.finish(b.op(CircuitOpKind::kRotate, {0}, 1));
  EXPECT_THROW(execCircuit(c, {}, {}, 40), CompileError);
}

TEST(ExecCircuit, RotationFreeCircuitsActPerSlot) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<uint64_t> value(0, kDefaultModulus - 1);
  const Modulus m;
  for (int trial = 0; trial < 50; ++trial) {
    CircuitBuilder b(8);
    auto p = b.op(CircuitOpKind::kPtConst, {}, 0, {value(rng)});
    auto sq = b.op(CircuitOpKind::kMulCC, {0, 0});
    auto sum = b.op(CircuitOpKind::kAddCC, {sq, 0});
    auto c = b.finish(b.op(CircuitOpKind::kMulCP, {sum, p}));
    const uint64_t k = c.ops[0].plaintext[0];
    std::vector<uint64_t> data(8);
    for (auto& x : data) x = value(rng);
    auto out = runCircuit(c, {{"x", vec(data)}}, {}, 1000);
    for (size_t j = 0; j < 8; ++j) {
      EXPECT_EQ(out.data[j], m.mul(m.add(m.mul(data[j], data[j]), data[j]), k));
    }
  }
}

TEST(Interpreter, PlainScalarIsBroadcastInSimdOps) {
  ir::Builder b("f", kDefaultModulus, 4, ir::Stage::kBatched, Shape::kVector);
  auto x = b.addParam(ir::Type::kBatchedSecret, "x");
  auto f = b.finish(b.arith(ir::OpKind::kAdd, ir::Dialect::kBsf, {x, b.constant(10)}));
  EXPECT_EQ(interpret(f, {{"x", vec({1, 2, 3, 4})}}), vec({11, 12, 13, 14}));
}

TEST(Interpreter, SecretScalarLivesInSlotZero) {
  ir::Builder b("f", kDefaultModulus, 4, ir::Stage::kBatched, Shape::kVector);
  auto s = b.addParam(ir::Type::kSecretScalar, "s");
  auto x = b.addParam(ir::Type::kBatchedSecret, "x");
  auto f = b.finish(b.arith(ir::OpKind::kAdd, ir::Dialect::kBsf, {x, s}));
  EXPECT_EQ(interpret(f, {{"s", PlainValue::scalar(5)}, {"x", vec({1, 2, 3, 4})}}), vec({6, 2, 3, 4}));
}

TEST(Interpreter, LoweredIrMatchesReference) {
  std::mt19937_64 rng(4);
  for (const auto& entry : driver::corpus()) {
    SCOPED_TRACE(entry.name);
    auto front = testing::corpusFrontend(entry.name, 16);
    for (int trial = 0; trial < 100; ++trial) {
      auto in = driver::randomInputs(front.ir, rng);
      ASSERT_EQ(interpret(front.ir, in), execReference(front.typed, front.function, in));
    }
  }
}

TEST(Simulator, RobertsCrossAt64MatchesReference) {
  auto front = testing::corpusFrontend("roberts-cross", 64);
  auto compiled = testing::compile(front);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    auto in = driver::randomInputs(front.ir, rng);
    auto out = runCircuit(compiled.circuit, in, {}, compiled.cost.params->budget);
    ASSERT_EQ(out, execReference(front.typed, front.function, in));
  }
}

TEST(Simulator, NaiveCircuitMatchesReference) {
  auto front = testing::corpusFrontend("l2-distance");
  auto naive = testing::compileNaive(front);
  EXPECT_TRUE(naive.circuit.per_element);
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    auto in = driver::randomInputs(front.ir, rng);
    ASSERT_EQ(runCircuit(naive.circuit, in, {}, 1 << 20), execReference(front.typed, front.function, in));
  }
}

}  // namespace
}  // namespace heco::sim
