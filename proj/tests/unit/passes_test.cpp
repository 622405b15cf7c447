#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "heco/backend/analysis.h"
#include "heco/backend/lowering.h"
#include "heco/ir/rewrites.h"
#include "heco/ir/serialize.h"
#include "heco/ir/verifier.h"
#include "heco/passes/anchors.h"
#include "heco/passes/batching.h"
#include "heco/passes/preprocess.h"
#include "heco/sim/ir_interpreter.h"
#include "heco/sim/reference.h"
#include "test_support.h"

namespace heco::passes {
namespace {

using ir::OpKind;

size_t countOps(const ir::IrFunction& f, OpKind kind) {
  return static_cast<size_t>(
      std::count_if(f.ops.begin(), f.ops.end(), [kind](const ir::Op& op) { return op.kind == kind; }));
}

std::multiset<int64_t> rotations(const ir::IrFunction& f) {
  std::multiset<int64_t> out;
  for (const auto& op : f.ops) {
    if (op.kind == OpKind::kRotate) out.insert(op.attr);
  }
  return out;
}

ir::IrFunction prepared(std::string_view source) {
  return mergeArith(ir::canonicalize(testing::frontend(source).ir));
}

ir::IrFunction batchedAndCleaned(std::string_view source) {
  return cleanup(simdify(vectorizePlaintexts(prepared(source))));
}

// Checks `g` against the reference on random inputs.
void expectSameAsReference(std::string_view source, const ir::IrFunction& g, int trials = 50) {
  auto front = testing::frontend(source);
  std::mt19937_64 rng(3);
  for (int i = 0; i < trials; ++i) {
    auto in = driver::randomInputs(front.ir, rng);
    ASSERT_EQ(sim::interpret(g, in), sim::execReference(front.typed, front.function, in));
  }
}

TEST(MergeArith, SingleUseChainMerges) {
  ir::Builder b("f", kDefaultModulus, 2, ir::Stage::kHighLevel, Shape::kScalar);
  auto a = b.addParam(ir::Type::kSecretScalar, "a");
  auto c = b.addParam(ir::Type::kSecretScalar, "b");
  auto d = b.addParam(ir::Type::kSecretScalar, "c");
  auto x = b.arith(OpKind::kAdd, ir::Dialect::kHl, {a, c});
  auto f = mergeArith(b.finish(b.arith(OpKind::kAdd, ir::Dialect::kHl, {x, d})));
  ASSERT_EQ(f.ops.size(), 1u);
  EXPECT_EQ(f.ops[0].operands, (std::vector<ir::ValueId>{a, c, d}));
}

TEST(MergeArith, MultiUseIntermediateKept) {
  ir::Builder b("f", kDefaultModulus, 2, ir::Stage::kHighLevel, Shape::kScalar);
  auto a = b.addParam(ir::Type::kSecretScalar, "a");
  auto c = b.addParam(ir::Type::kSecretScalar, "b");
  auto d = b.addParam(ir::Type::kSecretScalar, "c");
  auto x = b.arith(OpKind::kAdd, ir::Dialect::kHl, {a, c});
  auto y = b.arith(OpKind::kAdd, ir::Dialect::kHl, {x, d});
  auto f = mergeArith(b.finish(b.arith(OpKind::kMul, ir::Dialect::kHl, {x, y})));
  EXPECT_EQ(countOps(f, OpKind::kAdd), 2u);
}

TEST(MergeArith, UnrolledSumBecomesOneOp) {
  auto f = prepared(R"(
secret int f(secret int[8] x) {
  secret int sum = 0;
  for i in 0..8 { sum = sum + x[i]; }
  return sum;
})");
  ASSERT_EQ(countOps(f, OpKind::kAdd), 1u);
  auto add = std::find_if(f.ops.begin(), f.ops.end(), [](const ir::Op& op) { return op.kind == OpKind::kAdd; });
  EXPECT_EQ(countOps(f, OpKind::kExtract), 8u);
  EXPECT_GE(add->operands.size(), 8u);
}

TEST(MergeArith, FixpointAndLeafMultiset) {
  for (const auto& entry : driver::corpus()) {
    SCOPED_TRACE(entry.name);
    auto f = mergeArith(ir::canonicalize(testing::corpusFrontend(entry.name, 16).ir));
    EXPECT_EQ(mergeArith(f), f);
    ir::DefUse du(f);
    for (const auto& op : f.ops) {
      if (op.kind != OpKind::kAdd && op.kind != OpKind::kMul) continue;
      for (auto v : op.operands) {
        const ir::Op* d = du.def(v);
        bool mergeable = d != nullptr && d->kind == op.kind && du.useCount(v) == 1;
        EXPECT_FALSE(mergeable);
      }
    }
  }
}

TEST(VectorizePlain, TwoSlotsShareOneVector) {
  auto f = vectorizePlaintexts(prepared(R"(
secret int[4] f(secret int[4] x) {
  secret int[4] z = x;
  z[0] = x[0] + 5;
  z[1] = x[1] + 9;
  return z;
})"));
  ASSERT_EQ(countOps(f, OpKind::kVConst), 1u);
  auto vc = std::find_if(f.ops.begin(), f.ops.end(), [](const ir::Op& op) { return op.kind == OpKind::kVConst; });
  EXPECT_EQ(vc->values, (std::vector<uint64_t>{5, 9, 0, 0}));
}

TEST(VectorizePlain, MulGroupFillsWithOne) {
  auto f = vectorizePlaintexts(prepared(R"(
secret int[4] f(secret int[4] x) {
  secret int[4] z = x;
  z[2] = x[2] * 3;
  z[3] = x[3] * 4;
  return z;
})"));
  auto vc = std::find_if(f.ops.begin(), f.ops.end(), [](const ir::Op& op) { return op.kind == OpKind::kVConst; });
  ASSERT_NE(vc, f.ops.end());
  EXPECT_EQ(vc->values, (std::vector<uint64_t>{1, 1, 3, 4}));
}

TEST(VectorizePlain, IsolatedOpUnchanged) {
  auto f = prepared(R"(
secret int[4] f(secret int[4] x) {
  secret int[4] z = x;
  z[0] = x[0] + 5;
  return z;
})");
  EXPECT_EQ(vectorizePlaintexts(f), f);
}

TEST(VectorizePlain, MatrixVectorUsesDiagonals) {
  std::string source = testing::dataFile("matvec.heco");
  auto compiled = testing::compile(testing::frontend(source));
  // Hand-written diagonal method: d_k[i] = m[i][(i + k) mod 4], applied to
  // rotate(x, k).
  std::set<std::vector<uint64_t>> expected;
  for (uint64_t k = 0; k < 4; ++k) {
    std::vector<uint64_t> d(4);
    for (uint64_t i = 0; i < 4; ++i) d[i] = 4 * i + (i + k) % 4 + 1;
    expected.insert(d);
  }
  std::set<std::vector<uint64_t>> actual;
  for (const auto& op : compiled.final_ir.ops) {
    if (op.kind == OpKind::kVConst) actual.insert(op.values);
  }
  EXPECT_EQ(actual, expected);
  EXPECT_EQ(compiled.cost.rotations(), 3);
  EXPECT_EQ(compiled.cost.count(backend::CircuitOpKind::kMulCP), 4);
  EXPECT_FALSE(testing::findDivergence(testing::frontend(source), compiled, 100, 5));
}

TEST(Anchors, InsertSlotIsTheAnchor) {
  auto f = prepared(R"(
secret int[8] f(secret int[8] x, secret int[8] y) {
  secret int[8] z = x;
  z[5] = x[3] + y[7];
  return z;
})");
  auto anchors = computeAnchors(f);
  for (size_t k = 0; k < f.ops.size(); ++k) {
    if (f.ops[k].kind != OpKind::kAdd) continue;
    ASSERT_TRUE(anchors[k]);
    EXPECT_EQ(anchors[k]->slot, 5);
  }
}

TEST(Simdify, AlignsToFirstOperandSlot) {
  auto f = simdify(prepared(R"(
secret int[8] f(secret int[8] x, secret int[8] y) {
  secret int[8] z;
  z[1] = x[1] + y[4];
  return z;
})"));
  EXPECT_TRUE(ir::verify(f).empty());
  ASSERT_EQ(rotations(f), (std::multiset<int64_t>{3}));
  auto rot = std::find_if(f.ops.begin(), f.ops.end(), [](const ir::Op& op) { return op.kind == OpKind::kRotate; });
  EXPECT_EQ(rot->operands[0], f.params[1].id);
  auto add = std::find_if(f.ops.begin(), f.ops.end(), [](const ir::Op& op) { return op.kind == OpKind::kAdd; });
  EXPECT_EQ(add->dialect, ir::Dialect::kBsf);
  EXPECT_EQ(std::set<ir::ValueId>(add->operands.begin(), add->operands.end()),
            (std::set<ir::ValueId>{f.params[0].id, rot->result}));
}

TEST(Simdify, InsertSlotWins) {
  auto f = simdify(prepared(R"(
secret int[8] f(secret int[8] x, secret int[8] y) {
  secret int[8] z;
  z[5] = x[3] + y[7];
  return z;
})"));
  // x moves from slot 3 to 5 and y from 7 to 5.
  EXPECT_EQ(rotations(f), (std::multiset<int64_t>{2, 6}));
}

TEST(Simdify, ScalarUseTakesFirstSlot) {
  auto f = simdify(prepared(R"(
secret int f(secret int[8] x, secret int[8] y) { return x[2] + y[2]; })"));
  EXPECT_TRUE(rotations(f).empty());
  ASSERT_FALSE(f.ops.empty());
  const ir::Op& last = f.ops.back();
  EXPECT_EQ(last.kind, OpKind::kExtract);
  EXPECT_EQ(last.attr, 2);
}

TEST(Simdify, PlainScalarOperandNeedsNoRotation) {
  auto f = simdify(prepared("secret int f(secret int[8] x) { return x[0] + 5; }"));
  EXPECT_TRUE(rotations(f).empty());
}

TEST(Simdify, NeverRotatesBothOperandsWithoutInsert) {
  for (const auto& entry : driver::corpus()) {
    SCOPED_TRACE(entry.name);
    SimdifyStats stats;
    auto f = simdify(mergeArith(ir::canonicalize(testing::corpusFrontend(entry.name, 16).ir)), {}, &stats);
    EXPECT_TRUE(ir::verify(f).empty());
    EXPECT_EQ(f.stage, ir::Stage::kBatched);
    for (const auto& p : f.params) EXPECT_NE(p.type, ir::Type::kSecretVector);
  }
}

TEST(Cleanup, ElementwiseLoopCollapses) {
  for (int64_t n : {4, 16, 64}) {
    SCOPED_TRACE(n);
    std::string source = R"(
const int N = 4;
secret int[N] f(secret int[N] x, secret int[N] y) {
  secret int[N] z;
  for i in 0..N { z[i] = x[i] + y[i]; }
  return z;
})";
    auto g = cleanup(simdify(mergeArith(ir::canonicalize(testing::frontend(source, n).ir))));
    EXPECT_EQ(countOps(g, OpKind::kAdd), 1u);
    EXPECT_EQ(countOps(g, OpKind::kRotate), 0u);
    EXPECT_EQ(countOps(g, OpKind::kInsert), 0u);
  }
}

TEST(Cleanup, ConstantOffsetSharesOneRotation) {
  std::string source = R"(
const int N = 8;
secret int[N] f(secret int[N] x, secret int[N] y) {
  secret int[N] z;
  for i in 0..N { z[i] = x[i] + y[(i + 1) % N]; }
  return z;
})";
  auto g = batchedAndCleaned(source);
  EXPECT_EQ(rotations(g), (std::multiset<int64_t>{1}));
  EXPECT_EQ(countOps(g, OpKind::kAdd), 1u);
  EXPECT_EQ(countOps(g, OpKind::kInsert), 0u);
}

TEST(Cleanup, ForwardsExtractThroughInsert) {
  ir::Builder b("f", kDefaultModulus, 4, ir::Stage::kBatched, Shape::kScalar);
  auto v = b.addParam(ir::Type::kBatchedSecret, "v");
  auto s = b.addParam(ir::Type::kSecretScalar, "s");
  auto w = b.insert(s, v, 1);
  auto same = b.extract(w, 1);
  auto other = b.extract(w, 2);
  auto f = cleanup(b.finish(b.arith(OpKind::kAdd, ir::Dialect::kHl, {same, other})));
  EXPECT_EQ(countOps(f, OpKind::kInsert), 0u);
  for (const auto& op : f.ops) {
    if (op.kind == OpKind::kExtract) EXPECT_EQ(op.operands[0], v);
  }
}

TEST(Cleanup, NeverIncreasesWeightedCost) {
  backend::BackendConfig config;
  for (const auto& entry : driver::corpus()) {
    SCOPED_TRACE(entry.name);
    auto f = simdify(vectorizePlaintexts(mergeArith(ir::canonicalize(testing::corpusFrontend(entry.name, 16).ir))));
    auto cost = [&](const ir::IrFunction& g) {
      return backend::estimateCost(backend::lowerToCircuit(ir::constantFold(materialize(g))), config).weighted_cost;
    };
    EXPECT_LE(cost(cleanup(f)), cost(f));
  }
}

TEST(FindProgression, Cases) {
  auto p = findProgression({0, 2, 4, 6}, 8);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->stride, 2);
  EXPECT_EQ(p->start, 0);

  p = findProgression({7, 5, 3, 1}, 8);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->stride, 2);
  EXPECT_EQ(p->start, 1);

  p = findProgression({7, 0, 1}, 8);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->stride, 1);
  EXPECT_EQ(p->start, 7);
  EXPECT_EQ(p->ordered, (std::vector<int64_t>{7, 0, 1}));

  EXPECT_FALSE(findProgression({0, 3}, 8));
  EXPECT_FALSE(findProgression({0, 1, 3}, 8));
}

TEST(LowerFolds, FullSumIsLogarithmic) {
  std::string source = R"(
secret int f(secret int[8] x) {
  secret int s = 0;
  for i in 0..8 { s += x[i]; }
  return s;
})";
  auto g = materialize(lowerFolds(batchedAndCleaned(source)));
  EXPECT_EQ(rotations(g), (std::multiset<int64_t>{4, 2, 1}));
  EXPECT_EQ(countOps(g, OpKind::kAdd), 3u);
  expectSameAsReference(source, g);
}

TEST(LowerFolds, ProductHasLogDepth) {
  std::string source = R"(
secret int f(secret int[8] x) {
  secret int s = 1;
  for i in 0..8 { s *= x[i]; }
  return s;
})";
  auto compiled = testing::compile(testing::frontend(source));
  EXPECT_EQ(compiled.cost.rotations(), 3);
  EXPECT_EQ(compiled.cost.count(backend::CircuitOpKind::kMulCC), 3);
  EXPECT_DOUBLE_EQ(compiled.cost.depth, 3.0);
}

TEST(LowerFolds, StridedSum) {
  std::string source = R"(
secret int f(secret int[8] x) { return x[0] + x[2] + x[4] + x[6]; })";
  auto g = materialize(lowerFolds(batchedAndCleaned(source)));
  EXPECT_EQ(rotations(g), (std::multiset<int64_t>{4, 2}));
  expectSameAsReference(source, g);
}

TEST(LowerFolds, NonPowerOfTwoCountUsesPrefix) {
  std::string source = R"(
secret int f(secret int[8] x) { return x[0] + x[1] + x[2] + x[3] + x[4] + x[5]; })";
  auto g = materialize(lowerFolds(batchedAndCleaned(source)));
  EXPECT_LT(rotations(g).size(), 5u);
  expectSameAsReference(source, g);
}

TEST(Materialize, InsertUsesComplementaryMasks) {
  ir::Builder b("f", kDefaultModulus, 4, ir::Stage::kBatched, Shape::kVector);
  auto s = b.addParam(ir::Type::kSecretScalar, "s");
  auto v = b.addParam(ir::Type::kBatchedSecret, "v");
  auto f = materialize(b.finish(b.insert(s, v, 2)));
  EXPECT_TRUE(ir::verify(f, {.forbid_hl = true}).empty());
  std::set<std::vector<uint64_t>> masks;
  for (const auto& op : f.ops) {
    if (op.kind == OpKind::kVConst) masks.insert(op.values);
  }
  EXPECT_EQ(masks, (std::set<std::vector<uint64_t>>{{1, 1, 0, 1}, {0, 0, 1, 0}}));
  EXPECT_EQ(rotations(f), (std::multiset<int64_t>{2}));
}

TEST(Materialize, InsertMatchesVirtualSemantics) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<uint64_t> value(0, kDefaultModulus - 1);
  for (int64_t n : {4, 8, 16}) {
    for (int64_t i = 0; i < n; ++i) {
      ir::Builder b("f", kDefaultModulus, n, ir::Stage::kBatched, Shape::kVector);
      auto s = b.addParam(ir::Type::kSecretScalar, "s");
      auto v = b.addParam(ir::Type::kBatchedSecret, "v");
      auto virt = b.finish(b.insert(s, v, i));
      auto real = ir::constantFold(materialize(virt));
      for (int trial = 0; trial < 5; ++trial) {
        sim::NamedValues in;
        in["s"] = sim::PlainValue::scalar(value(rng));
        std::vector<uint64_t> data(static_cast<size_t>(n));
        for (auto& x : data) x = value(rng);
        in["v"] = sim::PlainValue::vector(data);
        ASSERT_EQ(sim::interpret(real, in), sim::interpret(virt, in)) << "n=" << n << " i=" << i;
      }
    }
  }
}

TEST(Materialize, ScalarExtractBecomesRotation) {
  for (int64_t slot : {3, 0}) {
    ir::Builder b("f", kDefaultModulus, 4, ir::Stage::kBatched, Shape::kScalar);
    auto v = b.addParam(ir::Type::kBatchedSecret, "v");
    auto f = ir::constantFold(materialize(b.finish(b.extract(v, slot))));
    if (slot == 0) {
      EXPECT_TRUE(f.ops.empty());
      EXPECT_EQ(f.ret, v);
    } else {
      ASSERT_EQ(f.ops.size(), 1u);
      EXPECT_EQ(f.ops[0].kind, OpKind::kRotate);
      EXPECT_EQ(f.ops[0].attr, 3);
    }
  }
}

TEST(Pipeline, EveryStagePreservesSemantics) {
  for (const auto& entry : driver::corpus()) {
    SCOPED_TRACE(entry.name);
    auto front = testing::corpusFrontend(entry.name, 16);
    auto compiled = testing::compile(front);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      auto in = driver::randomInputs(front.ir, rng);
      auto expected = sim::execReference(front.typed, front.function, in);
      ASSERT_EQ(sim::interpret(front.ir, in), expected);
      for (const auto& stage : compiled.stages) {
        ASSERT_EQ(sim::interpret(stage.ir, in), expected) << stage.pass;
      }
    }
  }
}

}  // namespace
}  // namespace heco::passes
