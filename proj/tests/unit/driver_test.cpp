#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "heco/ir/serialize.h"
#include "test_support.h"

namespace heco::driver {
namespace {

struct Output {
  int code;
  std::string out;
  std::string err;
};

template <typename Cmd, typename Fn>
Output capture(Fn fn, const Cmd& cmd, const CommonOptions& common = {}) {
  std::ostringstream out, err;
  int code = fn(cmd, common, out, err);
  return {code, out.str(), err.str()};
}

std::string writeTemp(const std::string& name, const std::string& contents) {
  auto path = std::filesystem::temp_directory_path() / ("heco_driver_test_" + name);
  std::ofstream(path) << contents;
  return path.string();
}

CommonOptions withN(int64_t n) {
  CommonOptions c;
  c.frontend.n = n;
  return c;
}

TEST(Pipeline, Validation) {
  PipelineConfig ok;
  EXPECT_NO_THROW(validatePipeline(ok));

  PipelineConfig unknown;
  unknown.passes.push_back("frobnicate");
  EXPECT_THROW(validatePipeline(unknown), CompileError);

  PipelineConfig unknown_skip;
  unknown_skip.skip.insert("frobnicate");
  EXPECT_THROW(validatePipeline(unknown_skip), CompileError);

  PipelineConfig no_materialize;
  no_materialize.skip.insert("materialize");
  EXPECT_THROW(validatePipeline(no_materialize), CompileError);

  PipelineConfig merge_late;
  merge_late.passes = {"simdify", "merge-arith", "cleanup", "materialize"};
  EXPECT_THROW(validatePipeline(merge_late), CompileError);

  PipelineConfig folds_early;
  folds_early.passes = {"merge-arith", "simdify", "lower-folds", "cleanup", "materialize"};
  EXPECT_THROW(validatePipeline(folds_early), CompileError);

  PipelineConfig materialize_early;
  materialize_early.passes = {"merge-arith", "simdify", "materialize", "cleanup", "lower-folds"};
  EXPECT_THROW(validatePipeline(materialize_early), CompileError);

  for (const auto& pass : knownPasses()) {
    if (pass == "materialize") continue;
    PipelineConfig skip;
    skip.skip.insert(pass);
    EXPECT_NO_THROW(validatePipeline(skip)) << pass;
  }
}

TEST(Pipeline, UniqueLabels) {
  EXPECT_EQ(uniquePassLabels({"fold", "cse", "fold", "cleanup", "fold"}),
            (std::vector<std::string>{"fold", "cse", "fold.2", "cleanup", "fold.3"}));
}

TEST(Pipeline, StagesAreRecordedWithLabels) {
  auto compiled = testing::compile(testing::corpusFrontend("dot-product"));
  auto labels = uniquePassLabels(defaultBatchedPasses());
  ASSERT_EQ(compiled.stages.size(), labels.size());
  for (size_t i = 0; i < labels.size(); ++i) EXPECT_EQ(compiled.stages[i].pass, labels[i]);
  EXPECT_EQ(compiled.stages.back().ir, compiled.final_ir);
}

TEST(Frontend, MultipleFunctionsNeedAChoice) {
  std::string source =
      "secret int f(secret int x) { return x + 1; }\n"
      "secret int g(secret int x) { return x * 2; }\n";
  EXPECT_THROW(testing::frontend(source), CompileError);
  FrontendOptions options;
  options.function = "g";
  EXPECT_EQ(runFrontend(source, options).ir.name, "g");
}

TEST(Corpus, Completeness) {
  std::set<std::string> names;
  for (const auto& e : corpus()) names.insert(e.name);
  for (const char* required : {"linear-polynomial", "dot-product", "l2-distance", "hamming-distance",
                               "box-blur", "gx-kernel", "gy-kernel", "roberts-cross", "sharpening"}) {
    EXPECT_TRUE(names.count(required)) << required;
  }
  EXPECT_EQ(corpusEntry("dot-product").bench_sizes, (std::vector<int64_t>{8}));
  EXPECT_EQ(corpusEntry("l2-distance").bench_sizes, (std::vector<int64_t>{4}));
  EXPECT_EQ(corpusEntry("hamming-distance").bench_sizes, (std::vector<int64_t>{4, 4096}));
  EXPECT_EQ(corpusEntry("roberts-cross").bench_sizes, (std::vector<int64_t>{4096}));
  EXPECT_TRUE(corpusEntry("gx-kernel").reconstructed);
  EXPECT_FALSE(corpusEntry("sharpening").reconstructed);
  EXPECT_THROW(corpusEntry("nope"), CompileError);
  EXPECT_EQ(resolveSource("dot-product"), corpusPath("dot-product"));
}

TEST(Helpers, TrimmedMean) {
  EXPECT_DOUBLE_EQ(trimmedMean({5.0}), 5.0);
  EXPECT_DOUBLE_EQ(trimmedMean({1.0, 3.0}), 2.0);
  EXPECT_DOUBLE_EQ(trimmedMean({100.0, 1.0, 2.0, 3.0, -50.0}), 2.0);
}

TEST(Helpers, RandomInputsAreSeededAndReduced) {
  auto front = testing::corpusFrontend("hamming-distance");
  std::mt19937_64 a(1), b(1);
  auto x = randomInputs(front.ir, a);
  EXPECT_EQ(x, randomInputs(front.ir, b));
  for (const auto& [name, v] : x) {
    EXPECT_EQ(v.data.size(), 4u);
    for (auto e : v.data) EXPECT_LT(e, kDefaultModulus);
  }
}

TEST(Compile, EmitIrRoundTrips) {
  for (const auto& entry : corpus()) {
    SCOPED_TRACE(entry.name);
    CompileCommand cmd;
    cmd.file = entry.name;
    cmd.emit = "ir";
    auto r = capture(runCompile, cmd, withN(16));
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(ir::parseIr(r.out), testing::corpusFrontend(entry.name, 16).ir);
  }
}

TEST(Compile, SharpeningCircuitHasEightRotations) {
  CompileCommand cmd;
  cmd.file = "sharpening";
  cmd.emit = "circuit";
  auto r = capture(runCompile, cmd, withN(64));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = nlohmann::json::parse(r.out);
  int rotations = 0;
  for (const auto& op : j["ops"]) rotations += op["kind"] == "rotate";
  EXPECT_EQ(rotations, 8);
}

TEST(Compile, StatsJsonIsDeterministic) {
  CompileCommand cmd;
  cmd.file = "roberts-cross";
  cmd.emit = "stats";
  cmd.json = true;
  cmd.timing = false;
  auto a = capture(runCompile, cmd, withN(64));
  auto b = capture(runCompile, cmd, withN(64));
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(nlohmann::json::parse(a.out).contains("compile_ms"));
}

TEST(Compile, StopAfterPrintsIntermediateStage) {
  CompileCommand cmd;
  cmd.file = "dot-product";
  cmd.stop_after = "simdify";
  auto r = capture(runCompile, cmd);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("hl.extract"), std::string::npos);
  cmd.stop_after = "nonsense";
  EXPECT_EQ(capture(runCompile, cmd).code, kExitError);
}

TEST(Compile, DiagnosticsExitNonZero) {
  CompileCommand cmd;
  cmd.file = std::string(HECO_TEST_DATA_DIR) + "/secret-bound.heco";
  auto r = capture(runCompile, cmd);
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("secret-bound.heco"), std::string::npos);
  cmd.file = writeTemp("lex.heco", "secret int f(secret int x) { return 3a; }");
  r = capture(runCompile, cmd);
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("lexical error at 1:37"), std::string::npos) << r.err;
}

TEST(Run, BothModesAgree) {
  struct Case {
    std::string program;
    std::string input;
    std::string expected;
  };
  std::vector<Case> cases = {
      {"hamming-distance", R"({"x": [1, 0, 1, 1], "y": [1, 1, 0, 1]})", R"({"output":2})"},
      {"dot-product", R"({"x": [1,2,3,4,5,6,7,8], "y": [1,2,3,4,5,6,7,8]})", R"({"output":204})"},
  };
  for (const auto& c : cases) {
    for (const char* mode : {"naive", "batched"}) {
      RunCommand cmd;
      cmd.file = c.program;
      cmd.input = writeTemp(c.program + ".json", c.input);
      cmd.mode = mode;
      auto r = capture(runRun, cmd);
      EXPECT_EQ(r.code, kExitOk) << r.err;
      EXPECT_EQ(r.out, c.expected + "\n") << c.program << " " << mode;
    }
  }
}

TEST(Run, NoiseFailureHasItsOwnExitCode) {
  RunCommand cmd;
  cmd.file = std::string(HECO_TEST_DATA_DIR) + "/deep-chain.heco";
  cmd.input = std::string(HECO_TEST_DATA_DIR) + "/deep-chain.json";
  CommonOptions small;
  small.pipeline.params = "SMALL";
  auto r = capture(runRun, cmd, small);
  EXPECT_EQ(r.code, kExitNoise);
  EXPECT_NE(r.err.find("noise budget exceeded"), std::string::npos);
  EXPECT_NE(r.err.find("SMALL"), std::string::npos);
  CommonOptions automatic;
  EXPECT_EQ(capture(runRun, cmd, automatic).code, kExitOk);
}

TEST(Run, TraceGoesToStderr) {
  RunCommand cmd;
  cmd.file = "hamming-distance";
  cmd.input = writeTemp("trace.json", R"({"x": [1, 0, 1, 1], "y": [1, 1, 0, 1]})");
  cmd.trace = true;
  auto r = capture(runRun, cmd);
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.err.find("%0 input noise=1 slots=[1, 0, 1, 1]"), std::string::npos) << r.err;
  EXPECT_EQ(r.out, "{\"output\":2}\n");
}

TEST(Run, BadInputIsAnError) {
  RunCommand cmd;
  cmd.file = "hamming-distance";
  cmd.input = writeTemp("bad.json", R"({"x": [1, 0, 1, 1]})");
  auto r = capture(runRun, cmd);
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("missing input 'y'"), std::string::npos);
}

TEST(Compare, CorpusPasses) {
  for (const auto& entry : corpus()) {
    CompareCommand cmd;
    cmd.file = entry.name;
    cmd.trials = 100;
    auto r = capture(runCompare, cmd, withN(16));
    EXPECT_EQ(r.code, kExitOk) << entry.name << "\n" << r.out;
  }
}

TEST(Compare, SkippingSimdifyStillPasses) {
  CompareCommand cmd;
  cmd.file = "roberts-cross";
  cmd.trials = 30;
  CommonOptions common = withN(64);
  common.pipeline.skip.insert("simdify");
  EXPECT_EQ(capture(runCompare, cmd, common).code, kExitOk);
}

TEST(Compare, FlippedRotationIsCaught) {
  CompareCommand cmd;
  cmd.file = "roberts-cross";
  cmd.trials = 100;
  CommonOptions common = withN(64);
  common.pipeline.simdify.flip_rotation_sign = true;
  auto r = capture(runCompare, cmd, common);
  EXPECT_EQ(r.code, kExitMismatch);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("first diverging stage: simdify"), std::string::npos) << r.out;
  // The shrunk counterexample only uses 0 and 1.
  auto line = r.out.substr(r.out.find("counterexample: ") + 16);
  auto j = nlohmann::json::parse(line.substr(0, line.find('\n')));
  for (const auto& [name, v] : j.items()) {
    for (const auto& e : v) EXPECT_LE(e.get<int64_t>(), 1);
  }
}

TEST(Compare, ZeroTrialsIsVacuous) {
  CompareCommand cmd;
  cmd.file = "dot-product";
  cmd.trials = 0;
  auto r = capture(runCompare, cmd);
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("vacuous"), std::string::npos);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Bench, JsonIsDeterministicWithoutTiming) {
  BenchCommand cmd;
  cmd.name = "roberts-cross";
  cmd.sizes = {16, 64};
  cmd.repeat = 3;
  cmd.json = true;
  cmd.timing = false;
  cmd.timing_iterations = 1;
  auto a = capture(runBench, cmd);
  auto b = capture(runBench, cmd);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto rows = nlohmann::json::parse(a.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["batched"]["counts"]["rotate"], rows[1]["batched"]["counts"]["rotate"]);
  for (const auto& row : rows) EXPECT_EQ(row["verdict"], "PASS");
}

TEST(Bench, FaultyPipelineFailsRows) {
  BenchCommand cmd;
  cmd.name = "roberts-cross";
  cmd.sizes = {64};
  cmd.repeat = 10;
  cmd.timing_iterations = 1;
  CommonOptions common;
  common.pipeline.simdify.flip_rotation_sign = true;
  auto r = capture(runBench, cmd, common);
  EXPECT_EQ(r.code, kExitMismatch);
  EXPECT_NE(r.out.find("FAILED"), std::string::npos);
}

}  // namespace
}  // namespace heco::driver
