#include "test_support.h"

namespace heco::testing {

driver::FrontendResult frontend(std::string_view source, std::optional<int64_t> n) {
  driver::FrontendOptions options;
  options.n = n;
  return driver::runFrontend(source, options);
}

driver::FrontendResult corpusFrontend(const std::string& name, std::optional<int64_t> n) {
  return frontend(driver::readFile(driver::corpusPath(name)), n);
}

driver::CompileResult compile(const driver::FrontendResult& front,
                              const driver::PipelineConfig& config) {
  return driver::compileBatched(front.ir, config, backend::BackendConfig{});
}

driver::CompileResult compileNaive(const driver::FrontendResult& front) {
  driver::PipelineConfig config;
  config.passes = driver::naivePasses();
  return driver::compileNaive(front.ir, config, backend::BackendConfig{});
}

std::string dataFile(const std::string& name) {
  return driver::readFile(std::string(HECO_TEST_DATA_DIR) + "/" + name);
}

std::optional<driver::Divergence> findDivergence(const driver::FrontendResult& front,
                                                 const driver::CompileResult& compiled,
                                                 int trials, uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < trials; ++i) {
    if (auto d = driver::checkOnce(front, compiled, driver::randomInputs(front.ir, rng))) return d;
  }
  return std::nullopt;
}

}  // namespace heco::testing
