#ifndef HECO_TESTS_TEST_SUPPORT_H_
#define HECO_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "heco/driver/commands.h"
#include "heco/driver/corpus.h"
#include "heco/driver/pipeline.h"

namespace heco::testing {

/// Front end on DSL source, with N overridden when `n` is set.
driver::FrontendResult frontend(std::string_view source, std::optional<int64_t> n = std::nullopt);

/// Front end on a corpus program.
driver::FrontendResult corpusFrontend(const std::string& name,
                                      std::optional<int64_t> n = std::nullopt);

/// Batched compile with the default configuration unless given one.
driver::CompileResult compile(const driver::FrontendResult& front,
                              const driver::PipelineConfig& config = {});

driver::CompileResult compileNaive(const driver::FrontendResult& front);

/// Source text of a file under tests/data.
std::string dataFile(const std::string& name);

/// Runs `trials` random inputs through the reference interpreter and the
/// compiled circuit. Returns the first divergence found.
std::optional<driver::Divergence> findDivergence(const driver::FrontendResult& front,
                                                 const driver::CompileResult& compiled,
                                                 int trials, uint64_t seed);

}  // namespace heco::testing

#endif  // HECO_TESTS_TEST_SUPPORT_H_
