#ifndef HECO_DRIVER_CORPUS_H_
#define HECO_DRIVER_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace heco::driver {

struct CorpusEntry {
  std::string name;
  /// Size of every secret vector (the constant N) used by `bench` by default.
  std::vector<int64_t> bench_sizes;
  /// Not one of the benchmarks listed by name in the evaluation this corpus
  /// follows; written to round out the set.
  bool reconstructed = false;
};

const std::vector<CorpusEntry>& corpus();

/// $HECO_CORPUS_DIR, else the corpus/ directory of the source tree.
std::string corpusDir();
std::string corpusPath(const std::string& name);

/// Throws CompileError(kInput) for unknown names.
const CorpusEntry& corpusEntry(const std::string& name);

/// Returns `path_or_name` if it names a readable file, else the corpus file
/// of that name.
std::string resolveSource(const std::string& path_or_name);

/// Throws CompileError(kInput) if the file cannot be read.
std::string readFile(const std::string& path);

}  // namespace heco::driver

#endif  // HECO_DRIVER_CORPUS_H_
