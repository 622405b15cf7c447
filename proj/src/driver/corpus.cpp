#include "heco/driver/corpus.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heco/support.h"

namespace heco::driver {

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = {
      {"linear-polynomial", {4096}, false},
      {"quadratic-polynomial", {4096}, false},
      {"dot-product", {8}, false},
      {"l2-distance", {4}, false},
      {"hamming-distance", {4, 4096}, false},
      {"box-blur", {4096}, false},
      {"gx-kernel", {4096}, true},
      {"gy-kernel", {4096}, true},
      {"roberts-cross", {4096}, false},
      {"sharpening", {4096}, false},
  };
  return entries;
}

std::string corpusDir() {
  if (const char* dir = std::getenv("HECO_CORPUS_DIR"); dir != nullptr && *dir != '\0') return dir;
  return std::string(HECO_SOURCE_DIR) + "/corpus";
}

std::string corpusPath(const std::string& name) { return corpusDir() + "/" + name + ".heco"; }

const CorpusEntry& corpusEntry(const std::string& name) {
  for (const auto& e : corpus()) {
    if (e.name == name) return e;
  }
  throw CompileError(ErrorKind::kInput, "unknown benchmark '" + name + "'");
}

std::string resolveSource(const std::string& path_or_name) {
  if (std::filesystem::is_regular_file(path_or_name)) return path_or_name;
  for (const auto& e : corpus()) {
    if (e.name == path_or_name) return corpusPath(e.name);
  }
  return path_or_name;
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CompileError(ErrorKind::kInput, "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace heco::driver
