#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pyidiom/equivalence.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return PYIDIOM_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& rel) { return source_dir() / "tests" / "fixtures" / rel; }
inline std::filesystem::path corpus_dir() { return source_dir() / "tests" / "corpus"; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string templ = (std::filesystem::temp_directory_path() / "pyidiom-test-XXXXXX").string();
    path_ = ::mkdtemp(templ.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Stdout of `script` under the host interpreter: the behavioural oracle.
inline std::string python_stdout(const std::string& script) {
  const auto r = pyidiom::equivalence::run_script(script, {});
  return std::to_string(r.exit_code) + "|" + r.out;
}

}  // namespace testing
