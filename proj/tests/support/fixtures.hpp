#ifndef CITEAUDIT_TESTS_FIXTURES_HPP
#define CITEAUDIT_TESTS_FIXTURES_HPP

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace citeaudit::testing {

inline std::filesystem::path fixture_dir() { return CITEAUDIT_FIXTURE_DIR; }
inline std::filesystem::path data_dir() { return CITEAUDIT_DATA_DIR; }
inline std::filesystem::path config_dir() { return CITEAUDIT_CONFIG_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string fixture(const std::string& rel) { return slurp(fixture_dir() / rel); }

/// Fresh empty directory under the build tree's temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("citeaudit-test-" + name + "-" +
                                                       std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace citeaudit::testing

#endif  // CITEAUDIT_TESTS_FIXTURES_HPP
