#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "favar/linalg.hpp"

namespace testsupport {

// Scratch directory rooted under the test working directory; removed on
// destruction so repeated runs stay clean.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("favar_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  f << contents;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

// Spearman rank correlation; ties broken by average rank.
double spearman(const favar::Vector& a, const favar::Vector& b);

// Pearson correlation.
double pearson(const favar::Vector& a, const favar::Vector& b);

}  // namespace testsupport
