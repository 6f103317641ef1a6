#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "favar/linalg.hpp"

namespace favar::io {

// Little-endian flat binary writer for artifact files. Matrices go out
// row-major regardless of in-memory layout.
class BinWriter {
 public:
  explicit BinWriter(const std::string& path);
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void i64(std::int64_t v);
  void f64(double v);
  void str(const std::string& s);
  void vec_i32(const std::vector<int>& v);
  void vec_f64(const Vector& v);
  void mat_f64(const Matrix& m);

 private:
  std::ofstream f_;
  void raw(const void* p, std::size_t n);
};

class BinReader {
 public:
  explicit BinReader(const std::string& path);
  std::uint8_t u8();
  std::uint32_t u32();
  std::int64_t i64();
  double f64();
  std::string str();
  std::vector<int> vec_i32();
  Vector vec_f64();
  Matrix mat_f64();
  bool at_end();

 private:
  std::ifstream f_;
  std::string path_;
  void raw(void* p, std::size_t n);
};

}  // namespace favar::io
