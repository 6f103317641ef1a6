#include "favar/io/binio.hpp"

#include "favar/errors.hpp"

namespace favar::io {

BinWriter::BinWriter(const std::string& path) : f_(path, std::ios::binary) {
  if (!f_) throw Error("cannot write " + path);
}

void BinWriter::raw(const void* p, std::size_t n) {
  f_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!f_) throw Error("binary write failed");
}

void BinWriter::u8(std::uint8_t v) { raw(&v, 1); }
void BinWriter::u32(std::uint32_t v) { raw(&v, 4); }
void BinWriter::i64(std::int64_t v) { raw(&v, 8); }
void BinWriter::f64(double v) { raw(&v, 8); }

void BinWriter::str(const std::string& s) {
  i64(static_cast<std::int64_t>(s.size()));
  raw(s.data(), s.size());
}

void BinWriter::vec_i32(const std::vector<int>& v) {
  i64(static_cast<std::int64_t>(v.size()));
  for (int x : v) u32(static_cast<std::uint32_t>(x));
}

void BinWriter::vec_f64(const Vector& v) {
  i64(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
}

void BinWriter::mat_f64(const Matrix& m) {
  i64(m.rows());
  i64(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
}

BinReader::BinReader(const std::string& path)
    : f_(path, std::ios::binary), path_(path) {
  if (!f_) throw BadArtifact("cannot open " + path);
}

void BinReader::raw(void* p, std::size_t n) {
  f_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (f_.gcount() != static_cast<std::streamsize>(n)) {
    throw BadArtifact(path_ + ": truncated artifact");
  }
}

std::uint8_t BinReader::u8() {
  std::uint8_t v;
  raw(&v, 1);
  return v;
}

std::uint32_t BinReader::u32() {
  std::uint32_t v;
  raw(&v, 4);
  return v;
}

std::int64_t BinReader::i64() {
  std::int64_t v;
  raw(&v, 8);
  return v;
}

double BinReader::f64() {
  double v;
  raw(&v, 8);
  return v;
}

std::string BinReader::str() {
  const std::int64_t n = i64();
  if (n < 0 || n > (1 << 28)) throw BadArtifact(path_ + ": bad string length");
  std::string s(static_cast<std::size_t>(n), '\0');
  raw(s.data(), s.size());
  return s;
}

std::vector<int> BinReader::vec_i32() {
  const std::int64_t n = i64();
  if (n < 0 || n > (1 << 28)) throw BadArtifact(path_ + ": bad vector length");
  std::vector<int> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = static_cast<int>(u32());
  return v;
}

Vector BinReader::vec_f64() {
  const std::int64_t n = i64();
  if (n < 0 || n > (1 << 28)) throw BadArtifact(path_ + ": bad vector length");
  Vector v(n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f64();
  return v;
}

Matrix BinReader::mat_f64() {
  const std::int64_t r = i64();
  const std::int64_t c = i64();
  if (r < 0 || c < 0 || r * c > (1LL << 32)) {
    throw BadArtifact(path_ + ": bad matrix shape");
  }
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = f64();
  return m;
}

bool BinReader::at_end() { return f_.peek() == EOF; }

}  // namespace favar::io
