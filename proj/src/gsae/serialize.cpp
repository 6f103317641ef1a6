#include "favar/gsae/serialize.hpp"

#include "favar/io/binio.hpp"

namespace favar::gsae {

namespace {
constexpr char kMagic[] = "GSAEPARM";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_params(const std::string& path, const GsAeParams& p) {
  io::BinWriter w(path);
  w.str(kMagic);
  w.u32(kVersion);
  const auto& a = p.arch;
  w.u32(a.N);
  w.u32(a.K);
  w.u32(a.C);
  w.u32(a.L);
  w.vec_i32(a.encoder_dims);
  w.vec_i32(a.shared_decoder_dims);
  w.u8(a.activation == Activation::kTanh ? 0 : 1);
  w.f64(a.leaky_a);
  w.vec_i32(a.group_of);
  w.u32(a.anchor_count);
  for (const auto& W : p.enc_W) w.mat_f64(W);
  for (const auto& b : p.enc_b) w.vec_f64(b);
  for (const auto& W : p.dec_W) w.mat_f64(W);
  for (const auto& b : p.dec_b) w.vec_f64(b);
  w.mat_f64(p.head_W);
  w.vec_f64(p.head_b);
  w.mat_f64(p.B);
  w.mat_f64(p.P);
  w.mat_f64(p.anchor_mask);
}

GsAeParams load_params(const std::string& path) {
  io::BinReader r(path);
  if (r.str() != kMagic) throw BadArtifact(path + ": not a parameter artifact");
  const auto version = r.u32();
  if (version != kVersion) {
    throw BadArtifact(path + ": unsupported parameter artifact version " +
                      std::to_string(version));
  }
  GsAeParams p;
  auto& a = p.arch;
  a.N = static_cast<int>(r.u32());
  a.K = static_cast<int>(r.u32());
  a.C = static_cast<int>(r.u32());
  a.L = static_cast<int>(r.u32());
  a.encoder_dims = r.vec_i32();
  a.shared_decoder_dims = r.vec_i32();
  a.activation = r.u8() == 0 ? Activation::kTanh : Activation::kLeakyRelu;
  a.leaky_a = r.f64();
  a.group_of = r.vec_i32();
  a.anchor_count = static_cast<int>(r.u32());
  a.validate();
  for (int l = 0; l < a.L; ++l) p.enc_W.push_back(r.mat_f64());
  for (int l = 0; l < a.L; ++l) p.enc_b.push_back(r.vec_f64());
  for (int l = 0; l + 1 < a.L; ++l) p.dec_W.push_back(r.mat_f64());
  for (int l = 0; l + 1 < a.L; ++l) p.dec_b.push_back(r.vec_f64());
  p.head_W = r.mat_f64();
  p.head_b = r.vec_f64();
  p.B = r.mat_f64();
  p.P = r.mat_f64();
  p.anchor_mask = r.mat_f64();

  const GsAeGrads shape = zero_grads(a);
  auto expect = [&](const Matrix& got, const Matrix& want, const char* what) {
    if (got.rows() != want.rows() || got.cols() != want.cols()) {
      throw BadArtifact(path + ": tensor shape mismatch in " +
                        std::string(what));
    }
  };
  for (int l = 0; l < a.L; ++l) expect(p.enc_W[l], shape.enc_W[l], "encoder");
  for (int l = 0; l + 1 < a.L; ++l) expect(p.dec_W[l], shape.dec_W[l], "decoder");
  expect(p.head_W, shape.head_W, "heads");
  expect(p.B, shape.B, "B");
  return p;
}

}  // namespace favar::gsae
