#include <doctest.h>

#include <cmath>

#include "wm/dwt2d.hpp"
#include "wm/watermark.hpp"

using namespace wm;

namespace {

Image random_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Image img(rows, cols);
  SplitMix64 rng(seed);
  for (double &v : img.matrix().data()) v = 255.0 * rng.next_double();
  return img;
}

double energy(const Matrix &m) {
  double e = frobenius_norm(m);
  return e * e;
}

} // namespace

TEST_CASE("perfect reconstruction for every shipped spec") {
  for (const auto &name : standard_wavelet_names()) {
    WaveletSpec spec = standard_wavelet(name);
    Image img = random_image(16, 16, 7);
    SubbandSet s = dwt2(img, spec);
    CHECK(s.ll.rows() == 8);
    CHECK(s.ll.cols() == 8);
    Image back = idwt2(s, spec);
    INFO("wavelet ", name);
    CHECK(max_abs_diff(img.matrix(), back.matrix()) <= 1e-9);
  }
}

TEST_CASE("round trip on non-square and minimal sizes") {
  for (const auto &name : standard_wavelet_names()) {
    WaveletSpec spec = standard_wavelet(name);
    Image img = random_image(12, 20, 11);
    CHECK(max_abs_diff(img.matrix(), idwt2(dwt2(img, spec), spec).matrix()) <=
          1e-9);
  }
}

TEST_CASE("orthogonal specs conserve energy") {
  for (const auto &name : standard_wavelet_names()) {
    WaveletSpec spec = standard_wavelet(name);
    if (spec.wavelet_class != WaveletClass::orthogonal) continue;
    Image img = random_image(16, 16, 3);
    SubbandSet s = dwt2(img, spec);
    double e_sub =
        energy(s.ll) + energy(s.lh) + energy(s.hl) + energy(s.hh);
    double e_img = energy(img.matrix());
    INFO("wavelet ", name);
    CHECK(std::abs(e_sub - e_img) / e_img <= 1e-9);
  }
}

TEST_CASE("regular filters kill DC, GRS filters spread it") {
  Image flat(16, 16);
  for (double &v : flat.matrix().data()) v = 100.0;

  SubbandSet db = dwt2(flat, standard_wavelet("daubechies4"));
  CHECK(frobenius_norm(db.lh) <= 1e-10 * 100.0 * 16.0);
  CHECK(frobenius_norm(db.hl) <= 1e-10 * 100.0 * 16.0);
  CHECK(frobenius_norm(db.hh) <= 1e-10 * 100.0 * 16.0);

  SubbandSet grs = dwt2(flat, standard_wavelet("grs4"));
  CHECK(frobenius_norm(grs.hh) > 1.0);
}

TEST_CASE("dwt2 input validation") {
  WaveletSpec spec = standard_wavelet("daubechies8");
  CHECK_THROWS(dwt2(Matrix(7, 8), spec));
  // smaller than the 8-tap filter
  CHECK_THROWS(dwt2(Matrix(4, 4), spec));
}

TEST_CASE("idwt2 validates spec and shapes") {
  WaveletSpec grs = standard_wavelet("grs4");
  WaveletSpec db4 = standard_wavelet("daubechies4");
  SubbandSet s = dwt2(random_image(8, 8, 1), grs);
  CHECK_THROWS(idwt2(s, db4));
  s.spec_name = db4.name;
  SubbandSet bad = dwt2(random_image(8, 8, 1), grs);
  bad.hh = Matrix(2, 2);
  CHECK_THROWS(idwt2(bad, grs));
}

TEST_CASE("idwt2 linearity and zero input") {
  WaveletSpec spec = standard_wavelet("grs4");
  SubbandSet zero = dwt2(Matrix(8, 8), spec);
  Image z = idwt2(zero, spec);
  CHECK(frobenius_norm(z.matrix()) == 0.0);

  SubbandSet a = dwt2(random_image(8, 8, 5), spec);
  SubbandSet b = dwt2(random_image(8, 8, 6), spec);
  SubbandSet ab = a;
  ab.ll += b.ll;
  ab.lh += b.lh;
  ab.hl += b.hl;
  ab.hh += b.hh;
  Matrix lhs = idwt2_matrix(ab, spec);
  Matrix rhs = idwt2_matrix(a, spec) + idwt2_matrix(b, spec);
  CHECK(max_abs_diff(lhs, rhs) <= 1e-10);
}

TEST_CASE("dwt2 is deterministic bit for bit") {
  WaveletSpec spec = standard_wavelet("coiflet6");
  Image img = random_image(32, 32, 17);
  SubbandSet a = dwt2(img, spec);
  SubbandSet b = dwt2(img, spec);
  CHECK(a.ll.data() == b.ll.data());
  CHECK(a.lh.data() == b.lh.data());
  CHECK(a.hl.data() == b.hl.data());
  CHECK(a.hh.data() == b.hh.data());
}
