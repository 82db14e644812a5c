#include <doctest.h>

#include <cmath>

#include "wm/attacks.hpp"
#include "wm/fixtures.hpp"

using namespace wm;

namespace {

double mse(const Image &a, const Image &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.matrix().size(); ++i) {
    double d = a.matrix().data()[i] - b.matrix().data()[i];
    s += d * d;
  }
  return s / static_cast<double>(a.matrix().size());
}

bool is_valid_pixels(const Image &img) {
  for (double v : img.matrix().data()) {
    if (v < 0.0 || v > 255.0) return false;
    if (v != std::floor(v)) return false;
  }
  return true;
}

} // namespace

TEST_CASE("none attack quantizes to 8 bits") {
  Image img = make_fixture("gradient", 32);
  img.matrix()(0, 0) = 12.6;
  img.matrix()(0, 1) = -3.0;
  img.matrix()(0, 2) = 270.2;
  Image out = apply_attack(img, AttackSpec{AttackKind::none});
  CHECK(is_valid_pixels(out));
  CHECK(out.matrix()(0, 0) == 13.0);
  CHECK(out.matrix()(0, 1) == 0.0);
  CHECK(out.matrix()(0, 2) == 255.0);
  // already-quantized pixels pass through unchanged
  Image again = apply_attack(out, AttackSpec{AttackKind::none});
  CHECK(max_abs_diff(out.matrix(), again.matrix()) == 0.0);
}

TEST_CASE("jpeg-like attack output domain and determinism") {
  Image img = make_fixture("blobs", 64);
  Image a = jpeg_like_attack(img, 30);
  Image b = jpeg_like_attack(img, 30);
  CHECK(is_valid_pixels(a));
  CHECK(max_abs_diff(a.matrix(), b.matrix()) == 0.0);
  CHECK_THROWS(jpeg_like_attack(img, 0));
  CHECK_THROWS(jpeg_like_attack(img, 101));
}

TEST_CASE("jpeg-like attack preserves even constant images exactly") {
  // A constant block has only a DC coefficient 8*(c-128); at quality 50
  // the DC step is 16, so even pixel values survive the round trip.
  for (double c : {100.0, 128.0, 200.0}) {
    Image img(16, 16);
    for (double &v : img.matrix().data()) v = c;
    Image out = jpeg_like_attack(img, 50);
    CHECK(max_abs_diff(out.matrix(), img.matrix()) == 0.0);
  }
}

TEST_CASE("jpeg-like MSE decreases as quality rises") {
  Image img = make_fixture("bandnoise", 64);
  double prev = 1e18;
  for (int q : {10, 30, 50, 70, 90}) {
    double e = mse(img, jpeg_like_attack(img, q));
    CHECK(e < prev);
    prev = e;
  }
  // near-lossless at the top of the scale
  Image top = jpeg_like_attack(img, 100);
  Image base = apply_attack(img, AttackSpec{AttackKind::none});
  CHECK(max_abs_diff(top.matrix(), base.matrix()) <= 1.0);
}

TEST_CASE("jpeg2000-like attack output domain and determinism") {
  Image img = make_fixture("blobs", 64);
  Image a = jpeg2000_like_attack(img, 0.5);
  Image b = jpeg2000_like_attack(img, 0.5);
  CHECK(is_valid_pixels(a));
  CHECK(max_abs_diff(a.matrix(), b.matrix()) == 0.0);
  CHECK_THROWS(jpeg2000_like_attack(img, 0.0));
  CHECK_THROWS(jpeg2000_like_attack(img, -1.0));
}

TEST_CASE("jpeg2000-like MSE decreases as bitrate rises") {
  Image img = make_fixture("bandnoise", 64);
  double prev = 1e18;
  for (double bpp : {0.25, 0.5, 1.0, 2.0}) {
    double e = mse(img, jpeg2000_like_attack(img, bpp));
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("jpeg2000-like unreachable rate raises CalibrationError") {
  Image img = make_fixture("gradient", 64);
  CHECK_THROWS_AS(jpeg2000_like_attack(img, 50.0), CalibrationError);
}

TEST_CASE("attack_to_string") {
  CHECK(attack_to_string(AttackSpec{AttackKind::none}) == "none");
  CHECK(attack_to_string(AttackSpec{AttackKind::jpeg_like, 30}) ==
        "jpeg@Q=30");
  CHECK(attack_to_string(AttackSpec{AttackKind::jpeg2000_like, 50, 0.25}) ==
        "jpeg2000@0.25bpp");
}
