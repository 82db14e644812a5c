#include <doctest.h>

#include <cmath>
#include <limits>

#include "wm/fixtures.hpp"
#include "wm/metrics.hpp"

using namespace wm;

namespace {

Histogram make_hist(std::vector<double> probs) {
  Histogram h;
  h.probabilities = std::move(probs);
  for (std::size_t i = 0; i <= h.probabilities.size(); ++i)
    h.bin_edges.push_back(static_cast<double>(i));
  return h;
}

} // namespace

TEST_CASE("pixel bin edges and histogram basics") {
  auto edges = pixel_bin_edges();
  REQUIRE(edges.size() == 257);
  CHECK(edges.front() == doctest::Approx(-0.5));
  CHECK(edges.back() == doctest::Approx(255.5));

  Matrix m = Matrix::from_data(2, 3, {0.0, 0.0, 255.0, 128.0, -40.0, 300.0});
  Histogram h = histogram(m, edges);
  double total = 0.0;
  for (double p : h.probabilities) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // clamping: -40 lands in bin 0, 300 in bin 255
  CHECK(h.probabilities[0] == doctest::Approx(3.0 / 6.0));
  CHECK(h.probabilities[255] == doctest::Approx(2.0 / 6.0));
  CHECK(h.probabilities[128] == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("rescale_to_pixel_range") {
  Matrix m = Matrix::from_data(1, 3, {-2.0, 0.0, 6.0});
  Matrix r = rescale_to_pixel_range(m);
  CHECK(r(0, 0) == doctest::Approx(0.0));
  CHECK(r(0, 1) == doctest::Approx(255.0 * 2.0 / 8.0));
  CHECK(r(0, 2) == doctest::Approx(255.0));

  // constant input maps to zeros (no range to stretch)
  Matrix c(4, 4, 7.0);
  CHECK(max_abs_diff(rescale_to_pixel_range(c), Matrix(4, 4, 0.0)) == 0.0);
}

TEST_CASE("KL divergence hand-computed values") {
  Histogram p = make_hist({0.5, 0.5});
  Histogram q = make_hist({0.25, 0.75});
  // 0.5*log2(2) + 0.5*log2(2/3)
  double expect = 0.5 + 0.5 * std::log2(2.0 / 3.0);
  CHECK(kl_divergence(p, q) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  // asymmetry
  CHECK(kl_divergence(p, q) != doctest::Approx(kl_divergence(q, p)));
  // infinite when support mismatches
  Histogram r = make_hist({1.0, 0.0});
  Histogram s = make_hist({0.0, 1.0});
  CHECK(std::isinf(kl_divergence(r, s)));
  CHECK(kl_divergence(s, s) == doctest::Approx(0.0));
}

TEST_CASE("JS divergence properties and hand value") {
  Histogram r = make_hist({1.0, 0.0});
  Histogram s = make_hist({0.0, 1.0});
  CHECK(js_divergence(r, s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(js_divergence(r, r) == doctest::Approx(0.0));

  Histogram p = make_hist({0.5, 0.5});
  Histogram q = make_hist({0.25, 0.75});
  // m = (3/8, 5/8); JSD = 0.5 KL(p||m) + 0.5 KL(q||m), base 2
  double klpm = 0.5 * std::log2(0.5 / (3.0 / 8.0)) +
                0.5 * std::log2(0.5 / (5.0 / 8.0));
  double klqm = 0.25 * std::log2(0.25 / (3.0 / 8.0)) +
                0.75 * std::log2(0.75 / (5.0 / 8.0));
  double expect = 0.5 * klpm + 0.5 * klqm;
  CHECK(js_divergence(p, q) == doctest::Approx(expect).epsilon(1e-12));
  // symmetry and bounds
  CHECK(js_divergence(p, q) == doctest::Approx(js_divergence(q, p)));
  CHECK(js_divergence(p, q) >= 0.0);
  CHECK(js_divergence(p, q) <= 1.0);
}

TEST_CASE("jsd_table structure") {
  Image img = make_fixture("blobs", 64);
  WaveletSpec spec = standard_wavelet("daubechies4");
  auto t = jsd_table(img, spec);
  for (int i = 0; i < 5; ++i) {
    CHECK(t[i][i] == doctest::Approx(0.0));
    for (int j = 0; j < 5; ++j) {
      CHECK(t[i][j] == doctest::Approx(t[j][i]).epsilon(1e-12));
      CHECK(t[i][j] >= 0.0);
      CHECK(t[i][j] <= 1.0);
    }
  }
  // highpass subbands look far less like the original than LL does
  CHECK(t[0][1] < t[0][4]);
}

TEST_CASE("uqi basics") {
  Image a = make_fixture("blobs", 64);
  CHECK(uqi(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  // flat identical images: defined as 1
  Image f1(16, 16), f2(16, 16);
  for (double &v : f1.matrix().data()) v = 100.0;
  for (double &v : f2.matrix().data()) v = 100.0;
  CHECK(uqi(f1, f2) == doctest::Approx(1.0));

  // mean shift strictly lowers the index
  Image b = a;
  for (double &v : b.matrix().data()) v += 20.0;
  double shifted = uqi(a, b);
  CHECK(shifted < 1.0);

  // heavier distortion scores lower than lighter distortion
  Image c = a;
  {
    std::uint64_t s = 99;
    for (double &v : c.matrix().data()) {
      s = s * 6364136223846793005ULL + 1442695040888963407ULL;
      v += ((s >> 33) % 41) - 20.0;
    }
  }
  Image d = a;
  {
    std::uint64_t s = 99;
    for (double &v : d.matrix().data()) {
      s = s * 6364136223846793005ULL + 1442695040888963407ULL;
      v += (((s >> 33) % 41) - 20.0) * 0.1;
    }
  }
  CHECK(uqi(a, c) < uqi(a, d));
  CHECK(uqi(a, d) < 1.0);
  CHECK(uqi(a, c) >= -1.0);

  // symmetric in its arguments
  CHECK(uqi(a, c) == doctest::Approx(uqi(c, a)).epsilon(1e-12));

  CHECK_THROWS(uqi(a, Image(32, 32)));
  CHECK_THROWS(uqi(a, b, 0));
  CHECK_THROWS(uqi(a, b, 8, 0));
}

TEST_CASE("uqi hand-computed 2x2 single window") {
  // a = [1 2; 3 4], b = [2 4; 6 8] = 2a: perfect correlation, but
  // luminance/contrast differ.
  Image a(2, 2), b(2, 2);
  a.matrix() = Matrix::from_data(2, 2, {1, 2, 3, 4});
  b.matrix() = Matrix::from_data(2, 2, {2, 4, 6, 8});
  // population stats: xbar=2.5 ybar=5 sx2=1.25 sy2=5 sxy=2.5
  double expect = (4.0 * 2.5 * 2.5 * 5.0) / ((1.25 + 5.0) * (2.5 * 2.5 + 25.0));
  CHECK(uqi(a, b, 2, 1) == doctest::Approx(expect).epsilon(1e-12));
}
