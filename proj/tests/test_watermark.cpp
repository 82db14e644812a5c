#include <doctest.h>

#include <cmath>

#include "wm/fixtures.hpp"
#include "wm/watermark.hpp"

using namespace wm;

TEST_CASE("generate_watermark is deterministic and balanced") {
  Watermark a = generate_watermark(123, 256, 256, all_subbands());
  Watermark b = generate_watermark(123, 256, 256, all_subbands());
  REQUIRE(a.messages.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(a.messages[k].data() == b.messages[k].data());
    CHECK(a.messages[k].rows() == 128);
    CHECK(a.messages[k].cols() == 128);
    for (double v : a.messages[k].data()) CHECK(std::abs(v) == 1.0);
    // Binomial concentration: |mean| within 3 sigma of 0.
    CHECK(std::abs(mean(a.messages[k])) <= 0.02);
  }

  // Replicas of the same message with the documented sign pattern
  // (+, -, -, +) over (LL, LH, HL, HH).
  for (std::size_t i = 0; i < a.messages[0].size(); ++i) {
    CHECK(a.messages[1].data()[i] == -a.messages[0].data()[i]);
    CHECK(a.messages[2].data()[i] == -a.messages[0].data()[i]);
    CHECK(a.messages[3].data()[i] == a.messages[0].data()[i]);
  }

  // Adjacent seeds give nearly uncorrelated streams.
  Watermark c = generate_watermark(124, 256, 256, all_subbands());
  double dot = 0.0;
  for (std::size_t i = 0; i < a.messages[0].size(); ++i)
    dot += a.messages[0].data()[i] * c.messages[0].data()[i];
  CHECK(std::abs(dot / static_cast<double>(a.messages[0].size())) <= 0.02);

  CHECK_THROWS(generate_watermark(1, 5, 8, all_subbands()));
  CHECK_THROWS(generate_watermark(1, 8, 8, SubbandMask{}));
}

TEST_CASE("subband mask parsing") {
  CHECK(mask_to_string(parse_subband_mask("ll,lh,hl,hh")) == "LL,LH,HL,HH");
  CHECK(mask_to_string(parse_subband_mask("LH, HL ,hh")) == "LH,HL,HH");
  CHECK_THROWS(parse_subband_mask(""));
  CHECK_THROWS(parse_subband_mask("xx"));
}

TEST_CASE("embed at alpha 0 is the identity") {
  Image img = make_fixture("blobs", 64);
  WaveletSpec spec = standard_wavelet("grs4");
  Watermark w = generate_watermark(9, 64, 64, all_subbands());
  EmbeddingParams p{0.0, "grs4", all_subbands()};
  Image out = embed(img, w, p, spec);
  CHECK(max_abs_diff(img.matrix(), out.matrix()) <= 1e-9);
}

TEST_CASE("orthogonal embedding perturbs by exactly alpha * ||W||") {
  Image img = make_fixture("bandnoise", 64);
  WaveletSpec spec = standard_wavelet("daubechies4");
  Watermark w = generate_watermark(4, 64, 64, all_subbands());
  const double alpha = 2.5;
  EmbeddingParams p{alpha, "daubechies4", all_subbands()};
  Image out = embed(img, w, p, spec);
  double dist = frobenius_norm(out.matrix() - img.matrix());
  // ||W|| over 4 subbands = 2 sqrt(rows*cols/4) = sqrt(rows*cols).
  double expect = alpha * std::sqrt(64.0 * 64.0);
  CHECK(dist == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("embedding is additive-linear in alpha") {
  Image img = make_fixture("gradient", 32);
  WaveletSpec spec = standard_wavelet("coiflet6");
  Watermark w = generate_watermark(21, 32, 32, high_subbands());
  EmbeddingParams p1{1.0, "coiflet6", high_subbands()};
  EmbeddingParams p3{3.0, "coiflet6", high_subbands()};
  Matrix d1 = embed(img, w, p1, spec).matrix() - img.matrix();
  Matrix d3 = embed(img, w, p3, spec).matrix() - img.matrix();
  CHECK(max_abs_diff(d3, d1 * 3.0) <= 1e-9);
}

TEST_CASE("estimate recovers the message exactly without attack") {
  Image img = make_fixture("checkerboard", 64);
  for (const auto &name : standard_wavelet_names()) {
    WaveletSpec spec = standard_wavelet(name);
    for (const SubbandMask &mask :
         {all_subbands(), high_subbands(), SubbandMask{Subband::LL}}) {
      Watermark w = generate_watermark(77, 64, 64, mask);
      EmbeddingParams p{3.0, name, mask};
      Image marked = embed(img, w, p, spec);
      EstimatedWatermark est = estimate_watermark(marked, img, p, spec);
      INFO("wavelet ", name, " mask ", mask_to_string(mask));
      for (std::size_t k = 0; k < est.per_subband.size(); ++k)
        CHECK(max_abs_diff(est.per_subband[k], w.messages[k]) <= 1e-9);
      CHECK(correlation(w, est) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("estimate of the unwatermarked image is zero") {
  Image img = make_fixture("blobs", 32);
  WaveletSpec spec = standard_wavelet("grs4");
  EmbeddingParams p{3.0, "grs4", all_subbands()};
  EstimatedWatermark est = estimate_watermark(img, img, p, spec);
  for (const Matrix &m : est.per_subband)
    CHECK(frobenius_norm(m) <= 1e-12);
  Watermark w = generate_watermark(5, 32, 32, all_subbands());
  CHECK_THROWS_AS(correlation(w, est), DegenerateEstimate);
  CHECK(correlation_or_zero(w, est) == 0.0);
}

TEST_CASE("white pixel noise maps to white transform noise") {
  // Orthonormal transforms preserve white-noise statistics, so the
  // per-entry std of alpha * West is about the pixel-domain sigma.
  Image img = make_fixture("bandnoise", 128);
  WaveletSpec spec = standard_wavelet("daubechies8");
  const double alpha = 3.0, sigma = 4.0;
  EmbeddingParams p{alpha, "daubechies8", all_subbands()};
  Watermark w = generate_watermark(31, 128, 128, all_subbands());
  Image marked = embed(img, w, p, spec);
  Image noisy(marked.rows(), marked.cols());
  SplitMix64 rng(55);
  for (std::size_t i = 0; i < marked.matrix().size(); ++i) {
    // sum of 12 uniforms: good-enough normal with std sigma
    double g = 0.0;
    for (int k = 0; k < 12; ++k) g += rng.next_double();
    noisy.matrix().data()[i] = marked.matrix().data()[i] + sigma * (g - 6.0);
  }
  EstimatedWatermark est = estimate_watermark(noisy, img, p, spec);
  double var = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < est.per_subband.size(); ++b)
    for (std::size_t i = 0; i < est.per_subband[b].size(); ++i) {
      double noise = alpha * (est.per_subband[b].data()[i] -
                              w.messages[b].data()[i]);
      var += noise * noise;
      ++n;
    }
  double sd = std::sqrt(var / static_cast<double>(n));
  CHECK(sd == doctest::Approx(sigma).epsilon(0.10));
}

TEST_CASE("correlation basics") {
  Watermark w = generate_watermark(2, 256, 256, all_subbands());
  EstimatedWatermark est;
  est.mask = all_subbands();
  for (int i = 0; i < 4; ++i) est.per_subband.push_back(w.messages[i]);
  CHECK(correlation(w, est) == doctest::Approx(1.0));
  for (auto &m : est.per_subband) m *= -1.0;
  CHECK(correlation(w, est) == doctest::Approx(-1.0));

  // Scale invariance.
  for (auto &m : est.per_subband) m *= -0.037;
  CHECK(correlation(w, est) == doctest::Approx(1.0).epsilon(1e-12));

  // Independent messages are nearly orthogonal.
  Watermark other = generate_watermark(3, 256, 256, all_subbands());
  EstimatedWatermark ind;
  ind.mask = {Subband::LL};
  ind.per_subband.push_back(other.messages[0]);
  Watermark w128 = generate_watermark(2, 256, 256, SubbandMask{Subband::LL});
  CHECK(std::abs(correlation(w128, ind)) <= 0.03);
}

TEST_CASE("embed validates arguments") {
  Image img = make_fixture("gradient", 32);
  WaveletSpec spec = standard_wavelet("grs4");
  Watermark w = generate_watermark(1, 64, 64, all_subbands());
  EmbeddingParams p{3.0, "grs4", all_subbands()};
  CHECK_THROWS(embed(img, w, p, spec)); // size mismatch

  Watermark w2 = generate_watermark(1, 32, 32, high_subbands());
  CHECK_THROWS(embed(img, w2, p, spec)); // mask mismatch

  EmbeddingParams wrong{3.0, "daubechies4", all_subbands()};
  Watermark w3 = generate_watermark(1, 32, 32, all_subbands());
  CHECK_THROWS(embed(img, w3, wrong, spec)); // spec name mismatch
}
