#include "wm/fixtures.hpp"

#include <cmath>
#include <stdexcept>

#include "wm/watermark.hpp"

namespace wm {

namespace {

// Diagonal ramp with a smooth low-frequency swell on top.  The swell
// keeps per-window variance high (image-like local contrast) without
// adding energy to the highpass half-bands.
Image gradient(std::size_t n) {
  Image img(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      double ramp = 20.0 + 215.0 * static_cast<double>(r + c) /
                               static_cast<double>(2 * n - 2);
      double rr = static_cast<double>(r), cc = static_cast<double>(c);
      double swell = 16.0 * std::sin(2.0 * M_PI * rr / 23.0) *
                         std::sin(2.0 * M_PI * cc / 19.0) +
                     8.0 * std::sin(2.0 * M_PI * (rr + 2.0 * cc) / 31.0);
      img(r, c) = ramp + swell;
    }
  return quantize8(img);
}

// 32-pixel blocks with a mild ramp inside each block so the histogram
// is not a pure two-point mass.  Moderate contrast and large blocks keep
// the edge content cheap for transform codecs.
Image checkerboard(std::size_t n) {
  Image img(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      bool dark = ((r / 32) + (c / 32)) % 2 == 0;
      double base = dark ? 96.0 : 160.0;
      double ramp = 24.0 * static_cast<double>((r % 32) + (c % 32)) / 62.0;
      double rr = static_cast<double>(r), cc = static_cast<double>(c);
      double swell = 14.0 * std::sin(2.0 * M_PI * rr / 18.0) *
                     std::sin(2.0 * M_PI * cc / 14.0);
      img(r, c) = base + ramp - 12.0 + swell;
    }
  return quantize8(img);
}

// White noise smoothed by repeated 5x5 box filtering (periodic), then
// stretched to full range.  The heavy smoothing keeps nearly all energy
// in the lowpass half-bands, like a natural image's coarse structure.
Image bandnoise(std::size_t n) {
  Matrix m(n, n);
  SplitMix64 rng(0x5eedf1e1d5ULL);
  for (double &v : m.data()) v = rng.next_double();
  for (int pass = 0; pass < 4; ++pass) {
    Matrix s(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        double acc = 0.0;
        for (int dr = -2; dr <= 2; ++dr)
          for (int dc = -2; dc <= 2; ++dc)
            acc += m((r + n + static_cast<std::size_t>(dr + 2) - 2) % n,
                     (c + n + static_cast<std::size_t>(dc + 2) - 2) % n);
        s(r, c) = acc / 25.0;
      }
    m = s;
  }
  double lo = m.data()[0], hi = m.data()[0];
  for (double v : m.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Image img(n, n);
  for (std::size_t i = 0; i < m.size(); ++i)
    img.matrix().data()[i] = 255.0 * (m.data()[i] - lo) / (hi - lo);
  return quantize8(img);
}

// Sum of Gaussian blobs of several widths over a midgray background,
// with faint texture noise.
Image blobs(std::size_t n) {
  struct Blob {
    double r, c, sigma, amp;
  };
  const Blob spots[] = {{0.3, 0.3, 0.10, 120.0}, {0.7, 0.6, 0.18, -90.0},
                        {0.2, 0.8, 0.06, 80.0},  {0.8, 0.2, 0.12, 70.0},
                        {0.5, 0.5, 0.30, -40.0}, {0.6, 0.85, 0.05, 95.0}};
  Image img(n, n);
  SplitMix64 rng(0xb10b5ULL);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      double x = static_cast<double>(c) / static_cast<double>(n - 1);
      double y = static_cast<double>(r) / static_cast<double>(n - 1);
      double v = 120.0;
      for (const Blob &b : spots) {
        double d2 = (x - b.c) * (x - b.c) + (y - b.r) * (y - b.r);
        v += b.amp * std::exp(-d2 / (2.0 * b.sigma * b.sigma));
      }
      v += 18.0 * std::sin(2.0 * M_PI * static_cast<double>(r) / 13.0) *
           std::sin(2.0 * M_PI * static_cast<double>(c) / 17.0);
      v += 1.5 * (rng.next_double() - 0.5);
      img(r, c) = v;
    }
  return quantize8(img);
}

} // namespace

const std::vector<std::string> &fixture_names() {
  static const std::vector<std::string> names = {"gradient", "checkerboard",
                                                 "bandnoise", "blobs"};
  return names;
}

Image make_fixture(const std::string &name, std::size_t size) {
  if (name == "gradient") return gradient(size);
  if (name == "checkerboard") return checkerboard(size);
  if (name == "bandnoise") return bandnoise(size);
  if (name == "blobs") return blobs(size);
  throw std::invalid_argument("unknown fixture '" + name + "'");
}

std::vector<Image> all_fixtures(std::size_t size) {
  std::vector<Image> out;
  for (const auto &n : fixture_names()) out.push_back(make_fixture(n, size));
  return out;
}

} // namespace wm
