#pragma once

#include "wm/dwt2d.hpp"
#include "wm/image.hpp"
#include "wm/matrix.hpp"

#include <array>
#include <limits>
#include <vector>

namespace wm {

// Normalized frequency histogram over fixed bin edges.
struct Histogram {
  std::vector<double> bin_edges;     // ascending, size = bins + 1
  std::vector<double> probabilities; // sums to 1
};

// 256 uniform bins over [-0.5, 255.5], the pixel-domain default.
std::vector<double> pixel_bin_edges();

// Out-of-range samples clamp to the end bins.
Histogram histogram(const Matrix &data, const std::vector<double> &edges);

// Affine min->0, max->255 rescale used before histogramming subbands.
Matrix rescale_to_pixel_range(const Matrix &m);

// Base-2 KL divergence; +infinity when p has mass where q has none.
double kl_divergence(const Histogram &p, const Histogram &q);

// Jensen-Shannon divergence, base 2, always finite, in [0, 1].
double js_divergence(const Histogram &p, const Histogram &q);

// Symmetric 5x5 JSD matrix among {original, LL, LH, HL, HH}; subbands
// rescaled to pixel range before binning.
std::array<std::array<double, 5>, 5> jsd_table(const Image &img,
                                               const WaveletSpec &spec);

// Universal quality index over sliding windows, averaged.  Windows with
// no variance in either image and equal means contribute 1; other
// degenerate windows (zero denominator) are skipped.
double uqi(const Image &a, const Image &b, std::size_t window = 8,
           std::size_t stride = 1);

} // namespace wm
