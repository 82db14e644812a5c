#include "wm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wm {

std::vector<double> pixel_bin_edges() {
  std::vector<double> edges(257);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = -0.5 + static_cast<double>(i);
  return edges;
}

Histogram histogram(const Matrix &data, const std::vector<double> &edges) {
  if (data.size() == 0) throw std::invalid_argument("histogram: empty data");
  if (edges.size() < 3 || !std::is_sorted(edges.begin(), edges.end()))
    throw std::invalid_argument("histogram: need >= 2 ascending bins");
  const std::size_t bins = edges.size() - 1;
  std::vector<double> counts(bins, 0.0);
  for (double v : data.data()) {
    // Clamp out-of-range samples into the end bins.
    std::size_t b;
    if (v < edges.front()) {
      b = 0;
    } else if (v >= edges.back()) {
      b = bins - 1;
    } else {
      b = static_cast<std::size_t>(
              std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()) -
          1;
    }
    counts[b] += 1.0;
  }
  const double n = static_cast<double>(data.size());
  for (double &c : counts) c /= n;
  return {edges, std::move(counts)};
}

Matrix rescale_to_pixel_range(const Matrix &m) {
  double lo = m.data()[0], hi = m.data()[0];
  for (double v : m.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Matrix out(m.rows(), m.cols());
  if (hi == lo) return out; // constant input maps to all zeros
  const double s = 255.0 / (hi - lo);
  for (std::size_t i = 0; i < m.size(); ++i)
    out.data()[i] = (m.data()[i] - lo) * s;
  return out;
}

namespace {

void check_edges(const Histogram &p, const Histogram &q) {
  if (p.bin_edges != q.bin_edges)
    throw std::invalid_argument("divergence: bin edges differ");
}

} // namespace

double kl_divergence(const Histogram &p, const Histogram &q) {
  check_edges(p, q);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.probabilities.size(); ++i) {
    double pi = p.probabilities[i], qi = q.probabilities[i];
    if (pi > 0.0) {
      if (qi == 0.0) return std::numeric_limits<double>::infinity();
      kl += pi * std::log2(pi / qi);
    }
  }
  return kl;
}

double js_divergence(const Histogram &p, const Histogram &q) {
  check_edges(p, q);
  double jsd = 0.0;
  for (std::size_t i = 0; i < p.probabilities.size(); ++i) {
    double pi = p.probabilities[i], qi = q.probabilities[i];
    double mi = 0.5 * (pi + qi);
    if (pi > 0.0) jsd += 0.5 * pi * std::log2(pi / mi);
    if (qi > 0.0) jsd += 0.5 * qi * std::log2(qi / mi);
  }
  return jsd;
}

std::array<std::array<double, 5>, 5> jsd_table(const Image &img,
                                               const WaveletSpec &spec) {
  SubbandSet s = dwt2(img, spec);
  auto edges = pixel_bin_edges();
  std::array<Histogram, 5> hists = {
      histogram(img.matrix(), edges),
      histogram(rescale_to_pixel_range(s.ll), edges),
      histogram(rescale_to_pixel_range(s.lh), edges),
      histogram(rescale_to_pixel_range(s.hl), edges),
      histogram(rescale_to_pixel_range(s.hh), edges)};
  std::array<std::array<double, 5>, 5> table{};
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j)
      table[i][j] = table[j][i] = js_divergence(hists[i], hists[j]);
  return table;
}

double uqi(const Image &a, const Image &b, std::size_t window,
           std::size_t stride) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("uqi: dimension mismatch");
  if (window < 2 || window > a.rows() || window > a.cols())
    throw std::invalid_argument("uqi: bad window size");
  if (stride == 0) throw std::invalid_argument("uqi: stride must be positive");

  const double n = static_cast<double>(window * window);
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t r = 0; r + window <= a.rows(); r += stride) {
    for (std::size_t c = 0; c + window <= a.cols(); c += stride) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (std::size_t i = 0; i < window; ++i)
        for (std::size_t j = 0; j < window; ++j) {
          double x = a(r + i, c + j), y = b(r + i, c + j);
          sx += x;
          sy += y;
          sxx += x * x;
          syy += y * y;
          sxy += x * y;
        }
      double mx = sx / n, my = sy / n;
      double vx = (sxx - n * mx * mx) / (n - 1);
      double vy = (syy - n * my * my) / (n - 1);
      double cxy = (sxy - n * mx * my) / (n - 1);
      double den = (vx + vy) * (mx * mx + my * my);
      if (den <= 0.0) {
        // Flat identical windows count as perfect; anything else with a
        // zero denominator is skipped.
        if (vx == 0.0 && vy == 0.0 && mx == my) {
          sum += 1.0;
          ++used;
        }
        continue;
      }
      sum += 4.0 * cxy * mx * my / den;
      ++used;
    }
  }
  if (used == 0) throw std::runtime_error("uqi: all windows degenerate");
  return sum / static_cast<double>(used);
}

} // namespace wm
