#include "wm/attacks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

namespace wm {

namespace {

// ---- JPEG-like model ----------------------------------------------------

// Annex-K luminance quantization table.
constexpr std::array<int, 64> kLuminanceTable = {
    16, 11, 10, 16, 24,  40,  51,  61,  //
    12, 12, 14, 19, 26,  58,  60,  55,  //
    14, 13, 16, 24, 40,  57,  69,  56,  //
    14, 17, 22, 29, 51,  87,  80,  62,  //
    18, 22, 37, 56, 68,  109, 103, 77,  //
    24, 35, 55, 64, 81,  104, 113, 92,  //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99};

std::array<double, 64> quant_steps(int quality) {
  double scale = quality < 50 ? 5000.0 / quality : 200.0 - 2.0 * quality;
  std::array<double, 64> steps{};
  for (std::size_t i = 0; i < 64; ++i) {
    double s = std::floor((kLuminanceTable[i] * scale + 50.0) / 100.0);
    steps[i] = std::clamp(s, 1.0, 255.0);
  }
  return steps;
}

// Orthonormal 8-point DCT-II basis, C[u][x].
const std::array<std::array<double, 8>, 8> &dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> c{};
    for (int u = 0; u < 8; ++u) {
      double cu = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x)
        c[u][x] = cu * std::cos((2 * x + 1) * u * M_PI / 16.0);
    }
    return c;
  }();
  return basis;
}

void dct8x8(const double in[8][8], double out[8][8], bool inverse) {
  const auto &c = dct_basis();
  double tmp[8][8];
  // Rows.
  for (int r = 0; r < 8; ++r)
    for (int u = 0; u < 8; ++u) {
      double acc = 0.0;
      for (int x = 0; x < 8; ++x)
        acc += (inverse ? c[x][u] : c[u][x]) * in[r][x];
      tmp[r][u] = acc;
    }
  // Columns.
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      double acc = 0.0;
      for (int x = 0; x < 8; ++x)
        acc += (inverse ? c[x][u] : c[u][x]) * tmp[x][v];
      out[u][v] = acc;
    }
}

std::size_t reflect_index(std::size_t i, std::size_t n) {
  return i < n ? i : 2 * n - 2 - i;
}

} // namespace

Image jpeg_like_attack(const Image &img, int quality) {
  if (quality < 1 || quality > 100)
    throw std::invalid_argument("jpeg_like_attack: quality must be in 1..100");
  Image q = quantize8(img);
  const std::size_t R = q.rows(), C = q.cols();
  const std::size_t PR = (R + 7) / 8 * 8, PC = (C + 7) / 8 * 8;
  const auto steps = quant_steps(quality);

  Image out(R, C);
  double block[8][8], coef[8][8], rec[8][8];
  for (std::size_t br = 0; br < PR; br += 8) {
    for (std::size_t bc = 0; bc < PC; bc += 8) {
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
          block[i][j] = q(reflect_index(br + i, R), reflect_index(bc + j, C)) -
                        128.0;
      dct8x8(block, coef, false);
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          double s = steps[i * 8 + j];
          coef[i][j] = std::round(coef[i][j] / s) * s;
        }
      dct8x8(coef, rec, true);
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          std::size_t r = br + i, c = bc + j;
          if (r < R && c < C)
            out(r, c) = static_cast<double>(quantize_sample(rec[i][j] + 128.0));
        }
    }
  }
  return out;
}

namespace {

// ---- JPEG2000-like model ------------------------------------------------

constexpr double kA1 = -1.586134342059924;
constexpr double kA2 = -0.052980118572961;
constexpr double kA3 = 0.882911075530934;
constexpr double kA4 = 0.443506852043971;
constexpr double kK = 1.230174104914001; // lowpass gain factor

// In-place CDF 9/7 lifting over a strided view with whole-sample
// symmetric extension; works for any length >= 2.
struct Strided {
  double *p;
  std::size_t n, stride;
  double &operator[](std::size_t i) { return p[i * stride]; }
  double at_reflect(long i) const {
    long m = static_cast<long>(n);
    if (i < 0) i = -i;
    if (i >= m) i = 2 * (m - 1) - i;
    return p[static_cast<std::size_t>(i) * stride];
  }
};

void lift_pass(Strided x, double a, bool odd_targets) {
  long n = static_cast<long>(x.n);
  for (long i = odd_targets ? 1 : 0; i < n; i += 2)
    x[static_cast<std::size_t>(i)] +=
        a * (x.at_reflect(i - 1) + x.at_reflect(i + 1));
}

void cdf97_forward(Strided x) {
  lift_pass(x, kA1, true);
  lift_pass(x, kA2, false);
  lift_pass(x, kA3, true);
  lift_pass(x, kA4, false);
  for (std::size_t i = 0; i < x.n; ++i)
    x[i] *= (i % 2 == 0) ? kK : 1.0 / kK;
}

void cdf97_inverse(Strided x) {
  for (std::size_t i = 0; i < x.n; ++i)
    x[i] *= (i % 2 == 0) ? 1.0 / kK : kK;
  lift_pass(x, -kA4, false);
  lift_pass(x, -kA3, true);
  lift_pass(x, -kA2, false);
  lift_pass(x, -kA1, true);
}

// De-interleave even (lowpass) samples to the front.
void deinterleave(Strided x) {
  std::vector<double> tmp(x.n);
  std::size_t half = (x.n + 1) / 2;
  for (std::size_t i = 0; i < x.n; ++i) tmp[i] = x[i];
  for (std::size_t i = 0; i < x.n; i += 2) x[i / 2] = tmp[i];
  for (std::size_t i = 1; i < x.n; i += 2) x[half + i / 2] = tmp[i];
}

void interleave(Strided x) {
  std::vector<double> tmp(x.n);
  std::size_t half = (x.n + 1) / 2;
  for (std::size_t i = 0; i < x.n; ++i) tmp[i] = x[i];
  for (std::size_t i = 0; i < half; ++i) x[2 * i] = tmp[i];
  for (std::size_t i = half; i < x.n; ++i) x[2 * (i - half) + 1] = tmp[i];
}

void dwt97_2d(Matrix &m, int levels, bool forward) {
  std::size_t R = m.rows(), C = m.cols();
  std::vector<std::pair<std::size_t, std::size_t>> extents;
  std::size_t r = R, c = C;
  for (int l = 0; l < levels; ++l) {
    extents.emplace_back(r, c);
    r = (r + 1) / 2;
    c = (c + 1) / 2;
  }
  if (!forward) std::reverse(extents.begin(), extents.end());
  for (auto [er, ec] : extents) {
    if (forward) {
      for (std::size_t i = 0; i < er; ++i) {
        Strided row{&m.data()[i * C], ec, 1};
        cdf97_forward(row);
        deinterleave(row);
      }
      for (std::size_t j = 0; j < ec; ++j) {
        Strided col{&m.data()[j], er, C};
        cdf97_forward(col);
        deinterleave(col);
      }
    } else {
      for (std::size_t j = 0; j < ec; ++j) {
        Strided col{&m.data()[j], er, C};
        interleave(col);
        cdf97_inverse(col);
      }
      for (std::size_t i = 0; i < er; ++i) {
        Strided row{&m.data()[i * C], ec, 1};
        interleave(row);
        cdf97_inverse(row);
      }
    }
  }
}

long deadzone_quantize(double c, double step) {
  double a = std::abs(c) / step;
  return static_cast<long>((c < 0 ? -1.0 : 1.0) * std::floor(a));
}

double deadzone_dequantize(long q, double step) {
  if (q == 0) return 0.0;
  double mag = (static_cast<double>(std::labs(q)) + 0.5) * step;
  return q < 0 ? -mag : mag;
}

double entropy_bpp(const Matrix &coeffs, double step) {
  std::map<long, std::size_t> counts;
  for (double c : coeffs.data()) ++counts[deadzone_quantize(c, step)];
  double n = static_cast<double>(coeffs.size());
  double h = 0.0;
  for (auto &[q, k] : counts) {
    double p = static_cast<double>(k) / n;
    h -= p * std::log2(p);
  }
  return h;
}

} // namespace

Image jpeg2000_like_attack(const Image &img, double bitrate) {
  if (bitrate <= 0.0)
    throw std::invalid_argument("jpeg2000_like_attack: bitrate must be > 0");
  if (img.rows() < 32 || img.cols() < 32)
    throw std::invalid_argument("jpeg2000_like_attack: image must be >= 32x32");

  const int levels = 3;
  Matrix coeffs = quantize8(img).matrix();
  dwt97_2d(coeffs, levels, true);

  // Bisection on log(step) against the monotone entropy-vs-step curve.
  const double step_lo = 1.0 / 1024.0, step_hi = 4096.0;
  const double tol = 0.02;
  double h_lo = entropy_bpp(coeffs, step_lo); // highest achievable rate
  double h_hi = entropy_bpp(coeffs, step_hi); // lowest achievable rate
  if (bitrate > h_lo + tol || bitrate < h_hi - tol) {
    std::ostringstream msg;
    msg << "jpeg2000_like_attack: target " << bitrate
        << " bpp unreachable; achievable range [" << h_hi << ", " << h_lo
        << "]";
    throw CalibrationError(msg.str());
  }

  double lo = std::log(step_lo), hi = std::log(step_hi);
  double step = step_lo;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    step = std::exp(mid);
    double h = entropy_bpp(coeffs, step);
    if (std::abs(h - bitrate) <= tol) break;
    if (h > bitrate)
      lo = mid;
    else
      hi = mid;
  }

  for (double &c : coeffs.data())
    c = deadzone_dequantize(deadzone_quantize(c, step), step);
  dwt97_2d(coeffs, levels, false);

  Image out(img.rows(), img.cols());
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    out.matrix().data()[i] =
        static_cast<double>(quantize_sample(coeffs.data()[i]));
  return out;
}

Image apply_attack(const Image &img, const AttackSpec &spec) {
  switch (spec.kind) {
    case AttackKind::none: return quantize8(img);
    case AttackKind::jpeg_like: return jpeg_like_attack(img, spec.quality);
    case AttackKind::jpeg2000_like:
      return jpeg2000_like_attack(img, spec.bitrate);
  }
  throw std::invalid_argument("apply_attack: bad kind");
}

std::string attack_to_string(const AttackSpec &spec) {
  std::ostringstream s;
  switch (spec.kind) {
    case AttackKind::none: s << "none"; break;
    case AttackKind::jpeg_like: s << "jpeg@Q=" << spec.quality; break;
    case AttackKind::jpeg2000_like: s << "jpeg2000@" << spec.bitrate << "bpp"; break;
  }
  return s.str();
}

} // namespace wm
