#include "wm/filterbank.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace wm {

namespace {

Coeffs convolve(const Coeffs &a, const Coeffs &b) {
  Coeffs out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Coeffs alternate_signs(const Coeffs &h) {
  Coeffs out(h.size());
  for (std::size_t k = 0; k < h.size(); ++k)
    out[k] = (k % 2 == 0) ? h[k] : -h[k];
  return out;
}

Coeffs reversed(const Coeffs &h) { return Coeffs(h.rbegin(), h.rend()); }

void accumulate(Coeffs &dst, const Coeffs &src) {
  if (dst.size() < src.size()) dst.resize(src.size(), 0.0);
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

double l2_norm(const Coeffs &h) {
  double s = 0.0;
  for (double v : h) s += v * v;
  return std::sqrt(s);
}

// Distortion and aliasing polynomials of the two-channel bank:
//   t = (g0*h0 + g1*h1)/2,  a = (g0*h0~ + g1*h1~)/2
// where ~ negates odd-indexed coefficients.  PR means a == 0 and
// t == delta shifted by the reconstruction delay.
struct PrPolynomials {
  Coeffs distortion;
  Coeffs aliasing;
  std::size_t delay; // index of the dominant distortion coefficient
};

PrPolynomials pr_polynomials(const WaveletSpec &s) {
  Coeffs t, a;
  accumulate(t, convolve(s.g0, s.h0));
  accumulate(t, convolve(s.g1, s.h1));
  accumulate(a, convolve(s.g0, alternate_signs(s.h0)));
  accumulate(a, convolve(s.g1, alternate_signs(s.h1)));
  for (double &v : t) v *= 0.5;
  for (double &v : a) v *= 0.5;
  std::size_t d = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i]) > std::abs(t[d])) d = i;
  return {std::move(t), std::move(a), d};
}

WaveletSpec make_orthogonal(std::string name, Coeffs h0_raw,
                            double normalization) {
  WaveletSpec s;
  s.name = std::move(name);
  s.raw_h0 = h0_raw;
  s.filter_delay = h0_raw.size() - 1;
  s.raw_h1 = derive_highpass(h0_raw, s.filter_delay);
  s.normalization = normalization;
  s.h0 = h0_raw;
  s.h1 = s.raw_h1;
  for (double &v : s.h0) v *= normalization;
  for (double &v : s.h1) v *= normalization;
  s.g0 = reversed(s.h0);
  s.g1 = reversed(s.h1);
  s.wavelet_class = WaveletClass::orthogonal;
  s.recon_delay = pr_polynomials(s).delay;
  return s;
}

} // namespace

ComplementarityResult is_complementary(const FilterPair &pair) {
  if (pair.h00.size() != pair.h01.size())
    throw std::invalid_argument("is_complementary: length mismatch");
  const std::size_t l = pair.h00.size();
  if (l == 0) throw std::invalid_argument("is_complementary: empty pair");
  // Sum of autocorrelations at every lag; complementary iff the lag-0
  // term is 2l and everything else vanishes.
  double max_off = 0.0;
  double lag0 = 0.0;
  for (std::size_t lag = 0; lag < l; ++lag) {
    double acc = 0.0;
    for (std::size_t k = 0; k + lag < l; ++k)
      acc += pair.h00[k] * pair.h00[k + lag] + pair.h01[k] * pair.h01[k + lag];
    if (lag == 0)
      lag0 = acc;
    else
      max_off = std::max(max_off, std::abs(acc));
  }
  const double tol = 1e-10;
  bool ok = max_off <= tol && std::abs(lag0 - 2.0 * static_cast<double>(l)) <= tol;
  return {ok, max_off};
}

FilterPair grs_kernel(unsigned level) {
  if (level == 0) throw std::invalid_argument("grs_kernel: level must be >= 1");
  Coeffs a{1.0, 1.0}, b{1.0, -1.0};
  for (unsigned k = 1; k < level; ++k) {
    Coeffs a2 = a, b2 = a;
    a2.insert(a2.end(), b.begin(), b.end());
    for (double v : b) b2.push_back(-v);
    a = std::move(a2);
    b = std::move(b2);
  }
  return {std::move(a), std::move(b)};
}

Coeffs derive_highpass(const Coeffs &h0, std::size_t N) {
  if (N != h0.size() - 1)
    throw std::invalid_argument("derive_highpass: N must equal len(h0)-1");
  Coeffs h1(h0.size());
  for (std::size_t n = 0; n <= N; ++n) {
    double sign = ((N - n) % 2 == 0) ? 1.0 : -1.0;
    h1[n] = -sign * h0[N - n];
  }
  return h1;
}

WaveletSpec grs_wavelet(unsigned level) {
  FilterPair k = grs_kernel(level);
  const std::size_t l = k.h00.size();
  Coeffs h0(2 * l);
  for (std::size_t i = 0; i < l; ++i) {
    h0[2 * i] = k.h00[i];
    h0[2 * i + 1] = k.h01[i];
  }
  double norm = 1.0 / std::sqrt(static_cast<double>(2 * l));
  std::string name =
      level == 1 ? "GRS4" : "GRS" + std::to_string(2 * l);
  return make_orthogonal(std::move(name), std::move(h0), norm);
}

namespace {

WaveletSpec make_bior62() {
  const double s2 = std::numbers::sqrt2;
  WaveletSpec s;
  s.name = "biorthogonal6.2";
  // CDF spline family: 6-tap analysis lowpass, 2-tap analysis highpass.
  s.h0 = {-s2 / 16, s2 / 16, s2 / 2, s2 / 2, s2 / 16, -s2 / 16};
  s.h1 = {s2 / 2, -s2 / 2};
  s.g0 = {s2 / 2, s2 / 2};
  s.g1 = {s2 / 16, s2 / 16, -s2 / 2, s2 / 2, -s2 / 16, -s2 / 16};
  s.raw_h0 = s.h0;
  s.raw_h1 = s.h1;
  s.filter_delay = s.h0.size() - 1;
  s.wavelet_class = WaveletClass::biorthogonal;
  s.normalization = 1.0;
  s.recon_delay = pr_polynomials(s).delay;
  return s;
}

} // namespace

const std::vector<std::string> &standard_wavelet_names() {
  static const std::vector<std::string> names = {
      "daubechies4", "daubechies8", "coiflet6", "biorthogonal6.2", "grs4"};
  return names;
}

WaveletSpec standard_wavelet(const std::string &name) {
  if (name == "grs4") {
    WaveletSpec s = grs_wavelet(1);
    s.name = "grs4";
    return s;
  }
  if (name == "daubechies4") {
    const double s3 = std::sqrt(3.0);
    const double d = 4.0 * std::numbers::sqrt2;
    return make_orthogonal(
        "daubechies4",
        {(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d}, 1.0);
  }
  if (name == "daubechies8") {
    return make_orthogonal("daubechies8",
                           {0.23037781330885523, 0.7148465705525415,
                            0.6308807679295904, -0.02798376941698385,
                            -0.18703481171888114, 0.030841381835986965,
                            0.032883011666982945, -0.010597401784997278},
                           1.0);
  }
  if (name == "coiflet6") {
    return make_orthogonal("coiflet6",
                           {-0.01565572813546454, -0.0727326195128539,
                            0.38486484686420286, 0.8525720202122554,
                            0.33789766245780922, -0.0727326195128539},
                           1.0);
  }
  if (name == "biorthogonal6.2") return make_bior62();
  std::string valid;
  for (const auto &n : standard_wavelet_names()) valid += " " + n;
  throw std::invalid_argument("unknown wavelet '" + name + "'; valid:" + valid);
}

double verify_perfect_reconstruction(const WaveletSpec &spec) {
  PrPolynomials p = pr_polynomials(spec);
  double res = 0.0;
  for (std::size_t i = 0; i < p.distortion.size(); ++i) {
    double want = (i == p.delay) ? 1.0 : 0.0;
    res = std::max(res, std::abs(p.distortion[i] - want));
  }
  for (double v : p.aliasing) res = std::max(res, std::abs(v));
  return res;
}

std::vector<double> frequency_response(const Coeffs &filter,
                                       std::size_t n_points) {
  if (n_points < 2)
    throw std::invalid_argument("frequency_response: n_points must be >= 2");
  std::vector<double> mag(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    double w = std::numbers::pi * static_cast<double>(i) /
               static_cast<double>(n_points - 1);
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < filter.size(); ++k)
      acc += filter[k] *
             std::exp(std::complex<double>(0.0, -w * static_cast<double>(k)));
    mag[i] = std::abs(acc);
  }
  return mag;
}

} // namespace wm
