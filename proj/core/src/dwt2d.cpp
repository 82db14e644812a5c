#include "wm/dwt2d.hpp"

#include <stdexcept>

namespace wm {

namespace {

// y[m] = sum_k h[k] x[(2m - k) mod M]: circular convolution followed by
// even-phase downsampling.
void analyze_1d(const double *x, std::size_t M, const Coeffs &h, double *y) {
  const std::size_t L = h.size();
  for (std::size_t m = 0; m < M / 2; ++m) {
    double acc = 0.0;
    std::size_t n = 2 * m;
    for (std::size_t k = 0; k < L; ++k) {
      std::size_t idx = (n + M * L - k) % M; // n - k mod M, nonnegative
      acc += h[k] * x[idx];
    }
    y[m] = acc;
  }
}

// Upsample both bands, filter with g0/g1, sum, undo the net delay.
void synthesize_1d(const double *lo, const double *hi, std::size_t M,
                   const WaveletSpec &s, double *x) {
  for (std::size_t n = 0; n < M; ++n) x[n] = 0.0;
  auto add_band = [&](const double *c, const Coeffs &g) {
    for (std::size_t m = 0; m < M / 2; ++m) {
      const double v = c[m];
      if (v == 0.0) continue;
      const std::size_t base = 2 * m;
      for (std::size_t k = 0; k < g.size(); ++k)
        x[(base + k) % M] += g[k] * v;
    }
  };
  add_band(lo, s.g0);
  add_band(hi, s.g1);
  // x currently holds the signal delayed by recon_delay taps.
  const std::size_t D = s.recon_delay % M;
  if (D != 0) {
    std::vector<double> tmp(x, x + M);
    for (std::size_t n = 0; n < M; ++n) x[n] = tmp[(n + D) % M];
  }
}

void check_dims(std::size_t rows, std::size_t cols, const WaveletSpec &spec) {
  if (rows % 2 != 0 || cols % 2 != 0)
    throw std::invalid_argument("dwt2: dimensions must be even");
  std::size_t max_len = std::max({spec.h0.size(), spec.h1.size(),
                                  spec.g0.size(), spec.g1.size()});
  if (rows < max_len || cols < max_len)
    throw std::invalid_argument("dwt2: image smaller than filter length");
}

} // namespace

const char *subband_name(Subband b) {
  switch (b) {
    case Subband::LL: return "LL";
    case Subband::LH: return "LH";
    case Subband::HL: return "HL";
    case Subband::HH: return "HH";
  }
  return "?";
}

Matrix &subband(SubbandSet &s, Subband b) {
  switch (b) {
    case Subband::LL: return s.ll;
    case Subband::LH: return s.lh;
    case Subband::HL: return s.hl;
    default: return s.hh;
  }
}

const Matrix &subband(const SubbandSet &s, Subband b) {
  return subband(const_cast<SubbandSet &>(s), b);
}

SubbandSet dwt2(const Matrix &m, const WaveletSpec &spec) {
  const std::size_t R = m.rows(), C = m.cols();
  check_dims(R, C, spec);

  // Row pass: each row filtered and downsampled to C/2.
  Matrix rl(R, C / 2), rh(R, C / 2);
  for (std::size_t r = 0; r < R; ++r) {
    analyze_1d(&m.data()[r * C], C, spec.h0, &rl.data()[r * (C / 2)]);
    analyze_1d(&m.data()[r * C], C, spec.h1, &rh.data()[r * (C / 2)]);
  }

  // Column pass over each half, on transposed buffers.
  auto column_pass = [&](const Matrix &half, Matrix &lo, Matrix &hi) {
    const std::size_t HC = half.cols();
    std::vector<double> col(R), out(R / 2);
    lo = Matrix(R / 2, HC);
    hi = Matrix(R / 2, HC);
    for (std::size_t c = 0; c < HC; ++c) {
      for (std::size_t r = 0; r < R; ++r) col[r] = half(r, c);
      analyze_1d(col.data(), R, spec.h0, out.data());
      for (std::size_t r = 0; r < R / 2; ++r) lo(r, c) = out[r];
      analyze_1d(col.data(), R, spec.h1, out.data());
      for (std::size_t r = 0; r < R / 2; ++r) hi(r, c) = out[r];
    }
  };

  SubbandSet s;
  s.spec_name = spec.name;
  // LH = lowpass rows / highpass columns; HL the converse.
  column_pass(rl, s.ll, s.lh);
  column_pass(rh, s.hl, s.hh);
  return s;
}

SubbandSet dwt2(const Image &img, const WaveletSpec &spec) {
  return dwt2(img.matrix(), spec);
}

Matrix idwt2_matrix(const SubbandSet &s, const WaveletSpec &spec) {
  if (s.spec_name != spec.name)
    throw std::invalid_argument("idwt2: subbands built with '" + s.spec_name +
                                "', spec is '" + spec.name + "'");
  if (!s.ll.same_shape(s.lh) || !s.ll.same_shape(s.hl) ||
      !s.ll.same_shape(s.hh))
    throw std::invalid_argument("idwt2: inconsistent subband shapes");
  const std::size_t R = 2 * s.ll.rows(), C = 2 * s.ll.cols();
  check_dims(R, C, spec);

  // Undo column pass.
  auto column_merge = [&](const Matrix &lo, const Matrix &hi) {
    const std::size_t HC = lo.cols();
    Matrix half(R, HC);
    std::vector<double> cl(R / 2), ch(R / 2), out(R);
    for (std::size_t c = 0; c < HC; ++c) {
      for (std::size_t r = 0; r < R / 2; ++r) {
        cl[r] = lo(r, c);
        ch[r] = hi(r, c);
      }
      synthesize_1d(cl.data(), ch.data(), R, spec, out.data());
      for (std::size_t r = 0; r < R; ++r) half(r, c) = out[r];
    }
    return half;
  };
  Matrix rl = column_merge(s.ll, s.lh);
  Matrix rh = column_merge(s.hl, s.hh);

  // Undo row pass.
  Matrix m(R, C);
  std::vector<double> out(C);
  for (std::size_t r = 0; r < R; ++r) {
    synthesize_1d(&rl.data()[r * (C / 2)], &rh.data()[r * (C / 2)], C, spec,
                  out.data());
    for (std::size_t c = 0; c < C; ++c) m(r, c) = out[c];
  }
  return m;
}

Image idwt2(const SubbandSet &s, const WaveletSpec &spec) {
  return Image(idwt2_matrix(s, spec));
}

} // namespace wm
