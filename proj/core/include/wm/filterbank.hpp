#pragma once

#include <string>
#include <vector>

namespace wm {

using Coeffs = std::vector<double>;

// Two equal-length sequences whose autocorrelations sum to a constant
// (complementary in the Golay sense when is_complementary holds).
struct FilterPair {
  Coeffs h00;
  Coeffs h01;
};

struct ComplementarityResult {
  bool complementary;
  double residual; // max |off-lag term| of the summed autocorrelations
};

enum class WaveletClass { orthogonal, biorthogonal };

// Analysis/synthesis filter quadruple plus bookkeeping.  For orthogonal
// specs g0/g1 are the time-reverses of h0/h1 and all filters have unit
// l2 norm.  raw_h0/raw_h1 keep the un-normalized coefficients (the +-1
// sequences for GRS constructions).
struct WaveletSpec {
  std::string name;
  Coeffs h0, h1; // analysis lowpass / highpass
  Coeffs g0, g1; // synthesis lowpass / highpass
  Coeffs raw_h0, raw_h1;
  std::size_t filter_delay = 0;  // N in the quadrature-mirror relation
  std::size_t recon_delay = 0;   // analysis+synthesis net delay (taps)
  WaveletClass wavelet_class = WaveletClass::orthogonal;
  double normalization = 1.0; // scale applied to raw coefficients
};

ComplementarityResult is_complementary(const FilterPair &pair);

// Rudin-Shapiro doubling from the base pair ([1,1], [1,-1]);
// level k yields length 2^k sequences.
FilterPair grs_kernel(unsigned level);

// Interleaves the level-k kernel polyphase components into the lowpass,
// derives the highpass via the quadrature-mirror relation, and normalizes
// to unit l2 norm.  Level 1 is the 4-tap "GRS4" filter.
WaveletSpec grs_wavelet(unsigned level);

// h1[n] = -(-1)^(N-n) h0[N-n], the coefficient form of -z^-N H0(-z^-1).
Coeffs derive_highpass(const Coeffs &h0, std::size_t N);

// One of: daubechies4, daubechies8, coiflet6, biorthogonal6.2, grs4.
WaveletSpec standard_wavelet(const std::string &name);
const std::vector<std::string> &standard_wavelet_names();

// Max deviation of the two-channel distortion term from a pure delay
// plus the max absolute aliasing term.
double verify_perfect_reconstruction(const WaveletSpec &spec);

// |H(w)| at n_points uniform samples of w in [0, pi].
std::vector<double> frequency_response(const Coeffs &filter,
                                       std::size_t n_points);

} // namespace wm
