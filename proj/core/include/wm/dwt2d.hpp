#pragma once

#include <string>

#include "wm/filterbank.hpp"
#include "wm/image.hpp"
#include "wm/matrix.hpp"

namespace wm {

// The four quarter-size outputs of one level of separable 2-D DWT.
struct SubbandSet {
  Matrix ll, lh, hl, hh;
  std::string spec_name;
};

enum class Subband { LL, LH, HL, HH };

const char *subband_name(Subband b);
Matrix &subband(SubbandSet &s, Subband b);
const Matrix &subband(const SubbandSet &s, Subband b);

// Separable single-level analysis with periodic extension; rows first,
// even-phase downsampling.
SubbandSet dwt2(const Image &img, const WaveletSpec &spec);
SubbandSet dwt2(const Matrix &m, const WaveletSpec &spec);

// Exact inverse of dwt2 for the matching spec (to roundoff).
Image idwt2(const SubbandSet &subbands, const WaveletSpec &spec);
Matrix idwt2_matrix(const SubbandSet &subbands, const WaveletSpec &spec);

} // namespace wm
